// Acceptance run: one line per criterion, pass or fail, at pinned tolerances.

#include "zfexp/verify.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>

using namespace zfexp;

namespace {

struct Criterion {
  int number;
  std::string title;
  std::string suite;
  std::vector<RunConfig> runs;
};

const std::vector<double> kGrid4{-1.0, -0.23, 0.41, 1.17};
const std::vector<double> kGrid3{-0.9, 0.15, 1.1};

RunConfig base(const std::vector<double>& grid, int K, const ScatteringModel& model, const std::string& suite,
               std::uint64_t seed) {
  RunConfig c;
  c.grid = grid;
  c.mass = 1.0;
  c.truncation = K;
  c.model = model;
  c.seed = seed;
  c.tolerances = Tolerances{1e-12, 1e-10, 1e-12};
  c.suites = {suite};
  return c;
}

std::vector<ScatteringModel> three_families() {
  return {ScatteringModel::free(), ScatteringModel::ising(), ScatteringModel::sinh_exp(1.0)};
}

std::vector<RunConfig> over_families(const std::vector<double>& grid, int K, const std::string& suite) {
  std::vector<RunConfig> out;
  std::uint64_t seed = 1;
  for (const auto& m : three_families()) out.push_back(base(grid, K, m, suite, seed++));
  return out;
}

std::vector<Criterion> criteria() {
  std::vector<Criterion> cs;
  auto scattering = over_families(kGrid4, 3, "scattering");
  scattering.push_back(base(kGrid4, 3, ScatteringModel::sinh_exp(2.5).inverse(), "scattering", 9));
  cs.push_back({1, "scattering axioms and composition law over S_4", "scattering", scattering});
  cs.push_back({2, "Zamolodchikov-Faddeev relations", "zf_algebra", over_families(kGrid4, 3, "zf_algebra")});

  std::vector<RunConfig> norms;
  std::uint64_t seed = 100;
  for (const auto& m : three_families())
    for (const auto& w : {Indicatrix::zero(), Indicatrix::sqrt(0.5), Indicatrix::log(1.0)}) {
      RunConfig c = base(kGrid4, 3, m, "norms", seed++);
      c.omega = w;
      c.instances["norms"] = 200;
      norms.push_back(c);
    }
  cs.push_back({3, "norm inequalities, 200 instances each", "norms", norms});

  cs.push_back({4, "contraction lemmas and binomial cancellation, m, n <= 3", "contractions",
                over_families(kGrid4, 3, "contractions")});
  cs.push_back({5, "S-symmetry of f_mn, m + n <= 4", "symmetry", over_families(kGrid3, 4, "symmetry")});

  auto fifty = [](std::vector<RunConfig> runs, const std::string& suite) {
    for (auto& r : runs) r.instances[suite] = 50;
    return runs;
  };
  cs.push_back({6, "dual basis and inversion formula", "dual_basis", fifty(over_families(kGrid4, 3, "dual_basis"), "dual_basis")});
  cs.push_back({7, "expansion roundtrip and uniqueness", "expansion", fifty(over_families(kGrid4, 3, "expansion"), "expansion")});
  cs.push_back({8, "Poincare covariance and reflection of coefficients", "transformations",
                fifty(over_families(kGrid4, 3, "transformations"), "transformations")});

  std::vector<RunConfig> warped;
  seed = 200;
  for (double a : {0.5, 1.0, 2.0}) {
    RunConfig c = base(kGrid4, 3, ScatteringModel::sinh_exp(a), "warped", seed++);
    c.instances["warped"] = 10;
    warped.push_back(c);
  }
  cs.push_back({9, "warped convolution, Q-commutator algebra, deformed relations", "warped", warped});

  std::vector<RunConfig> nested;
  seed = 300;
  std::vector<ScatteringModel> models{ScatteringModel::free(), ScatteringModel::ising()};
  for (double a : {0.5, 1.0, 2.0}) models.push_back(ScatteringModel::sinh_exp(a));
  for (const auto& m : models) {
    RunConfig c = base(kGrid3, 3, m, "nested", seed++);
    c.instances["nested"] = 20;
    nested.push_back(c);
  }
  cs.push_back({10, "nested commutators for free, Ising and sinh-exp scattering", "nested", nested});
  return cs;
}

std::string describe(const RunConfig& c) {
  std::string s = c.model.name() + " N=" + std::to_string(c.grid.size()) + " K=" + std::to_string(c.truncation);
  if (c.omega.family() != IndicatrixFamily::Zero) s += " omega=" + c.omega.name();
  return s;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  bool all_ok = true;
  for (const auto& cr : criteria()) {
    bool ok = true;
    std::size_t checks = 0;
    double worst = 0.0;  // largest residual / tolerance
    std::vector<std::string> failures;
    for (const auto& cfg : cr.runs) {
      Report r;
      try {
        r = run_suites(cfg);
      } catch (const std::exception& e) {
        ok = false;
        failures.push_back(describe(cfg) + ": " + e.what());
        continue;
      }
      for (const auto& w : r.warnings) std::cerr << "  warning [" << describe(cfg) << "] " << w << '\n';
      for (const auto& c : r.checks) {
        if (c.status == CheckStatus::Skip) {
          ok = false;
          failures.push_back(describe(cfg) + ": skipped " + c.anchor + " (" + c.note + ")");
          continue;
        }
        ++checks;
        if (c.tolerance > 0.0) worst = std::max(worst, c.residual / c.tolerance);
        if (c.status == CheckStatus::Fail) {
          ok = false;
          failures.push_back(describe(cfg) + ": " + c.anchor + " residual " + format_number(c.residual) +
                             " > " + format_number(c.tolerance) + (c.note.empty() ? "" : " (" + c.note + ")"));
        }
      }
    }
    all_ok = all_ok && ok;
    std::printf("criterion %2d: %s  %-62s %4zu checks, worst residual/tolerance %.3e\n", cr.number, ok ? "PASS" : "FAIL",
                cr.title.c_str(), checks, worst);
    for (const auto& f : failures) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("acceptance: %s in %.1f s\n", all_ok ? "all criteria pass" : "some criteria FAIL", secs);
  return all_ok ? 0 : 1;
}
