#pragma once

#include "zfexp/contractions.hpp"
#include "zfexp/expansion.hpp"
#include "zfexp/fock.hpp"
#include "zfexp/io.hpp"
#include "zfexp/random.hpp"
#include "zfexp/scattering.hpp"
#include "zfexp/warped.hpp"
#include "zfexp/zops.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace zfexp {

/// Raised by parse_config with every violation found, one per line.
class ConfigError : public InputError {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : InputError(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (const auto& x : v) s += "\n  - " + x;
    return s;
  }

  std::vector<std::string> violations_;
};

struct Tolerances {
  double exact = 1e-12;     // identities that hold entry by entry
  double equality = 1e-10;  // relative residual of composite computations
  double slack = 1e-12;     // inequalities pass when lhs <= (1 + slack) rhs
};

struct RunConfig {
  std::vector<double> grid{-0.9, 0.15, 1.1};
  double mass = 1.0;
  int truncation = 3;
  ScatteringModel model = ScatteringModel::free();
  Indicatrix omega = Indicatrix::zero();
  std::uint64_t seed = 1;
  Tolerances tolerances;
  std::map<std::string, Tolerances> suite_tolerances;
  std::vector<std::string> suites;
  std::map<std::string, int> instances;
  std::optional<double> deformation;

  Tolerances tolerances_for(const std::string& suite) const {
    auto it = suite_tolerances.find(suite);
    return it == suite_tolerances.end() ? tolerances : it->second;
  }

  /// Deformation parameter a used by the warped suite.
  double deformation_a() const {
    if (deformation) return *deformation;
    return model.family() == ScatteringFamily::SinhExp ? model.a() : 1.0;
  }
};

inline const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> names{"scattering", "zf_algebra",      "norms",  "contractions",
                                              "symmetry",   "dual_basis",      "expansion", "transformations",
                                              "warped",     "nested"};
  return names;
}

inline int default_instances(const std::string& suite) {
  static const std::map<std::string, int> d{{"scattering", 1},  {"zf_algebra", 20}, {"norms", 200},
                                            {"contractions", 1}, {"symmetry", 10},  {"dual_basis", 50},
                                            {"expansion", 50},  {"transformations", 50}, {"warped", 10},
                                            {"nested", 20}};
  return d.at(suite);
}

namespace detail {

inline void read_tolerances(const json& j, Tolerances& t, const std::string& where, std::vector<std::string>& errors) {
  auto field = [&](const char* key, double& target) {
    if (!j.contains(key)) return;
    if (!j[key].is_number() || !(j[key].get<double>() > 0.0))
      errors.push_back(where + "." + key + " must be a positive number");
    else
      target = j[key].get<double>();
  };
  field("exact", t.exact);
  field("equality", t.equality);
  field("inequality_slack", t.slack);
}

}  // namespace detail

/// Validates a configuration document, collecting every violation before failing.
inline RunConfig parse_config(const json& j) {
  std::vector<std::string> errors;
  RunConfig c;
  if (!j.is_object()) throw ConfigError({"configuration must be a JSON object"});

  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (g.is_array()) {
      c.grid.clear();
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g[i].is_number()) {
          errors.push_back("grid point at index " + std::to_string(i) + " is not a number");
          continue;
        }
        c.grid.push_back(g[i].get<double>());
      }
    } else if (g.is_object() && g.contains("count") && g.contains("start") && g.contains("stop")) {
      const int count = g["count"].get<int>();
      const double a = g["start"].get<double>(), b = g["stop"].get<double>();
      c.grid.clear();
      if (count < 1) errors.push_back("grid.count must be >= 1");
      for (int i = 0; i < count; ++i) c.grid.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
    } else {
      errors.push_back("grid must be an array of rapidities or {count, start, stop}");
    }
  }
  if (c.grid.empty()) errors.push_back("grid must contain at least one point");
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    if (!std::isfinite(c.grid[i])) errors.push_back("grid point at index " + std::to_string(i) + " is not finite");
    for (std::size_t k = 0; k < i; ++k)
      if (c.grid[k] == c.grid[i]) {
        errors.push_back("duplicate grid point at index " + std::to_string(i) + " (same as index " + std::to_string(k) +
                         ")");
        break;
      }
    if (i > 0 && c.grid[i] < c.grid[i - 1])
      errors.push_back("grid point at index " + std::to_string(i) + " is smaller than its predecessor");
  }

  if (j.contains("mass")) {
    if (!j["mass"].is_number() || !(j["mass"].get<double>() > 0.0))
      errors.push_back("mass must be a positive number");
    else
      c.mass = j["mass"].get<double>();
  }
  if (j.contains("truncation")) {
    if (!j["truncation"].is_number_integer())
      errors.push_back("truncation must be an integer");
    else if (j["truncation"].get<int>() < 0)
      errors.push_back("truncation K must be >= 0, got " + std::to_string(j["truncation"].get<int>()));
    else
      c.truncation = j["truncation"].get<int>();
  }
  if (j.contains("scattering")) {
    try {
      c.model = scattering_from_json(j["scattering"], false);
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }
  if (j.contains("omega")) {
    const json& w = j["omega"];
    const std::string fam = w.value("family", "zero");
    const double alpha = w.value("alpha", 0.0);
    try {
      if (fam == "zero")
        c.omega = Indicatrix::zero();
      else if (fam == "sqrt")
        c.omega = Indicatrix::sqrt(alpha);
      else if (fam == "log")
        c.omega = Indicatrix::log(alpha);
      else
        errors.push_back("unknown omega family \"" + fam + "\"; supported: zero, sqrt, log");
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer())
      errors.push_back("seed must be an integer");
    else
      c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("deformation")) {
    const json& d = j["deformation"];
    if (!d.is_object() || !d.contains("a") || !d["a"].is_number() || !std::isfinite(d["a"].get<double>()))
      errors.push_back("deformation must be {\"a\": <finite number>}");
    else
      c.deformation = d["a"].get<double>();
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    detail::read_tolerances(t, c.tolerances, "tolerances", errors);
    if (t.contains("suites")) {
      for (auto& [name, body] : t["suites"].items()) {
        if (std::find(all_suites().begin(), all_suites().end(), name) == all_suites().end()) {
          errors.push_back("tolerance override for unknown suite \"" + name + "\"");
          continue;
        }
        Tolerances tt = c.tolerances;
        detail::read_tolerances(body, tt, "tolerances.suites." + name, errors);
        c.suite_tolerances[name] = tt;
      }
    }
  }
  auto suite_list = [&] {
    std::string s;
    for (const auto& n : all_suites()) s += (s.empty() ? "" : ", ") + n;
    return s;
  };
  if (j.contains("suites")) {
    for (const auto& s : j["suites"]) {
      const std::string name = s.is_string() ? s.get<std::string>() : s.dump();
      if (std::find(all_suites().begin(), all_suites().end(), name) == all_suites().end())
        errors.push_back("unknown suite \"" + name + "\"; supported: " + suite_list());
      else if (std::find(c.suites.begin(), c.suites.end(), name) == c.suites.end())
        c.suites.push_back(name);
    }
  }
  if (c.suites.empty() && !j.contains("suites")) c.suites = all_suites();
  if (j.contains("instances")) {
    for (auto& [name, v] : j["instances"].items()) {
      if (std::find(all_suites().begin(), all_suites().end(), name) == all_suites().end())
        errors.push_back("instance count for unknown suite \"" + name + "\"");
      else if (!v.is_number_integer() || v.get<int>() < 1)
        errors.push_back("instances." + name + " must be a positive integer");
      else
        c.instances[name] = v.get<int>();
    }
  }
  if (errors.empty() && c.model.family() == ScatteringFamily::Tabulated) {
    for (std::size_t a = 0; a < c.grid.size() && errors.empty(); ++a)
      for (std::size_t b = 0; b < c.grid.size(); ++b) {
        try {
          (void)c.model(c.grid[a] - c.grid[b]);
        } catch (const InputError& e) {
          errors.push_back(std::string(e.what()) + " (needed for grid points " + std::to_string(a) + ", " +
                           std::to_string(b) + ")");
          break;
        }
      }
  }
  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  return parse_config(j);
}

inline RunConfig parse_config(const char* text) { return parse_config(std::string(text)); }

enum class CheckStatus { Pass, Fail, Skip };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
  }
  return "?";
}

struct CheckRecord {
  std::string suite;
  std::string anchor;
  CheckStatus status = CheckStatus::Pass;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct Report {
  std::vector<CheckRecord> checks;
  std::vector<std::string> warnings;

  bool passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.status == CheckStatus::Fail; });
  }
  std::size_t count(CheckStatus s) const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [&](const CheckRecord& c) { return c.status == s; }));
  }
};

// Collects the records of one suite.
class SuiteRecorder {
 public:
  SuiteRecorder(std::string suite, Tolerances tol) : suite_(std::move(suite)), tol_(tol) {}

  const Tolerances& tolerances() const { return tol_; }

  void exact(const std::string& anchor, double residual) { add(anchor, residual, tol_.exact); }
  void equality(const std::string& anchor, double residual) { add(anchor, residual, tol_.equality); }
  /// `ratio` is the worst lhs / rhs over the instances.
  void bound(const std::string& anchor, double ratio) { add(anchor, ratio, 1.0 + tol_.slack); }

  void skip(const std::string& anchor, const std::string& note) {
    records_.push_back({suite_, anchor, CheckStatus::Skip, 0.0, 0.0, note});
  }

  /// Runs fn; an exception counts as a failure with infinite residual.
  template <class Fn>
  void guarded(const std::string& anchor, double tol, Fn&& fn) {
    try {
      add(anchor, fn(), tol);
    } catch (const ResourceError&) {
      throw;
    } catch (const std::exception& e) {
      records_.push_back({suite_, anchor, CheckStatus::Fail, std::numeric_limits<double>::infinity(), tol, e.what()});
    }
  }

  std::vector<CheckRecord> take() { return std::move(records_); }

 private:
  void add(const std::string& anchor, double residual, double tol) {
    const bool ok = residual <= tol;  // NaN fails
    records_.push_back({suite_, anchor, ok ? CheckStatus::Pass : CheckStatus::Fail, residual, tol, {}});
  }

  std::string suite_;
  Tolerances tol_;
  std::vector<CheckRecord> records_;
};

namespace detail {

// max |a - b| over many pairs, divided by the largest entry seen on either side.
class RelativeTracker {
 public:
  template <class A, class B>
  void add(const A& a, const B& b) {
    const CMatrix ca = a, cb = b;
    diff_ = std::max(diff_, max_abs(CMatrix(ca - cb)));
    scale_ = std::max({scale_, max_abs(ca), max_abs(cb)});
  }
  void add_scale(double s) { scale_ = std::max(scale_, s); }
  double value() const { return scale_ == 0.0 ? diff_ : diff_ / scale_; }

 private:
  double diff_ = 0.0;
  double scale_ = 0.0;
};

// Worst lhs / rhs; a vanishing right-hand side only tolerates a vanishing left.
class RatioTracker {
 public:
  void add(double lhs, double rhs) {
    double r;
    if (rhs > 0.0)
      r = lhs / rhs;
    else
      r = lhs <= 1e-14 ? 0.0 : std::numeric_limits<double>::infinity();
    worst_ = std::max(worst_, r);
  }
  double value() const { return worst_; }

 private:
  double worst_ = 0.0;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline CVector kernel_values(const std::map<std::pair<int, int>, KernelTensor>& fam, int m, int n) {
  return fam.at({m, n}).values;
}

struct SuiteContext {
  const RunConfig& config;
  const FockSpace& space;
  std::string suite;
  int instances;
  SuiteRecorder rec;

  std::mt19937_64 rng(std::uint64_t index) const { return keyed_rng(config.seed, suite, index); }
  int K() const { return space.truncation(); }
  int N() const { return space.grid_size(); }
};

// ---------------------------------------------------------------- scattering

inline void suite_scattering(SuiteContext& ctx) {
  const ScatteringModel& S = ctx.config.model;
  const auto& pts = ctx.space.grid().points();
  std::vector<double> samples;
  for (double a : pts)
    for (double b : pts) samples.push_back(a - b);
  if (S.family() == ScatteringFamily::Tabulated) {
    for (const auto& e : S.table()) samples.push_back(e.theta);
  } else {
    auto rng = ctx.rng(0);
    for (int i = 0; i < 64; ++i) samples.push_back(uniform(rng, -4.0, 4.0));
  }
  const double tol = ctx.rec.tolerances().exact;

  ctx.rec.guarded("unitarity |S(t)| = 1", tol, [&] {
    double r = 0.0;
    for (double t : samples) r = std::max(r, std::abs(std::abs(S(t)) - 1.0));
    return r;
  });
  ctx.rec.guarded("hermitian analyticity S(-t) = conj S(t)", tol, [&] {
    double r = 0.0;
    for (double t : samples) r = std::max(r, std::abs(S(-t) - std::conj(S(t))));
    return r;
  });
  ctx.rec.guarded("inverse S(t) S(-t) = 1", tol, [&] {
    double r = 0.0;
    for (double t : samples) r = std::max(r, std::abs(S(t) * S(-t) - 1.0));
    return r;
  });

  ctx.rec.guarded("composition law S^(sigma rho) = S^sigma S^rho(theta^sigma), all of S_4", tol, [&] {
    const ScatteringTable& T = ctx.space.table();
    const int N = ctx.N();
    double r = 0.0;
    for (int n = 1; n <= 4; ++n) {
      const auto perms = all_permutations(n);
      std::vector<int> idx(n);
      for (std::int64_t flat = 0; flat < ipow(N, n); ++flat) {
        decode_tuple(flat, N, idx);
        for (const auto& sigma : perms) {
          const cplx ss = s_sigma(T, sigma, idx);
          const auto moved = sigma.permute<int>(idx);
          for (const auto& rho : perms)
            r = std::max(r, std::abs(s_sigma(T, sigma.compose(rho), idx) - ss * s_sigma(T, rho, moved)));
        }
      }
    }
    return r;
  });

  ctx.rec.guarded("representation property D(sigma) D(rho) = D(sigma rho)", tol, [&] {
    auto rng = ctx.rng(1);
    const int n = std::min(3, std::max(1, ctx.K()));
    const KernelTensor f = random_kernel(rng, n, 0, ctx.N());
    RelativeTracker t;
    const auto perms = all_permutations(n);
    for (const auto& sigma : perms)
      for (const auto& rho : perms)
        t.add(act_d(ctx.space.table(), sigma, act_d(ctx.space.table(), rho, f)).values,
              act_d(ctx.space.table(), sigma.compose(rho), f).values);
    return t.value();
  });

  ctx.rec.guarded("S-symmetrizer is an orthogonal projection", tol, [&] {
    double r = 0.0;
    for (int n = 0; n <= ctx.K(); ++n) {
      const CMatrix& P = ctx.space.projector(n);
      r = std::max({r, max_abs(CMatrix(P * P - P)), max_abs(CMatrix(P.adjoint() - P))});
    }
    return r;
  });

  ctx.rec.guarded("Sym_S in theta of delta(theta - theta') equals Sym_S^-1 in theta'", tol, [&] {
    const ScatteringTable inv(S.inverse(), pts);
    const int N = ctx.N();
    double r = 0.0;
    for (int n = 1; n <= std::min(3, std::max(1, ctx.K())); ++n) {
      KernelTensor delta(n, n, N);
      for (std::int64_t t = 0; t < ipow(N, n); ++t) delta.values(t * ipow(N, n) + t) = 1.0;
      std::vector<int> first(n), second(n);
      std::iota(first.begin(), first.end(), 1);
      std::iota(second.begin(), second.end(), n + 1);
      const KernelTensor lhs = symmetrize(ctx.space.table(), delta, first);
      const KernelTensor rhs = symmetrize(inv, delta, second);
      r = std::max(r, max_abs(CVector(lhs.values - rhs.values)));
    }
    return r;
  });
}

// ---------------------------------------------------------------- zf_algebra

inline void suite_zf_algebra(SuiteContext& ctx) {
  const Realization r = realization(ctx.space);
  const ScatteringTable& T = ctx.space.table();
  const int N = ctx.N(), K = ctx.K();
  const double tol = ctx.rec.tolerances().exact;
  std::vector<QuadraticForm> ann;
  for (int i = 0; i < N; ++i) ann.push_back(r.annihilator(i));

  ctx.rec.guarded("exchange relation z+(t) z+(t') = S(t - t') z+(t') z+(t)", tol, [&] {
    RelativeTracker t;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        t.add((r.creator(i) * r.creator(j)).matrix, T(i, j) * (r.creator(j) * r.creator(i)).matrix);
    return t.value();
  });
  ctx.rec.guarded("exchange relation z(e) z(e') = S(e - e') z(e') z(e)", tol, [&] {
    RelativeTracker t;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) t.add((ann[i] * ann[j]).matrix, T(i, j) * (ann[j] * ann[i]).matrix);
    return t.value();
  });
  ctx.rec.guarded("exchange relation z(e) z+(t) = S(t - e) z+(t) z(e) + delta(t - e), input sectors < K", tol, [&] {
    RelativeTracker t;
    const QuadraticForm one = identity_form(ctx.space);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        QuadraticForm rhs = r.creator(i) * ann[j];
        rhs *= T(i, j);
        if (i == j) rhs += one;
        t.add(restrict_input(ann[j] * r.creator(i), K - 1).matrix, restrict_input(rhs, K - 1).matrix);
      }
    return t.value();
  });

  ctx.rec.guarded("z(f) is the adjoint of z+(conj f)", tol, [&] {
    RelativeTracker t;
    for (int k = 0; k < ctx.instances; ++k) {
      auto rng = ctx.rng(static_cast<std::uint64_t>(k));
      const CVector f = random_vector(rng, N);
      const FockState psi = random_state(rng, ctx.space), chi = random_state(rng, ctx.space);
      const cplx lhs = inner(chi, create(ctx.space, f, psi).value);
      const cplx rhs = inner(annihilate(ctx.space, f.conjugate(), chi), psi);
      t.add(CMatrix::Constant(1, 1, lhs), CMatrix::Constant(1, 1, rhs));
    }
    return t.value();
  });

  const int order = std::min(K, 3);
  ctx.rec.guarded("multilinear z+^m z^n(f) agrees with products of z+ and z", tol, [&] {
    RelativeTracker t;
    std::uint64_t k = 1000;
    for (int m = 0; m <= order; ++m)
      for (int n = 0; n + m <= order; ++n) {
        auto rng = ctx.rng(k++);
        const KernelTensor f = random_kernel(rng, m, n, N);
        t.add(zmzn_form(ctx.space, f).matrix, monomial_form(r, f).matrix);
      }
    return t.value();
  });
  ctx.rec.guarded("adjoint (z+^m z^n(f))* = z+^n z^m(f*)", tol, [&] {
    RelativeTracker t;
    std::uint64_t k = 2000;
    for (int m = 0; m <= K; ++m)
      for (int n = 0; n <= K; ++n) {
        auto rng = ctx.rng(k++);
        const KernelTensor f = random_kernel(rng, m, n, N);
        t.add(zmzn_form(ctx.space, f).adjoint().matrix, zmzn_form(ctx.space, kernel_adjoint(f)).matrix);
      }
    return t.value();
  });
  ctx.rec.guarded("z+^m z^n(f) vanishes off the S-symmetric subspace", tol, [&] {
    RelativeTracker t;
    const CMatrix P = ctx.space.full_projector();
    std::uint64_t k = 3000;
    for (int m = 0; m <= K; ++m)
      for (int n = 0; n <= K; ++n) {
        auto rng = ctx.rng(k++);
        const CMatrix a = zmzn_form(ctx.space, random_kernel(rng, m, n, N)).matrix;
        t.add(a, P * a * P);
      }
    return t.value();
  });
}

// ---------------------------------------------------------------- norms

inline void suite_norms(SuiteContext& ctx) {
  const int N = ctx.N(), K = ctx.K();
  const auto& grid = ctx.space.grid();
  const Indicatrix& w = ctx.config.omega;
  const FockLayout& L = ctx.space.layout();
  const Eigen::VectorXd up = omega_weights(grid, L, w, 1), down = omega_weights(grid, L, w, -1);
  auto sector_weight = [&](const Eigen::VectorXd& v, int n) -> CMatrix {
    return v.segment(L.offset(n), L.sector_dim(n)).cast<cplx>().asDiagonal();
  };
  const int instances = ctx.instances;
  auto rng_for = [&](int anchor, int i) { return ctx.rng(static_cast<std::uint64_t>(anchor) * 100000 + i); };

  if (K >= 1) {
    ctx.rec.guarded("energy-weighted creator bound sqrt(n+1) ||f||^omega_2", 1.0 + ctx.rec.tolerances().slack, [&] {
      RatioTracker t;
      for (int i = 0; i < instances; ++i) {
        auto rng = rng_for(1, i);
        const int n = uniform_int(rng, 0, K - 1);
        const CVector f = random_vector(rng, N);
        const CMatrix op = sector_weight(up, n + 1) * creator_form(ctx.space, f).block(n + 1, n) *
                           sector_weight(down, n) * ctx.space.projector(n);
        t.add(operator_norm(op), std::sqrt(n + 1.0) * omega_l2_norm(f, grid, 1, w));
      }
      return t.value();
    });
    ctx.rec.guarded("energy-weighted annihilator bound sqrt(n) ||f||^omega_2", 1.0 + ctx.rec.tolerances().slack, [&] {
      RatioTracker t;
      for (int i = 0; i < instances; ++i) {
        auto rng = rng_for(2, i);
        const int n = uniform_int(rng, 1, K);
        const CVector f = random_vector(rng, N);
        const CMatrix op = sector_weight(up, n - 1) * annihilator_form(ctx.space, f).block(n - 1, n) *
                           sector_weight(down, n) * ctx.space.projector(n);
        t.add(operator_norm(op), std::sqrt(static_cast<double>(n)) * omega_l2_norm(f, grid, 1, w));
      }
      return t.value();
    });
  } else {
    ctx.rec.skip("energy-weighted creator bound sqrt(n+1) ||f||^omega_2", "needs K >= 1");
    ctx.rec.skip("energy-weighted annihilator bound sqrt(n) ||f||^omega_2", "needs K >= 1");
  }

  ctx.rec.guarded("sector bound of z+^m z^n(f) e^-omega P_k by the cross norm", 1.0 + ctx.rec.tolerances().slack, [&] {
    RatioTracker t;
    for (int i = 0; i < instances; ++i) {
      auto rng = rng_for(3, i);
      const int m = uniform_int(rng, 0, K), n = uniform_int(rng, 0, K);
      const int kmin = n, kmax = std::min(K, K + n - m);
      if (kmin > kmax) {
        --i;
        continue;
      }
      const int k = uniform_int(rng, kmin, kmax);
      const KernelTensor f = random_kernel(rng, m, n, N);
      const CMatrix op =
          zmzn_form(ctx.space, f).block(k - n + m, k) * sector_weight(down, k) * ctx.space.projector(k);
      const double c = 2.0 * std::sqrt(factorial(k) * factorial(k - n + m)) / factorial(k - n);
      t.add(operator_norm(op), c * cross_norm(f, grid, w));
    }
    return t.value();
  });

  ctx.rec.guarded("form norm ||z+^m z^n(f)||^omega_k <= 2 k!/(k - max(m,n))! ||f||^omega", 1.0 + ctx.rec.tolerances().slack,
                  [&] {
                    RatioTracker t;
                    for (int i = 0; i < instances; ++i) {
                      auto rng = rng_for(4, i);
                      const int m = uniform_int(rng, 0, K), n = uniform_int(rng, 0, K);
                      const int k = uniform_int(rng, std::max(m, n), K);
                      const KernelTensor f = random_kernel(rng, m, n, N);
                      const double c = 2.0 * factorial(k) / factorial(k - std::max(m, n));
                      t.add(qform_norm(ctx.space, zmzn_form(ctx.space, f), k, w), c * cross_norm(f, grid, w));
                    }
                    return t.value();
                  });

  const int rank_cap = std::min(4, 2 * std::max(1, K));
  ctx.rec.guarded("cross norm absorbs bounded factors f_L(theta) f f_R(eta)", 1.0 + ctx.rec.tolerances().slack, [&] {
    RatioTracker t;
    for (int i = 0; i < instances; ++i) {
      auto rng = rng_for(5, i);
      const int m = uniform_int(rng, 0, rank_cap / 2), n = uniform_int(rng, 0, rank_cap / 2);
      const KernelTensor f = random_kernel(rng, m, n, N);
      const CVector fl = random_vector(rng, ipow(N, m)), fr = random_vector(rng, ipow(N, n));
      const CMatrix g = fl.asDiagonal() * f.as_matrix() * fr.asDiagonal();
      t.add(cross_norm(KernelTensor::from_matrix(m, n, N, g), grid, w),
            max_abs(fl) * cross_norm(f, grid, w) * max_abs(fr));
    }
    return t.value();
  });

  ctx.rec.guarded("cross norm of a product in independent variables", 1.0 + ctx.rec.tolerances().slack, [&] {
    RatioTracker t;
    for (int i = 0; i < instances; ++i) {
      auto rng = rng_for(6, i);
      const int m = uniform_int(rng, 0, 1), n = uniform_int(rng, 0, 1);
      const int mp = uniform_int(rng, 0, 1), np = uniform_int(rng, 0, 1);
      const KernelTensor f = random_kernel(rng, m, n, N), fp = random_kernel(rng, mp, np, N);
      // variables ordered (theta, theta', eta, eta')
      KernelTensor g(m + mp, n + np, N);
      std::vector<int> idx(m + mp + n + np), a(m + n), b(mp + np);
      for (Eigen::Index flat = 0; flat < g.values.size(); ++flat) {
        decode_tuple(flat, N, idx);
        for (int s = 0; s < m; ++s) a[s] = idx[s];
        for (int s = 0; s < mp; ++s) b[s] = idx[m + s];
        for (int s = 0; s < n; ++s) a[m + s] = idx[m + mp + s];
        for (int s = 0; s < np; ++s) b[mp + s] = idx[m + mp + n + s];
        g.values(flat) = f.at(a) * fp.at(b);
      }
      t.add(cross_norm(g, grid, w), cross_norm(f, grid, w) * cross_norm_plain(fp));
    }
    return t.value();
  });

  ctx.rec.guarded("cross norm below the weighted L2 norms", 1.0 + ctx.rec.tolerances().slack, [&] {
    RatioTracker t;
    for (int i = 0; i < instances; ++i) {
      auto rng = rng_for(7, i);
      const int m = uniform_int(rng, 0, rank_cap / 2), n = uniform_int(rng, 0, rank_cap / 2);
      const KernelTensor f = random_kernel(rng, m, n, N);
      const Eigen::VectorXd dl = tuple_damping(grid, m, w), dr = tuple_damping(grid, n, w);
      const CMatrix mat = f.as_matrix();
      const double rhs = 0.5 * (dl.cast<cplx>().asDiagonal() * mat).norm() +
                         0.5 * (mat * dr.cast<cplx>().asDiagonal()).norm();
      t.add(cross_norm(f, grid, w), rhs);
    }
    return t.value();
  });

  ctx.rec.guarded("coefficient bound ||f_mn[A]||^omega <= c_mn ||A||^omega_(m+n)", 1.0 + ctx.rec.tolerances().slack, [&] {
    RatioTracker t;
    const Realization r = realization(ctx.space);
    for (int i = 0; i < instances; ++i) {
      auto rng = rng_for(8, i);
      const int m = uniform_int(rng, 0, K);
      const int n = uniform_int(rng, 0, K - m);
      const QuadraticForm a = random_form(rng, ctx.space);
      const KernelTensor f = fmn_coefficients(r, a, m, n);
      t.add(cross_norm(f, grid, w), fmn_bound_constant(m, n) * qform_norm(ctx.space, a, m + n, w));
    }
    return t.value();
  });

  ctx.rec.guarded("contracted vector bound ||e^omega L_C(f)|| <= sqrt((m-|C|)!) ||f||^omega_2", 1.0 + ctx.rec.tolerances().slack,
                  [&] {
                    RatioTracker t;
                    CoefficientExtractor ex(realization(ctx.space), zero_form(ctx.space));
                    for (int i = 0; i < instances; ++i) {
                      auto rng = rng_for(9, i);
                      const int m = uniform_int(rng, 0, K), n = uniform_int(rng, 0, K);
                      const auto cs = enumerate_contractions(m, n);
                      const Contraction& c = cs[uniform_int(rng, 0, static_cast<int>(cs.size()) - 1)];
                      const int a = m - c.length();
                      const CVector f = random_vector(rng, ipow(N, a));
                      const CVector v = ex.left_vectors(a) * f;
                      const double lhs = sector_weight(up, a).diagonal().cwiseProduct(v).norm();
                      t.add(lhs, std::sqrt(factorial(a)) * omega_l2_norm(f, grid, a, w));
                    }
                    return t.value();
                  });
}

// ---------------------------------------------------------------- contractions

inline void suite_contractions(SuiteContext& ctx) {
  const ScatteringTable& T = ctx.space.table();
  const int N = ctx.N();
  const int cap = std::min(3, std::max(0, ctx.K()) == 0 ? 3 : 3);
  const double tol = ctx.rec.tolerances().exact;

  auto for_each_tuple = [&](int m, int n, auto&& fn) {
    std::vector<int> th(m), et(n);
    for (std::int64_t a = 0; a < ipow(N, m); ++a) {
      decode_tuple(a, N, th);
      for (std::int64_t b = 0; b < ipow(N, n); ++b) {
        decode_tuple(b, N, et);
        fn(std::span<const int>(th), std::span<const int>(et));
      }
    }
  };

  ctx.rec.guarded("number of contractions sum_k C(m,k) C(n,k) k!", tol, [&] {
    double bad = 0.0;
    for (int m = 0; m <= cap; ++m)
      for (int n = 0; n <= cap; ++n) {
        const auto cs = enumerate_contractions(m, n);
        std::set<std::string> seen;
        for (const auto& c : cs) seen.insert(c.to_string());
        if (static_cast<std::int64_t>(cs.size()) != contraction_count(m, n) || seen.size() != cs.size()) bad = 1.0;
      }
    return bad;
  });

  ctx.rec.guarded("S_C factorizes as S^sigma(theta) S^rho(eta) on the support of delta_C", tol, [&] {
    double r = 0.0;
    for (int m = 0; m <= cap; ++m)
      for (int n = 0; n <= cap; ++n)
        for (const auto& c : enumerate_contractions(m, n)) {
          const auto [sigma, rho] = sigma_rho(c);
          for_each_tuple(m, n, [&](auto th, auto et) {
            if (!delta_pairs(c, th, et)) return;
            r = std::max(r, std::abs(s_c_factor(T, c, th, et) - s_sigma(T, sigma, th) * s_sigma(T, rho, et)));
          });
        }
    return r;
  });

  ctx.rec.guarded("composition delta_C delta_C' S_C S_C' = delta_(C u C') S_(C u C')", tol, [&] {
    double r = 0.0;
    for (int m = 0; m <= cap; ++m)
      for (int n = 0; n <= cap; ++n)
        for (const auto& c : enumerate_contractions(m, n))
          for (const auto& cp : enumerate_contractions(m - c.length(), n - c.length())) {
            const Contraction d = compose(c, cp);
            for_each_tuple(m, n, [&](auto th, auto et) {
              const auto [tf, ef] = free_arguments(c, th, et);
              const cplx lhs = static_cast<double>(delta_pairs(c, th, et) * delta_pairs(cp, tf, ef)) *
                               s_c_factor(T, c, th, et) * s_c_factor(T, cp, tf, ef);
              const cplx rhs = static_cast<double>(delta_pairs(d, th, et)) * s_c_factor(T, d, th, et);
              r = std::max(r, std::abs(lhs - rhs));
            });
          }
    return r;
  });

  ctx.rec.guarded("reflected contractions: delta S R of C^J against (-1)^|C| delta S R of C", tol, [&] {
    double r = 0.0;
    for (int m = 0; m <= cap; ++m)
      for (int n = 0; n <= cap; ++n)
        for (const auto& c : enumerate_contractions(m, n)) {
          const Contraction cj = reflect_contraction(c);
          const double sign = c.length() % 2 == 0 ? 1.0 : -1.0;
          for_each_tuple(n, m, [&](auto th, auto et) {
            const cplx lhs = static_cast<double>(delta_pairs(cj, th, et)) * s_c_factor(T, cj, th, et) *
                             r_c_factor(T, cj, th, et);
            const cplx rhs =
                sign * static_cast<double>(delta_pairs(c, et, th)) * s_c_factor(T, c, et, th) * r_c_factor(T, c, et, th);
            r = std::max(r, std::abs(lhs - rhs));
          });
          if (!(reflect_contraction(cj) == c)) r = std::max(r, 1.0);
        }
    return r;
  });

  ctx.rec.guarded("binomial cancellation sum over D = C u C' of (-1)^|C'|", tol, [&] {
    double r = 0.0;
    for (int m = 0; m <= cap; ++m)
      for (int n = 0; n <= cap; ++n) {
        std::map<std::string, std::pair<int, int>> tally;  // D -> (signed sum, count)
        for (const auto& c : enumerate_contractions(m, n))
          for (const auto& cp : enumerate_contractions(m - c.length(), n - c.length())) {
            auto& e = tally[compose(c, cp).to_string()];
            e.first += cp.length() % 2 == 0 ? 1 : -1;
            e.second += 1;
          }
        for (const auto& d : enumerate_contractions(m, n)) {
          const auto& e = tally[d.to_string()];
          const int expected = d.length() == 0 ? 1 : 0;
          r = std::max(r, static_cast<double>(std::abs(e.first - expected)));
          r = std::max(r, static_cast<double>(std::abs(e.second - (1 << d.length()))));
          for (std::uint32_t mask = 0; mask < (1u << d.length()); ++mask) {
            const auto [c, cp] = split(d, mask);
            if (!(compose(c, cp) == d)) r = std::max(r, 1.0);
          }
        }
      }
    return r;
  });
}

// ---------------------------------------------------------------- symmetry

inline void suite_symmetry(SuiteContext& ctx) {
  const ScatteringTable& T = ctx.space.table();
  const int K = ctx.K();
  ctx.rec.guarded("extracted coefficients are S-symmetric in theta and in eta", ctx.rec.tolerances().exact, [&] {
    RelativeTracker t;
    const Realization r = realization(ctx.space);
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(static_cast<std::uint64_t>(i));
      CoefficientExtractor ex(r, random_form(rng, ctx.space));
      for (int m = 0; m <= K; ++m)
        for (int n = 0; n <= K && m + n <= 4; ++n) {
          const KernelTensor f = ex.fmn(m, n);
          auto check = [&](int a, int b) {
            t.add(act_d(T, Permutation::transposition(m + n, a + 1, b + 1), f).values, f.values);
          };
          for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) check(a, b);
          for (int a = m; a < m + n; ++a)
            for (int b = a + 1; b < m + n; ++b) check(a, b);
          t.add_scale(max_abs(f.values));
        }
    }
    return t.value();
  });
}

// ---------------------------------------------------------------- dual_basis

inline void suite_dual_basis(SuiteContext& ctx) {
  const int K = ctx.K(), N = ctx.N();
  const Realization r = realization(ctx.space);
  const double tol = ctx.rec.tolerances().equality;

  ctx.rec.guarded("dual basis f_mn[z+^m' z^n'(g)] = delta m! n! Sym Sym g", tol, [&] {
    double worst = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(static_cast<std::uint64_t>(i));
      const int mp = uniform_int(rng, 0, K), np = uniform_int(rng, 0, K);
      const KernelTensor g = random_kernel(rng, mp, np, N);
      const CoefficientFamily fam = expand(r, zmzn_form(ctx.space, g));
      RelativeTracker t;
      for (int m = 0; m <= K; ++m)
        for (int n = 0; n <= K; ++n) {
          CVector expected = CVector::Zero(fam.at(m, n).values.size());
          if (m == mp && n == np)
            expected = factorial(m) * factorial(n) * symmetrize_split(ctx.space.table(), g).values;
          t.add(fam.at(m, n).values, expected);
        }
      worst = std::max(worst, t.value());
    }
    return worst;
  });

  ctx.rec.guarded("inversion <theta|A eta> = sum_C delta_C S_C f_(m-|C|,n-|C|)", tol, [&] {
    double worst = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(100000 + static_cast<std::uint64_t>(i));
      const QuadraticForm a = random_form(rng, ctx.space);
      CoefficientExtractor ex(r, a);
      double diff = 0.0, scale = 0.0;
      for (int m = 0; m <= K; ++m)
        for (int n = 0; n <= K; ++n) {
          diff = std::max(diff, inversion_check(r, a, m, n));
          scale = std::max(scale, max_abs(ex.elements(m, n)));
        }
      worst = std::max(worst, scale == 0.0 ? diff : diff / scale);
    }
    return worst;
  });
}

// ---------------------------------------------------------------- expansion

inline void suite_expansion(SuiteContext& ctx) {
  const int K = ctx.K(), N = ctx.N();
  const Realization r = realization(ctx.space);
  const double tol = ctx.rec.tolerances().equality;

  ctx.rec.guarded("expansion roundtrip sum 1/(m! n!) z+^m z^n(f_mn[A]) = A", tol, [&] {
    double worst = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(static_cast<std::uint64_t>(i));
      const QuadraticForm a = random_form(rng, ctx.space);
      worst = std::max(worst, relative_residual(reconstruct(ctx.space, expand(r, a)).matrix, a.matrix));
    }
    return worst;
  });

  ctx.rec.guarded("uniqueness f_mn[sum 1/(m! n!) z+^m z^n(g_mn)] = Sym Sym g_mn", tol, [&] {
    double worst = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(100000 + static_cast<std::uint64_t>(i));
      CoefficientFamily g(ctx.space.grid(), K);
      for (int m = 0; m <= K; ++m)
        for (int n = 0; n <= K; ++n) g.at(m, n) = random_kernel(rng, m, n, N);
      const CoefficientFamily back = expand(r, reconstruct(ctx.space, g));
      const CoefficientFamily sym = symmetrize_family(ctx.space.table(), g);
      RelativeTracker t;
      for (std::size_t e = 0; e < g.entries.size(); ++e) t.add(back.entries[e].values, sym.entries[e].values);
      worst = std::max(worst, t.value());
    }
    return worst;
  });
}

// ---------------------------------------------------------------- transformations

inline double family_residual(const CoefficientFamily& a, const CoefficientFamily& b) {
  if (!(a.grid == b.grid) || a.truncation != b.truncation) return std::numeric_limits<double>::infinity();
  RelativeTracker t;
  for (std::size_t e = 0; e < a.entries.size(); ++e) t.add(a.entries[e].values, b.entries[e].values);
  return t.value();
}

inline void suite_transformations(SuiteContext& ctx) {
  const int K = ctx.K();
  const double tol = ctx.rec.tolerances().equality;

  ctx.rec.guarded("translations multiply f_mn by exp(i (p(theta) - p(eta)).x)", tol, [&] {
    double worst = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(static_cast<std::uint64_t>(i));
      const QuadraticForm a = random_form(rng, ctx.space);
      const Vec2 x(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0));
      const auto [moved, b] = transform_form_poincare(ctx.space, a, x, 0.0);
      worst = std::max(worst, family_residual(expand(moved, b), transform_coeffs_poincare(expand(ctx.space, a), x, 0.0)));
    }
    return worst;
  });

  ctx.rec.guarded("boosts carry f_mn to the shifted grid unchanged", tol, [&] {
    double worst = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(100000 + static_cast<std::uint64_t>(i));
      const QuadraticForm a = random_form(rng, ctx.space);
      const Vec2 x(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0));
      const double lambda = uniform(rng, -1.0, 1.0);
      const auto [moved, b] = transform_form_poincare(ctx.space, a, x, lambda);
      worst = std::max(worst,
                       family_residual(expand(moved, b), transform_coeffs_poincare(expand(ctx.space, a), x, lambda)));
    }
    return worst;
  });

  ctx.rec.guarded("reflected coefficients f_mn[J A* J] from f[A] with R_C", tol, [&] {
    double worst = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(200000 + static_cast<std::uint64_t>(i));
      const QuadraticForm a = random_form(rng, ctx.space);
      const CoefficientFamily fam = expand(ctx.space, a);
      const CoefficientFamily direct = expand(ctx.space, reflect_form(a));
      RelativeTracker t;
      for (int m = 0; m <= K; ++m)
        for (int n = 0; n <= K; ++n)
          t.add(direct.at(m, n).values, reflected_coeffs(fam, ctx.space.table(), m, n).values);
      worst = std::max(worst, t.value());
    }
    return worst;
  });

  ctx.rec.guarded("reflection <psi, J A* J chi> = <J chi, A J psi>", ctx.rec.tolerances().exact, [&] {
    RelativeTracker t;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(300000 + static_cast<std::uint64_t>(i));
      const QuadraticForm a = random_form(rng, ctx.space);
      const FockState psi = random_state(rng, ctx.space), chi = random_state(rng, ctx.space);
      t.add(CMatrix::Constant(1, 1, reflect_form(a)(psi, chi)), CMatrix::Constant(1, 1, a(reflect(chi), reflect(psi))));
    }
    return t.value();
  });
}

// ---------------------------------------------------------------- warped

// Random entries on every (i, j) whose momentum difference matches that of a
// randomly chosen basis pair.
inline HomogeneousComponent random_homogeneous(std::mt19937_64& rng, const MomentumGroups& groups,
                                               const FockLayout& layout) {
  const auto D = layout.total_dim();
  const auto i0 = uniform_int(rng, 0, static_cast<int>(D) - 1), j0 = uniform_int(rng, 0, static_cast<int>(D) - 1);
  const Vec2 phi = groups.momentum[groups.group_of[i0]] - groups.momentum[groups.group_of[j0]];
  HomogeneousComponent c{phi, QuadraticForm(layout)};
  for (std::int64_t i = 0; i < D; ++i)
    for (std::int64_t j = 0; j < D; ++j)
      if (momenta_close(groups.momentum[groups.group_of[i]] - groups.momentum[groups.group_of[j]], phi, 1e-12))
        c.part.matrix(i, j) = random_complex(rng);
  return c;
}

inline void suite_warped(SuiteContext& ctx, Report& report) {
  const int K = ctx.K(), N = ctx.N();
  const auto& grid = ctx.space.grid();
  const FockSpace free(grid, ScatteringModel::free(), K);
  const SkewSymmetricQ q(ctx.config.deformation_a(), grid.mass());
  const FockLayout& L = free.layout();
  const MomentumGroups groups = momentum_groups(grid, L);
  if (groups.accidental)
    report.warnings.push_back("warped: distinct rapidity multisets share a total momentum on this grid");
  const Warper tau(q, grid, L);
  const double tol = ctx.rec.tolerances().equality;
  const double exact = ctx.rec.tolerances().exact;
  auto form = [&](std::uint64_t i) {
    auto rng = ctx.rng(i);
    return QuadraticForm(L, random_matrix(rng, free.dim(), free.dim()));
  };

  ctx.rec.guarded("tau_0 is the identity", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      const QuadraticForm a = form(i);
      w = std::max(w, relative_residual(warp(a, q.scaled(0.0), grid).matrix, a.matrix));
    }
    return w;
  });
  ctx.rec.guarded("composition tau_Q tau_Q' = tau_(Q+Q') and inverse tau_-Q", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      const QuadraticForm a = form(i);
      auto rng = ctx.rng(500 + i);
      const SkewSymmetricQ q2 = q.scaled(uniform(rng, -2.0, 2.0));
      w = std::max(w, relative_residual(warp(warp(a, q, grid), q2, grid).matrix, warp(a, q + q2, grid).matrix));
      w = std::max(w, relative_residual(warp(warp(a, q, grid), q.scaled(-1.0), grid).matrix, a.matrix));
    }
    return w;
  });
  ctx.rec.guarded("left and right spectral sums agree", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      const QuadraticForm a = form(i);
      w = std::max(w, relative_residual(warp(a, q, grid, SpectralOrder::Right).matrix,
                                        warp(a, q, grid, SpectralOrder::Left).matrix));
    }
    return w;
  });
  ctx.rec.guarded("tau_Q is linear and preserves adjoints", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      const QuadraticForm a = form(i), b = form(1000 + i);
      const cplx alpha(0.3, -1.2), beta(-0.7, 0.4);
      QuadraticForm combo = a;
      combo *= alpha;
      QuadraticForm bb = b;
      bb *= beta;
      combo += bb;
      w = std::max(w, relative_residual(tau(combo).matrix, alpha * tau(a).matrix + beta * tau(b).matrix));
      w = std::max(w, relative_residual(tau(a.adjoint()).matrix, tau(a).adjoint().matrix));
    }
    return w;
  });
  ctx.rec.guarded("translations intertwine: tau_Q(U(x) A) = U(x) tau_Q(A)", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      const QuadraticForm a = form(i);
      auto rng = ctx.rng(2000 + i);
      const CVector u = translation_phases(grid, L, Vec2(uniform(rng, -2, 2), uniform(rng, -2, 2)));
      const QuadraticForm ua(L, u.asDiagonal() * a.matrix), au(L, a.matrix * u.asDiagonal());
      w = std::max(w, relative_residual(tau(ua).matrix, CMatrix(u.asDiagonal() * tau(a).matrix)));
      w = std::max(w, relative_residual(tau(au).matrix, CMatrix(tau(a).matrix * u.asDiagonal())));
    }
    return w;
  });
  ctx.rec.guarded("momentum decomposition into homogeneous components", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < std::min(ctx.instances, 3); ++i) {
      const QuadraticForm a = form(i);
      const auto parts = momentum_sector_decompose(a, grid);
      CMatrix sum = CMatrix::Zero(a.matrix.rows(), a.matrix.cols());
      auto rng = ctx.rng(3000 + i);
      const Vec2 x(uniform(rng, -2, 2), uniform(rng, -2, 2));
      for (const auto& c : parts) {
        sum += c.part.matrix;
        w = std::max(w, homogeneity_residual(c, grid, x) / std::max(1.0, max_abs(c.part.matrix)));
      }
      w = std::max(w, relative_residual(sum, a.matrix));
    }
    for (int t = 0; t < N && K >= 1; ++t) {
      const auto parts = momentum_sector_decompose(creator_form(free, basis_vector(N, t)), grid);
      const Vec2 p = momentum(grid, grid[t]);
      if (parts.size() != 1) return std::numeric_limits<double>::infinity();
      w = std::max(w, (parts[0].transfer - p).cwiseAbs().maxCoeff() / p.cwiseAbs().maxCoeff());
    }
    return w;
  });
  const Realization free_r = realization(free);
  ctx.rec.guarded("deformed homogeneous form on eta-vectors: phase exp(i phi Q p(eta))", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(4000 + i);
      const auto c = random_homogeneous(rng, groups, L);
      const QuadraticForm ta = tau(c.part);
      for (int n = 0; n <= K; ++n) {
        std::vector<int> eta(n);
        for (std::int64_t e = 0; e < ipow(N, n); ++e) {
          decode_tuple(e, N, eta);
          const FockState v = contracted_vector(free_r, Side::Right, Contraction::empty(0, n), eta);
          Vec2 p = Vec2::Zero();
          for (int k : eta) p += momentum(grid, grid[k]);
          const CVector lhs = ta.apply(v).amplitudes;
          const CVector rhs = std::polar(1.0, q.form(c.transfer, p)) * c.part.apply(v).amplitudes;
          w = std::max(w, relative_residual(lhs, rhs));
        }
      }
    }
    return w;
  });
  ctx.rec.guarded("deformed products tau(A) tau(B) = exp(i phi_A Q phi_B) tau(AB)", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(5000 + i);
      const auto a = random_homogeneous(rng, groups, L), b = random_homogeneous(rng, groups, L);
      w = std::max(w, relative_residual((tau(a.part) * tau(b.part)).matrix,
                                        std::polar(1.0, q.form(a.transfer, b.transfer)) * tau(a.part * b.part).matrix));
    }
    return w;
  });

  const Realization zr = deformed_realization(free, q);
  std::vector<QuadraticForm> zann;
  for (int i = 0; i < N; ++i) zann.push_back(zr.annihilator(i));
  auto pq = [&](int i, int j) { return std::polar(1.0, 2.0 * q.form(momentum(grid, grid[i]), momentum(grid, grid[j]))); };
  ctx.rec.guarded("deformed creators obey exchange relations with phase exp(2i p Q p)", tol, [&] {
    RelativeTracker t;
    const QuadraticForm one = identity_form(free);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        t.add((zr.creator(i) * zr.creator(j)).matrix, pq(i, j) * (zr.creator(j) * zr.creator(i)).matrix);
        t.add((zann[i] * zann[j]).matrix, pq(i, j) * (zann[j] * zann[i]).matrix);
        QuadraticForm rhs = zr.creator(i) * zann[j];
        rhs *= pq(i, j);
        if (i == j) rhs += one;
        t.add(restrict_input(zann[j] * zr.creator(i), K - 1).matrix, restrict_input(rhs, K - 1).matrix);
      }
    return t.value();
  });
  ctx.rec.guarded("exp(2i p(theta) Q p(eta)) = exp(i a sinh(theta - eta)) = S(theta - eta)", exact, [&] {
    auto rng = ctx.rng(6000);
    const ScatteringModel s = ScatteringModel::sinh_exp(q.a);
    double w = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double th = uniform(rng, -2.5, 2.5), et = uniform(rng, -2.5, 2.5);
      const cplx lhs = std::polar(1.0, 2.0 * q.form(momentum(grid.mass(), th), momentum(grid.mass(), et)));
      w = std::max(w, std::abs(lhs - s(th - et)));
    }
    return w;
  });

  const QCommutator qc(q, grid, L);
  ctx.rec.guarded("Q-commutator relations [z+, z+]_Q = [z, z]_Q = 0, [z(e), z+(t)]_Q = delta", tol, [&] {
    RelativeTracker t;
    const QuadraticForm one = identity_form(free);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        t.add(qc(zr.creator(i), zr.creator(j)).value.matrix, CMatrix::Zero(free.dim(), free.dim()));
        t.add(qc(zann[i], zann[j]).value.matrix, CMatrix::Zero(free.dim(), free.dim()));
        t.add_scale(max_abs((zr.creator(i) * zr.creator(j)).matrix));
        QuadraticForm expected(L);
        if (i == j) expected = one;
        t.add(restrict_input(qc(zann[j], zr.creator(i)).value, K - 1).matrix, restrict_input(expected, K - 1).matrix);
      }
    return t.value();
  });
  ctx.rec.guarded("Q-commutator of homogeneous forms AB - exp(2i phi_A Q phi_B) BA", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(7000 + i);
      const auto a = random_homogeneous(rng, groups, L), b = random_homogeneous(rng, groups, L);
      const CMatrix expected =
          (a.part * b.part).matrix - std::polar(1.0, 2.0 * q.form(a.transfer, b.transfer)) * (b.part * a.part).matrix;
      w = std::max(w, relative_residual(qc(a.part, b.part).value.matrix, expected));
    }
    return w;
  });
  ctx.rec.guarded("Q-commutator anticommutativity, Leibniz rule and Jacobi identity", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(8000 + i);
      const auto a = random_homogeneous(rng, groups, L), b = random_homogeneous(rng, groups, L),
                 c = random_homogeneous(rng, groups, L);
      auto e2 = [&](const Vec2& x, const Vec2& y) { return std::polar(1.0, 2.0 * q.form(x, y)); };
      auto br = [&](const QuadraticForm& x, const QuadraticForm& y) { return qc(x, y).value; };
      const QuadraticForm ab = br(a.part, b.part), ba = br(b.part, a.part);
      w = std::max(w, relative_residual(ab.matrix, CMatrix(-e2(a.transfer, b.transfer) * ba.matrix)));

      const QuadraticForm lhs = br(a.part, b.part * c.part);
      const CMatrix rhs =
          (ab * c.part).matrix + e2(a.transfer, b.transfer) * (b.part * br(a.part, c.part)).matrix;
      w = std::max(w, relative_residual(lhs.matrix, rhs));

      const CMatrix jac = std::conj(e2(a.transfer, c.transfer)) * br(a.part, br(b.part, c.part)).matrix +
                          std::conj(e2(b.transfer, a.transfer)) * br(b.part, br(c.part, a.part)).matrix +
                          std::conj(e2(c.transfer, b.transfer)) * br(c.part, br(a.part, b.part)).matrix;
      const double scale = std::max({1.0, max_abs(br(a.part, br(b.part, c.part)).matrix)});
      w = std::max(w, max_abs(jac) / scale);
    }
    return w;
  });
}

// ---------------------------------------------------------------- nested

inline void suite_nested(SuiteContext& ctx, Report& report) {
  const int K = ctx.K(), N = ctx.N();
  const int order = std::min(3, 2 * K);
  const double tol = ctx.rec.tolerances().equality;
  const ScatteringFamily fam = ctx.config.model.family();
  auto compare = [&](const std::map<std::pair<int, int>, KernelTensor>& nested, CoefficientExtractor& ex) {
    RelativeTracker t;
    for (const auto& [key, f] : nested) t.add(f.values, ex.fmn(key.first, key.second).values);
    return t.value();
  };

  if (fam == ScatteringFamily::Free || fam == ScatteringFamily::Ising) {
    const bool free = fam == ScatteringFamily::Free;
    const std::string anchor = free ? "nested commutators reproduce f_mn for S = 1"
                                    : "nested graded commutators reproduce f_mn for S = -1";
    ctx.rec.guarded(anchor, tol, [&] {
      const Realization r = realization(ctx.space);
      double w = 0.0;
      for (int i = 0; i < ctx.instances; ++i) {
        auto rng = ctx.rng(static_cast<std::uint64_t>(i));
        const QuadraticForm a = random_form(rng, ctx.space);
        CoefficientExtractor ex(r, a);
        w = std::max(w, compare(free ? nested_free_family(ctx.space, a, order) : nested_graded_family(ctx.space, a, order), ex));
      }
      return w;
    });
    return;
  }
  if (fam != ScatteringFamily::SinhExp) {
    ctx.rec.skip("nested Q-commutators reproduce f_mn for S = exp(i a sinh)",
                 "no nested formula for scattering family " + to_string(fam));
    return;
  }

  const SkewSymmetricQ q(ctx.config.model.a(), ctx.space.grid().mass());
  const FockSpace free(ctx.space.grid(), ScatteringModel::free(), K);
  if (momentum_groups(free.grid(), free.layout()).accidental)
    report.warnings.push_back("nested: distinct rapidity multisets share a total momentum on this grid");
  const Realization zr = deformed_realization(free, q);

  ctx.rec.guarded("nested Q-commutators reproduce f_mn for S = exp(i a sinh)", tol, [&] {
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(static_cast<std::uint64_t>(i));
      const QuadraticForm a = random_form(rng, free);
      CoefficientExtractor ex(zr, a);
      w = std::max(w, compare(nested_q_family(free, a, q, order), ex));
    }
    return w;
  });

  ctx.rec.guarded("deformed free space reproduces the S-symmetric coefficients", tol, [&] {
    const Realization sr = realization(ctx.space);
    double w = 0.0;
    for (int i = 0; i < ctx.instances; ++i) {
      auto rng = ctx.rng(100000 + static_cast<std::uint64_t>(i));
      QuadraticForm on_s(ctx.space.layout()), on_free(free.layout());
      for (int m = 0; m <= K; ++m)
        for (int n = 0; n <= K && m + n <= order; ++n) {
          const KernelTensor g = random_kernel(rng, m, n, N);
          const double c = 1.0 / (factorial(m) * factorial(n));
          on_s.matrix += c * zmzn_form(ctx.space, g).matrix;
          on_free.matrix += c * monomial_form(zr, g).matrix;
        }
      CoefficientExtractor ex(sr, on_s);
      w = std::max(w, compare(nested_q_family(free, on_free, q, order), ex));
    }
    return w;
  });
}

}  // namespace detail

/// Runs the selected suites. The scattering suite runs first; if it fails the
/// remaining suites are reported as skipped.
inline Report run_suites(const RunConfig& config) {
  const RapidityGrid grid(config.grid, config.mass);
  const FockSpace space(grid, config.model, config.truncation);
  Report report;

  auto run_one = [&](const std::string& name, Report& warn_sink) {
    const int inst = config.instances.count(name) ? config.instances.at(name) : default_instances(name);
    detail::SuiteContext ctx{config, space, name, inst, SuiteRecorder(name, config.tolerances_for(name))};
    if (name == "scattering") detail::suite_scattering(ctx);
    else if (name == "zf_algebra") detail::suite_zf_algebra(ctx);
    else if (name == "norms") detail::suite_norms(ctx);
    else if (name == "contractions") detail::suite_contractions(ctx);
    else if (name == "symmetry") detail::suite_symmetry(ctx);
    else if (name == "dual_basis") detail::suite_dual_basis(ctx);
    else if (name == "expansion") detail::suite_expansion(ctx);
    else if (name == "transformations") detail::suite_transformations(ctx);
    else if (name == "warped") detail::suite_warped(ctx, warn_sink);
    else if (name == "nested") detail::suite_nested(ctx, warn_sink);
    return ctx.rec.take();
  };

  std::vector<std::string> order;
  for (const auto& s : all_suites())
    if (std::find(config.suites.begin(), config.suites.end(), s) != config.suites.end()) order.push_back(s);

  bool scattering_ok = true;
  if (!order.empty() && order.front() == "scattering") {
    auto recs = run_one("scattering", report);
    scattering_ok = std::none_of(recs.begin(), recs.end(), [](const CheckRecord& c) { return c.status == CheckStatus::Fail; });
    report.checks.insert(report.checks.end(), recs.begin(), recs.end());
    order.erase(order.begin());
  }
  if (!scattering_ok) {
    for (const auto& s : order) report.checks.push_back({s, "suite skipped", CheckStatus::Skip, 0.0, 0.0, "scattering axioms failed"});
    return report;
  }

  std::vector<Report> sinks(order.size());
  std::vector<std::future<std::vector<CheckRecord>>> jobs;
  for (std::size_t i = 0; i < order.size(); ++i)
    jobs.push_back(std::async(std::launch::async, [&, i] { return run_one(order[i], sinks[i]); }));
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      auto recs = jobs[i].get();
      report.checks.insert(report.checks.end(), recs.begin(), recs.end());
      report.warnings.insert(report.warnings.end(), sinks[i].warnings.begin(), sinks[i].warnings.end());
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return report;
}

inline std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline void write_csv(std::ostream& os, const Report& r) {
  os << "suite,anchor,status,residual,tolerance\n";
  for (const auto& c : r.checks)
    os << csv_field(c.suite) << ',' << csv_field(c.anchor) << ',' << to_string(c.status) << ','
       << format_number(c.residual) << ',' << format_number(c.tolerance) << '\n';
}

inline json report_to_json(const Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json e{{"suite", c.suite}, {"anchor", c.anchor}, {"status", to_string(c.status)},
           {"residual", format_number(c.residual)}, {"tolerance", format_number(c.tolerance)}};
    if (!c.note.empty()) e["note"] = c.note;
    checks.push_back(e);
  }
  return {{"passed", r.passed()}, {"checks", checks}, {"warnings", r.warnings}};
}

}  // namespace zfexp
