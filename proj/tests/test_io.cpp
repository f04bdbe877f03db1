#include "zfexp/io.hpp"
#include "zfexp/random.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>

using namespace zfexp;
using Catch::Matchers::ContainsSubstring;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "zfexp_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("scattering models roundtrip through JSON", "[io]") {
  for (const auto& model : {ScatteringModel::free(), ScatteringModel::ising(), ScatteringModel::sinh_exp(0.75),
                            ScatteringModel::sinh_exp(2.0).inverse()}) {
    const ScatteringModel back = scattering_from_json(to_json(model));
    CHECK(back.name() == model.name());
    CHECK(std::abs(back(0.4) - model(0.4)) == 0.0);
  }
  const cplx u = std::polar(1.0, 0.3);
  const json table{{"family", "table"}, {"table", {{-0.5, u.real(), -u.imag()}, {0.5, u.real(), u.imag()}}}};
  CHECK(std::abs(scattering_from_json(table)(0.5) - u) < 1e-15);
  CHECK_THROWS_WITH(scattering_from_json(json{{"family", "sine_gordon"}}),
                    ContainsSubstring("supported: free, ising, sinh_exp, table"));
  CHECK_THROWS_AS(scattering_from_json(json{{"family", "sinh_exp"}}), InputError);
}

TEST_CASE("kernels, states and forms roundtrip through JSON", "[io]") {
  const SpaceSpec spec{RapidityGrid({-0.3, 0.4, 1.2}, 1.5), ScatteringModel::sinh_exp(1.0), 2};
  const FockSpace space = spec.space();
  auto rng = keyed_rng(31, "io", 0);

  const KernelTensor f = random_kernel(rng, 2, 1, 3);
  CHECK(kernel_from_json(to_json(f)).values == f.values);

  const FockState psi = random_state(rng, space);
  const FockState psi_back = state_from_json(json::parse(to_json(psi).dump()));
  CHECK(psi_back.grid == psi.grid);
  CHECK(max_abs(CVector(psi_back.amplitudes - psi.amplitudes)) < 1e-15);

  const QuadraticForm a = random_form(rng, space);
  const auto [spec_back, a_back] = form_from_json(json::parse(form_to_json(spec, a).dump()));
  CHECK(spec_back.grid == spec.grid);
  CHECK(spec_back.truncation == 2);
  CHECK(max_abs(CMatrix(a_back.matrix - a.matrix)) < 1e-15);

  json bad = form_to_json(spec, a);
  bad["blocks"][0]["rows"] = 99;
  CHECK_THROWS_AS(form_from_json(bad), InputError);
  CHECK_THROWS_AS(kernel_from_json(json{{"kind", "form"}}), InputError);
}

TEST_CASE("coefficient directories roundtrip", "[io]") {
  const SpaceSpec spec{RapidityGrid({-0.3, 0.4, 1.2}, 1.0), ScatteringModel::ising(), 2};
  const FockSpace space = spec.space();
  auto rng = keyed_rng(32, "io", 0);
  const CoefficientFamily fam = expand(space, random_form(rng, space));
  const auto dir = scratch("coeffs");
  std::filesystem::remove_all(dir);
  write_coefficients(dir, spec, fam);
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(std::filesystem::exists(dir / "f_2_1.json"));
  const auto [spec_back, fam_back] = read_coefficients(dir);
  CHECK(spec_back.model.family() == ScatteringFamily::Ising);
  for (std::size_t e = 0; e < fam.entries.size(); ++e)
    CHECK(max_abs(CVector(fam_back.entries[e].values - fam.entries[e].values)) < 1e-15);
  CHECK_THROWS_AS(read_coefficients(scratch("missing")), InputError);
}

TEST_CASE("malformed files are input errors", "[io]") {
  const auto p = scratch("broken.json");
  {
    std::ofstream out(p);
    out << "{ not json";
  }
  CHECK_THROWS_AS(read_json_file(p), InputError);
  CHECK_THROWS_AS(complex_from_json(json::array({1.0})), InputError);
}
