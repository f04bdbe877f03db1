#include "zfexp/fock.hpp"
#include "zfexp/random.hpp"

#include <catch_amalgamated.hpp>

using namespace zfexp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

TEST_CASE("rapidity grids must be strictly increasing and finite", "[fock]") {
  CHECK_NOTHROW(RapidityGrid({-1.0, 0.0, 2.0}, 1.0));
  CHECK_THROWS_WITH(RapidityGrid({0.0, 0.5, 0.5}, 1.0), ContainsSubstring("index 2"));
  CHECK_THROWS_WITH(RapidityGrid({0.0, -0.5}, 1.0), ContainsSubstring("index 1"));
  CHECK_THROWS_AS(RapidityGrid({}, 1.0), InputError);
  CHECK_THROWS_AS(RapidityGrid({0.0}, 0.0), InputError);
  CHECK_THROWS_AS(RapidityGrid({0.0, std::nan("")}, 1.0), InputError);
  CHECK(RapidityGrid({0.0, 1.0}, 1.0).shifted(0.5).points() == std::vector<double>{0.5, 1.5});
}

TEST_CASE("indicatrix families", "[fock]") {
  CHECK(Indicatrix::zero()(7.0) == 0.0);
  CHECK_THAT(Indicatrix::sqrt(0.5)(4.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(Indicatrix::log(2.0)(std::exp(1.0) - 1.0), WithinAbs(2.0, 1e-15));
  CHECK(Indicatrix::sqrt(1.0).validation_residual() == 0.0);
  CHECK_THROWS_AS(Indicatrix::custom([](double p) { return p * p; }, "square"), InputError);
  CHECK_NOTHROW(Indicatrix::custom([](double p) { return 0.25 * std::sqrt(p); }, "quarter sqrt"));
}

TEST_CASE("layout offsets and the dimension cap", "[fock]") {
  const FockLayout l(3, 3);
  CHECK(l.offset(0) == 0);
  CHECK(l.offset(2) == 4);
  CHECK(l.total_dim() == 40);
  CHECK(l.locate(5) == std::pair<int, std::int64_t>{2, 1});
  CHECK_THROWS_AS(FockLayout(3, -1), InputError);
  try {
    FockLayout(9, 4);
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("(N=9, K=4)"));
  }
}

TEST_CASE("momentum, energies and translation phases", "[fock]") {
  const RapidityGrid g({-0.3, 0.6}, 2.0);
  const Vec2 p = momentum(g, 0.6);
  CHECK_THAT(minkowski(p, p), WithinAbs(4.0, 1e-13));
  const FockLayout l(2, 2);
  const Eigen::VectorXd e = basis_energies(g, l);
  CHECK_THAT(e(0), WithinAbs(0.0, 0.0));
  CHECK_THAT(e(l.offset(2) + 1), WithinAbs(std::cosh(-0.3) + std::cosh(0.6), 1e-15));
  const CVector u = translation_phases(g, l, Vec2(0.4, -1.1));
  CHECK(u.cwiseAbs().maxCoeff() < 1.0 + 1e-15);
  CHECK(std::abs(u(0) - 1.0) < 1e-15);
  const Eigen::VectorXd w = omega_weights(g, l, Indicatrix::sqrt(1.0), -1);
  CHECK_THAT(w(1), WithinAbs(std::exp(-std::sqrt(std::cosh(-0.3))), 1e-15));
}

TEST_CASE("the reflection J is an antiunitary involution", "[fock]") {
  const FockSpace space(RapidityGrid({-0.5, 0.2, 0.9}, 1.0), ScatteringModel::sinh_exp(1.0), 3);
  auto rng = keyed_rng(3, "fock", 0);
  const FockState psi = random_state(rng, space), chi = random_state(rng, space);
  CHECK(max_abs(CVector(reflect(reflect(psi)).amplitudes - psi.amplitudes)) < 1e-15);
  CHECK(std::abs(inner(reflect(psi), reflect(chi)) - std::conj(inner(psi, chi))) < 1e-12);
  // J maps S-symmetric vectors to S-symmetric vectors
  CHECK(space.symmetry_residual(reflect(psi)) < 1e-12);
}

TEST_CASE("random states lie in the S-symmetric subspace", "[fock]") {
  for (const auto& model : {ScatteringModel::free(), ScatteringModel::ising(), ScatteringModel::sinh_exp(2.0)}) {
    const FockSpace space(RapidityGrid({-0.5, 0.2, 0.9}, 1.0), model, 3);
    auto rng = keyed_rng(4, "fock", 1);
    const FockState psi = random_state(rng, space);
    CHECK(space.symmetry_residual(psi) < 1e-12);
    CHECK(psi.norm() > 0.0);
  }
}

TEST_CASE("boosts keep amplitudes and shift the grid", "[fock]") {
  const FockSpace space(RapidityGrid({-0.5, 0.2}, 1.0), ScatteringModel::free(), 2);
  auto rng = keyed_rng(5, "fock", 0);
  const FockState psi = random_state(rng, space);
  const FockState b = boost(psi, 0.3);
  CHECK_THAT(b.grid[0], WithinAbs(-0.2, 1e-15));
  CHECK(b.amplitudes == psi.amplitudes);
  CHECK_THAT(translate(psi, Vec2(1.0, 2.0)).norm(), WithinAbs(psi.norm(), 1e-12));
}
