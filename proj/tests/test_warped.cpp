#include "zfexp/random.hpp"
#include "zfexp/warped.hpp"

#include <catch_amalgamated.hpp>

using namespace zfexp;
using Catch::Matchers::WithinAbs;

namespace {

const RapidityGrid kGrid({-0.7, 0.2, 1.05}, 1.0);

QuadraticForm random_dense(const FockSpace& space, std::uint64_t index) {
  auto rng = keyed_rng(21, "warped", index);
  return {space.layout(), random_matrix(rng, space.dim(), space.dim())};
}

}  // namespace

TEST_CASE("skew-symmetric Q reproduces the sinh-Gordon-type phase", "[warped]") {
  const SkewSymmetricQ q(1.0, 1.0);
  CHECK_THAT(2.0 * q.form(momentum(1.0, 0.7), momentum(1.0, -0.2)), WithinAbs(1.0265167257081753, 1e-14));
  const Vec2 x(0.3, 1.2), y(-0.4, 0.8);
  CHECK_THAT(q.form(x, y), WithinAbs(-q.form(y, x), 1e-15));
  CHECK_THAT((q + q.scaled(2.0)).a, WithinAbs(3.0, 0.0));
  CHECK_THROWS_AS(SkewSymmetricQ(1.0, 0.0), InputError);
}

TEST_CASE("momentum groups are rearrangements on a generic grid", "[warped]") {
  const FockLayout layout(3, 3);
  const MomentumGroups g = momentum_groups(kGrid, layout);
  CHECK_FALSE(g.accidental);
  // multisets of size <= 3 over 3 points: 1 + 3 + 6 + 10
  CHECK(g.momentum.size() == 20);
}

TEST_CASE("tau_Q is a group action with matching left and right sums", "[warped]") {
  const FockSpace space(kGrid, ScatteringModel::free(), 3);
  const SkewSymmetricQ q(0.9, 1.0);
  const QuadraticForm a = random_dense(space, 0);
  CHECK(relative_residual(warp(a, q.scaled(0.0), kGrid).matrix, a.matrix) < 1e-14);
  CHECK(relative_residual(warp(warp(a, q, kGrid), q.scaled(-1.0), kGrid).matrix, a.matrix) < 1e-12);
  CHECK(relative_residual(warp(warp(a, q, kGrid), q.scaled(0.5), kGrid).matrix, warp(a, q.scaled(1.5), kGrid).matrix) <
        1e-12);
  CHECK(relative_residual(warp(a, q, kGrid, SpectralOrder::Left).matrix, warp(a, q, kGrid).matrix) < 1e-12);
  CHECK(relative_residual(warp(a.adjoint(), q, kGrid).matrix, warp(a, q, kGrid).adjoint().matrix) < 1e-12);
  const Warper tau(q, kGrid, space.layout());
  CHECK(relative_residual(tau(a).matrix, warp(a, q, kGrid).matrix) < 1e-14);
}

TEST_CASE("decomposition into homogeneous components", "[warped]") {
  const FockSpace space(kGrid, ScatteringModel::free(), 2);
  const QuadraticForm a = random_dense(space, 1);
  const auto parts = momentum_sector_decompose(a, kGrid);
  CMatrix sum = CMatrix::Zero(space.dim(), space.dim());
  for (const auto& c : parts) {
    sum += c.part.matrix;
    CHECK(homogeneity_residual(c, kGrid, Vec2(0.4, -1.3)) < 1e-12 * std::max(1.0, max_abs(c.part.matrix)));
  }
  CHECK(relative_residual(sum, a.matrix) < 1e-15);

  const auto creator_parts = momentum_sector_decompose(creator_form(space, basis_vector(3, 2)), kGrid);
  REQUIRE(creator_parts.size() == 1);
  CHECK((creator_parts[0].transfer - momentum(kGrid, kGrid[2])).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("deformed free creators obey sinh-exp exchange relations", "[warped]") {
  const FockSpace free(kGrid, ScatteringModel::free(), 3);
  const FockSpace target(kGrid, ScatteringModel::sinh_exp(1.0), 3);
  const SkewSymmetricQ q(1.0, 1.0);
  const Realization z = deformed_realization(free, q);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const cplx s = target.table()(i, j);
      CHECK(relative_residual((z.creator(i) * z.creator(j)).matrix, s * (z.creator(j) * z.creator(i)).matrix) < 1e-12);
      QuadraticForm rhs = z.creator(i) * z.annihilator(j);
      rhs *= s;
      if (i == j) rhs += identity_form(free);
      CHECK(relative_residual(restrict_input(z.annihilator(j) * z.creator(i), 2).matrix, restrict_input(rhs, 2).matrix) <
            1e-12);
    }
  CHECK_THROWS_AS(deformed_realization(target, q), InputError);
}

TEST_CASE("Q-commutator of deformed creators", "[warped]") {
  const FockSpace free(kGrid, ScatteringModel::free(), 3);
  const SkewSymmetricQ q(0.5, 1.0);
  const Realization z = deformed_realization(free, q);
  const QCommutator qc(q, kGrid, free.layout());
  const auto cc = qc(z.creator(0), z.creator(2));
  CHECK(max_abs(cc.value.matrix) < 1e-12);
  const auto ac = qc(z.annihilator(1), z.creator(1));
  CHECK(ac.overflow);
  CHECK(relative_residual(restrict_input(ac.value, 2).matrix, restrict_input(identity_form(free), 2).matrix) < 1e-12);
}

TEST_CASE("graded commutator and parity", "[warped]") {
  const FockSpace space(kGrid, ScatteringModel::ising(), 2);
  const Realization r = realization(space);
  CHECK(parity(r.creator(0)) == 1);
  CHECK(parity(identity_form(space)) == 0);
  CHECK_FALSE(parity(r.creator(0) + identity_form(space)).has_value());
  // {z(e), z+(t)} = delta on input sectors below K
  const QuadraticForm ac = graded_commutator(r.annihilator(1), r.creator(1));
  CHECK(relative_residual(restrict_input(ac, 1).matrix, restrict_input(identity_form(space), 1).matrix) < 1e-12);
  CHECK_THROWS_AS(graded_commutator(r.creator(0) + identity_form(space), r.creator(1)), InputError);
}

TEST_CASE("nested commutators reproduce the expansion coefficients", "[warped]") {
  SECTION("free") {
    const FockSpace space(kGrid, ScatteringModel::free(), 3);
    auto rng = keyed_rng(22, "warped", 0);
    const QuadraticForm a = random_form(rng, space);
    CoefficientExtractor ex(realization(space), a);
    for (const auto& [key, f] : nested_free_family(space, a, 3))
      CHECK(relative_residual(f.values, ex.fmn(key.first, key.second).values) < 1e-10);
    CHECK(relative_residual(nested_free_coefficients(space, a, 1, 2).values, ex.fmn(1, 2).values) < 1e-10);
  }
  SECTION("ising") {
    const FockSpace space(kGrid, ScatteringModel::ising(), 3);
    auto rng = keyed_rng(22, "warped", 1);
    const QuadraticForm a = random_form(rng, space);
    CoefficientExtractor ex(realization(space), a);
    for (const auto& [key, f] : nested_graded_family(space, a, 3))
      CHECK(relative_residual(f.values, ex.fmn(key.first, key.second).values) < 1e-10);
  }
  SECTION("sinh-exp through the deformed free space") {
    const FockSpace free(kGrid, ScatteringModel::free(), 3);
    const SkewSymmetricQ q(2.0, 1.0);
    auto rng = keyed_rng(22, "warped", 2);
    const QuadraticForm a = random_form(rng, free);
    CoefficientExtractor ex(deformed_realization(free, q), a);
    const auto fam = nested_q_family(free, a, q, 3);
    CHECK(fam.size() == 10);
    for (const auto& [key, f] : fam) CHECK(relative_residual(f.values, ex.fmn(key.first, key.second).values) < 1e-10);
    CHECK(relative_residual(nested_q_coefficients(free, a, q, 2, 1).values, fam.at({2, 1}).values) < 1e-12);
  }
}
