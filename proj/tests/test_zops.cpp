#include "zfexp/random.hpp"
#include "zfexp/zops.hpp"

#include <catch_amalgamated.hpp>

using namespace zfexp;
using Catch::Matchers::WithinAbs;

namespace {

FockSpace make_space(const ScatteringModel& model, int K = 3) {
  return FockSpace(RapidityGrid({-0.5, 0.25, 1.0}, 1.0), model, K);
}

}  // namespace

TEST_CASE("creator acts as sqrt(n) P_n (f x psi)", "[zops]") {
  const FockSpace space = make_space(ScatteringModel::free(), 2);
  const CVector f = basis_vector(3, 1);
  const FockState one = create(space, f, space.vacuum()).value;
  CHECK(std::abs(one.amplitudes(space.layout().offset(1) + 1) - 1.0) < 1e-15);
  const auto two = create(space, f, one);
  // |1,1> has norm sqrt(2) in the free case
  CHECK_THAT(two.value.norm(), WithinAbs(std::sqrt(2.0), 1e-14));
  CHECK_FALSE(two.overflow);
  CHECK(create(space, f, two.value).overflow);
  CHECK_THROWS_AS(create(space, CVector::Zero(2), space.vacuum()), InputError);
}

TEST_CASE("creator_form matches create and annihilator_form matches annihilate", "[zops]") {
  for (const auto& model : {ScatteringModel::free(), ScatteringModel::ising(), ScatteringModel::sinh_exp(1.0)}) {
    const FockSpace space = make_space(model);
    auto rng = keyed_rng(2, "zops", 0);
    const CVector f = random_vector(rng, 3);
    const FockState psi = random_state(rng, space);
    CHECK(max_abs(CVector(creator_form(space, f).apply(psi).amplitudes - create(space, f, psi).value.amplitudes)) <
          1e-12);
    CHECK(max_abs(CVector(annihilator_form(space, f).apply(psi).amplitudes - annihilate(space, f, psi).amplitudes)) <
          1e-12);
  }
}

TEST_CASE("Zamolodchikov-Faddeev exchange relations hold on the truncated space", "[zops]") {
  const FockSpace space = make_space(ScatteringModel::sinh_exp(0.8));
  const Realization r = realization(space);
  const ScatteringTable& t = space.table();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const CMatrix lhs = (r.creator(i) * r.creator(j)).matrix;
      const CMatrix rhs = t(i, j) * (r.creator(j) * r.creator(i)).matrix;
      CHECK(max_abs(CMatrix(lhs - rhs)) < 1e-12);
      QuadraticForm ccr = r.creator(i) * r.annihilator(j);
      ccr *= t(i, j);
      if (i == j) ccr += identity_form(space);
      const auto lhs2 = restrict_input(r.annihilator(j) * r.creator(i), 2);
      CHECK(max_abs(CMatrix(lhs2.matrix - restrict_input(ccr, 2).matrix)) < 1e-12);
    }
}

TEST_CASE("closed-form z+^m z^n agrees with the operator product", "[zops]") {
  for (const auto& model : {ScatteringModel::free(), ScatteringModel::ising(), ScatteringModel::sinh_exp(1.5)}) {
    const FockSpace space = make_space(model);
    const Realization r = realization(space);
    auto rng = keyed_rng(9, "zops", 1);
    for (int m = 0; m <= 2; ++m)
      for (int n = 0; n + m <= 3; ++n) {
        const KernelTensor f = random_kernel(rng, m, n, 3);
        CHECK(relative_residual(zmzn_form(space, f).matrix, monomial_form(r, f).matrix) < 1e-12);
      }
  }
}

TEST_CASE("z+^m z^n(delta) on one particle is the number operator", "[zops]") {
  const FockSpace space = make_space(ScatteringModel::sinh_exp(1.0));
  KernelTensor delta(1, 1, 3);
  for (int i = 0; i < 3; ++i) delta.values(i * 3 + i) = 1.0;
  const QuadraticForm num = zmzn_form(space, delta);
  for (int n = 0; n <= 3; ++n)
    CHECK(max_abs(CMatrix(num.block(n, n) - static_cast<double>(n) * space.projector(n))) < 1e-12);
}

TEST_CASE("kernel adjoint reverses and conjugates", "[zops]") {
  KernelTensor f(1, 2, 2);
  f.values << 1.0, cplx(0, 2), 3.0, 4.0, 5.0, 6.0, 7.0, cplx(8, 1);
  const KernelTensor g = kernel_adjoint(f);
  CHECK(g.m == 2);
  CHECK(g.n == 1);
  // g(t1, t2; e) = conj f(e; t2, t1)
  CHECK(g.at(std::vector<int>{0, 1, 0}) == std::conj(f.at(std::vector<int>{0, 1, 0})));
  CHECK(g.at(std::vector<int>{1, 0, 0}) == std::conj(f.at(std::vector<int>{0, 0, 1})));
  CHECK(g.at(std::vector<int>{1, 1, 1}) == cplx(8, -1));
  const FockSpace space = make_space(ScatteringModel::sinh_exp(0.7));
  auto rng = keyed_rng(4, "zops", 2);
  const KernelTensor h = random_kernel(rng, 2, 1, 3);
  CHECK(relative_residual(zmzn_form(space, h).adjoint().matrix, zmzn_form(space, kernel_adjoint(h)).matrix) < 1e-12);
}

TEST_CASE("norms of kernels and forms", "[zops]") {
  const RapidityGrid g({-0.5, 0.25, 1.0}, 1.0);
  KernelTensor f(1, 1, 3);
  f.values(0) = 2.0;
  CHECK_THAT(cross_norm_plain(f), WithinAbs(2.0, 1e-14));
  CHECK_THAT(cross_norm(f, g, Indicatrix::zero()), WithinAbs(2.0, 1e-14));
  CHECK_THAT(cross_norm(f, g, Indicatrix::sqrt(1.0)), WithinAbs(2.0 * std::exp(-std::sqrt(std::cosh(-0.5))), 1e-14));
  CHECK_THAT(omega_l2_norm(basis_vector(3, 2), g, 1, Indicatrix::log(1.0)), WithinAbs(1.0 + std::cosh(1.0), 1e-13));

  const FockSpace space = make_space(ScatteringModel::free(), 2);
  CHECK_THAT(qform_norm(space, identity_form(space), 2, Indicatrix::zero()), WithinAbs(1.0, 1e-13));
  CHECK_THROWS_AS(qform_norm(space, identity_form(space), 3, Indicatrix::zero()), InputError);
}

TEST_CASE("forms refuse mismatched layouts", "[zops]") {
  const QuadraticForm a(FockLayout(2, 2)), b(FockLayout(3, 2));
  CHECK_THROWS_AS(a * b, InputError);
  CHECK_THROWS_AS(QuadraticForm(FockLayout(2, 1), CMatrix::Zero(2, 2)), InputError);
}
