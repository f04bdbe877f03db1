#include "zfexp/random.hpp"
#include "zfexp/scattering.hpp"

#include <catch_amalgamated.hpp>

using namespace zfexp;
using Catch::Matchers::WithinAbs;

TEST_CASE("permutations compose right to left and invert", "[permutation]") {
  const auto s = Permutation::from_images({2, 3, 1});
  const auto t = Permutation::from_images({1, 3, 2});
  CHECK(s.compose(t).images() == std::vector<int>{2, 1, 3});
  CHECK(s.compose(s.inverse()).is_identity());
  CHECK(s.sign() == 1);
  CHECK(t.sign() == -1);
  CHECK(all_permutations(4).size() == 24);
  CHECK_THROWS_AS(Permutation::from_images({1, 1, 2}), InputError);
  CHECK_THROWS_AS(s.compose(Permutation::identity(2)), InputError);
}

TEST_CASE("permute reads the tuple at sigma(i)", "[permutation]") {
  const auto s = Permutation::from_images({3, 1, 2});
  const std::vector<int> tuple{10, 20, 30};
  CHECK(s.permute<int>(tuple) == std::vector<int>{30, 10, 20});
}

TEST_CASE("built-in scattering functions", "[scattering]") {
  CHECK(ScatteringModel::free()(0.3) == cplx(1.0));
  CHECK(ScatteringModel::ising()(0.3) == cplx(-1.0));
  const auto s = ScatteringModel::sinh_exp(1.0)(0.5);
  CHECK_THAT(std::arg(s), WithinAbs(0.52109530549374736, 1e-15));
  CHECK_THAT(s.real(), WithinAbs(0.86727442368302156, 1e-15));
  CHECK_THAT(s.imag(), WithinAbs(0.49783036671669881, 1e-15));
  CHECK(std::abs(ScatteringModel::sinh_exp(2.0).inverse()(0.7) - std::conj(ScatteringModel::sinh_exp(2.0)(0.7))) <
        1e-15);
  CHECK_THROWS_AS(ScatteringModel::sinh_exp(std::nan("")), InputError);
  CHECK_THROWS_AS(ScatteringModel::free()(std::numeric_limits<double>::infinity()), InputError);
}

TEST_CASE("tabulated scattering validates its axioms", "[scattering]") {
  const cplx u = std::polar(1.0, 0.4);
  const auto ok = ScatteringModel::tabulated({{-0.5, std::conj(u)}, {0.0, 1.0}, {0.5, u}});
  CHECK(std::abs(ok(0.5) - u) < 1e-15);
  CHECK_THROWS_WITH(ok(0.25), Catch::Matchers::ContainsSubstring("no entry"));
  CHECK_THROWS_AS(ScatteringModel::tabulated({{0.0, 1.0}, {0.5, u}}), InputError);
  CHECK_THROWS_AS(ScatteringModel::tabulated({{-0.5, std::conj(u)}, {0.5, 1.1 * u}}), InputError);
  const auto broken = ScatteringModel::tabulated_unchecked({{-0.5, std::conj(u)}, {0.5, 1.1 * u}});
  CHECK(broken.table_violation().has_value());
  CHECK_THAT(broken.table_unitarity_residual(), WithinAbs(0.1, 1e-12));
}

TEST_CASE("S-factor of a permutation follows the composition law", "[scattering]") {
  const std::vector<double> pts{-0.7, 0.1, 0.45, 1.3};
  const ScatteringTable t(ScatteringModel::sinh_exp(1.3), pts);
  const std::vector<int> idx{2, 0, 3, 1};
  for (const auto& s : all_permutations(4))
    for (const auto& r : all_permutations(4)) {
      const auto moved = s.permute<int>(idx);
      CHECK(std::abs(s_sigma(t, s.compose(r), idx) - s_sigma(t, s, idx) * s_sigma(t, r, moved)) < 1e-13);
    }
}

TEST_CASE("two-particle symmetrizer entries", "[scattering]") {
  const std::vector<double> pts{-0.5, 0.25, 1.0};
  const CMatrix p = symmetrizer_matrix(ScatteringTable(ScatteringModel::sinh_exp(1.0), pts), 2);
  // row (0,1), column (1,0)
  CHECK_THAT(p(1, 3).real(), WithinAbs(0.34026275454268653, 1e-15));
  CHECK_THAT(p(1, 3).imag(), WithinAbs(0.3663621949260369, 1e-15));
  CHECK_THAT(p(1, 1).real(), WithinAbs(0.5, 1e-15));

  const CMatrix ising = symmetrizer_matrix(ScatteringTable(ScatteringModel::ising(), pts), 2);
  CHECK(std::abs(ising(0, 0)) < 1e-15);
  CHECK_THAT(ising(1, 3).real(), WithinAbs(-0.5, 1e-15));
}

TEST_CASE("symmetrizer is an orthogonal projection for every family", "[scattering]") {
  const std::vector<double> pts{-0.4, 0.3, 0.8};
  for (const auto& model : {ScatteringModel::free(), ScatteringModel::ising(), ScatteringModel::sinh_exp(0.5)}) {
    for (int n = 0; n <= 3; ++n) {
      const CMatrix p = symmetrizer_matrix(ScatteringTable(model, pts), n);
      CHECK(max_abs(CMatrix(p * p - p)) < 1e-13);
      CHECK(max_abs(CMatrix(p.adjoint() - p)) < 1e-13);
    }
  }
}

TEST_CASE("D is a representation and symmetrize is its average", "[scattering]") {
  const std::vector<double> pts{-0.4, 0.3, 0.8};
  const ScatteringTable t(ScatteringModel::sinh_exp(2.0), pts);
  auto rng = keyed_rng(1, "test", 0);
  const KernelTensor f = random_kernel(rng, 2, 1, 3);
  for (const auto& s : all_permutations(3))
    for (const auto& r : all_permutations(3))
      CHECK(max_abs(CVector(act_d(t, s, act_d(t, r, f)).values - act_d(t, s.compose(r), f).values)) < 1e-13);

  const KernelTensor sym = symmetrize(t, f);
  for (const auto& s : all_permutations(3)) CHECK(max_abs(CVector(act_d(t, s, sym).values - sym.values)) < 1e-13);

  const KernelTensor split = symmetrize_split(t, f);
  CHECK(max_abs(CVector(act_d(t, Permutation::transposition(3, 1, 2), split).values - split.values)) < 1e-13);
  CHECK_THROWS_AS(symmetrize(t, f, {1, 1}), InputError);
  CHECK_THROWS_AS(symmetrize(t, f, {4}), InputError);
}
