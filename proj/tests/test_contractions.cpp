#include "zfexp/contractions.hpp"

#include <catch_amalgamated.hpp>

#include <set>

using namespace zfexp;
using Catch::Matchers::WithinAbs;

TEST_CASE("contraction counts", "[contractions]") {
  CHECK(contraction_count(1, 1) == 2);
  CHECK(contraction_count(2, 2) == 7);
  CHECK(contraction_count(3, 3) == 34);
  CHECK(contraction_count(2, 3) == 13);
  CHECK(contraction_count(0, 4) == 1);
  for (int m = 0; m <= 4; ++m)
    for (int n = 0; n <= 4; ++n) {
      const auto cs = enumerate_contractions(m, n);
      std::set<std::string> seen;
      for (const auto& c : cs) seen.insert(c.to_string());
      CHECK(static_cast<std::int64_t>(cs.size()) == contraction_count(m, n));
      CHECK(seen.size() == cs.size());
    }
}

TEST_CASE("contraction validation", "[contractions]") {
  CHECK_THROWS_AS(Contraction(2, 2, {{1, 2}}), InputError);
  CHECK_THROWS_AS(Contraction(2, 2, {{1, 3}, {1, 4}}), InputError);
  CHECK_THROWS_AS(Contraction(2, 2, {{3, 4}}), InputError);
  const Contraction c(2, 2, {{2, 3}, {1, 4}});
  CHECK(c.pairs() == std::vector<Contraction::Pair>{{2, 3}, {1, 4}});
  CHECK(c.free_left().empty());
  CHECK(Contraction(3, 2, {{2, 5}}).free_left() == std::vector<int>{1, 3});
  CHECK(Contraction(3, 2, {{2, 5}}).free_right() == std::vector<int>{4});
}

TEST_CASE("composition renumbers into the free slots", "[contractions]") {
  const Contraction c(2, 2, {{1, 3}});
  const Contraction cp(1, 1, {{1, 2}});
  CHECK(compose(c, cp) == Contraction(2, 2, {{1, 3}, {2, 4}}));
  const auto [a, b] = split(Contraction(2, 2, {{1, 3}, {2, 4}}), 1u);
  CHECK(a == c);
  CHECK(b == cp);
  CHECK_THROWS_AS(compose(c, Contraction::empty(2, 2)), InputError);
}

TEST_CASE("reflected contraction", "[contractions]") {
  const Contraction c(1, 2, {{1, 2}});
  const Contraction cj = reflect_contraction(c);
  CHECK(cj == Contraction(2, 1, {{1, 3}}));
  CHECK(reflect_contraction(cj) == c);
}

TEST_CASE("delta and S factors on grid tuples", "[contractions]") {
  const Contraction c(2, 2, {{1, 4}});
  const std::vector<int> theta{0, 1}, eta_hit{2, 0}, eta_miss{0, 2};
  CHECK(delta_pairs(c, theta, eta_hit) == 1);
  CHECK(delta_pairs(c, theta, eta_miss) == 0);

  const auto s = ScatteringModel::sinh_exp(1.0);
  const std::vector<double> th{0.3, -0.4}, et{0.9, -0.4};
  const cplx v = s_c_factor(s, c, th, et);
  CHECK_THAT(v.real(), WithinAbs(0.17465861464656976, 1e-14));
  CHECK_THAT(v.imag(), WithinAbs(-0.98462905113029295, 1e-14));

  // free case: S_C = 1 and R_C vanishes unless C is empty
  CHECK(s_c_factor(ScatteringModel::free(), c, th, et) == cplx(1.0));
  CHECK(r_c_factor(ScatteringModel::free(), c, th, et) == cplx(0.0));
  CHECK(r_c_factor(ScatteringModel::free(), Contraction::empty(2, 2), th, et) == cplx(1.0));
  CHECK_THROWS_AS(s_c_factor(s, c, std::vector<double>{0.1}, et), InputError);
}

TEST_CASE("S_C equals S^sigma S^rho on the support of delta_C", "[contractions]") {
  const std::vector<double> pts{-0.6, 0.2, 0.7};
  const ScatteringTable t(ScatteringModel::sinh_exp(1.7), pts);
  for (const auto& c : enumerate_contractions(3, 2)) {
    const auto [sigma, rho] = sigma_rho(c);
    std::vector<int> th(3), et(2);
    for (std::int64_t a = 0; a < 27; ++a)
      for (std::int64_t b = 0; b < 9; ++b) {
        decode_tuple(a, 3, th);
        decode_tuple(b, 3, et);
        if (!delta_pairs(c, th, et)) continue;
        CHECK(std::abs(s_c_factor(t, c, th, et) - s_sigma(t, sigma, th) * s_sigma(t, rho, et)) < 1e-13);
      }
  }
}
