#pragma once

#include "zfexp/core.hpp"
#include "zfexp/permutation.hpp"
#include "zfexp/scattering.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace zfexp {

// A pairing of creation slots 1..m with annihilation slots m+1..m+n.
// Pairs (l, r) are 1-based and kept sorted by r.
class Contraction {
 public:
  using Pair = std::pair<int, int>;

  Contraction() = default;

  Contraction(int m, int n, std::vector<Pair> pairs) : m_(m), n_(n), pairs_(std::move(pairs)) {
    if (m < 0 || n < 0) throw InputError("contraction shape must be non-negative");
    std::vector<char> left(m + 1, 0), right(m + n + 1, 0);
    for (auto [l, r] : pairs_) {
      if (l < 1 || l > m || r <= m || r > m + n)
        throw InputError("contraction pair (" + std::to_string(l) + "," + std::to_string(r) +
                         ") out of range for m=" + std::to_string(m) + ", n=" + std::to_string(n));
      if (left[l] || right[r]) throw InputError("contraction indices must be pairwise distinct");
      left[l] = right[r] = 1;
    }
    std::sort(pairs_.begin(), pairs_.end(), [](const Pair& a, const Pair& b) { return a.second < b.second; });
  }

  static Contraction empty(int m, int n) { return Contraction(m, n, {}); }

  int m() const { return m_; }
  int n() const { return n_; }
  int length() const { return static_cast<int>(pairs_.size()); }
  const std::vector<Pair>& pairs() const { return pairs_; }

  bool left_contracted(int l) const {
    return std::any_of(pairs_.begin(), pairs_.end(), [&](const Pair& p) { return p.first == l; });
  }
  bool right_contracted(int r) const {
    return std::any_of(pairs_.begin(), pairs_.end(), [&](const Pair& p) { return p.second == r; });
  }

  /// Uncontracted creation slots, increasing, 1-based.
  std::vector<int> free_left() const {
    std::vector<int> out;
    for (int l = 1; l <= m_; ++l)
      if (!left_contracted(l)) out.push_back(l);
    return out;
  }

  /// Uncontracted annihilation slots, increasing, in m+1..m+n.
  std::vector<int> free_right() const {
    std::vector<int> out;
    for (int r = m_ + 1; r <= m_ + n_; ++r)
      if (!right_contracted(r)) out.push_back(r);
    return out;
  }

  std::string to_string() const {
    std::string s = "(" + std::to_string(m_) + "," + std::to_string(n_) + ",{";
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      if (i) s += ",";
      s += "(" + std::to_string(pairs_[i].first) + "," + std::to_string(pairs_[i].second) + ")";
    }
    return s + "})";
  }

  friend bool operator==(const Contraction&, const Contraction&) = default;

 private:
  int m_ = 0;
  int n_ = 0;
  std::vector<Pair> pairs_;
};

namespace detail {

inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> pick(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      fn(pick);
      return;
    }
    for (int i = start; i <= n - (k - depth); ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

}  // namespace detail

/// All contractions of shape (m, n), by length, then left subset, right subset
/// and matching.
inline std::vector<Contraction> enumerate_contractions(int m, int n) {
  if (m < 0 || n < 0) throw InputError("contraction shape must be non-negative");
  std::vector<Contraction> out;
  for (int k = 0; k <= std::min(m, n); ++k) {
    detail::for_each_subset(m, k, [&](const std::vector<int>& ls) {
      detail::for_each_subset(n, k, [&](const std::vector<int>& rs) {
        std::vector<int> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        do {
          std::vector<Contraction::Pair> pairs;
          for (int j = 0; j < k; ++j) pairs.emplace_back(ls[j] + 1, m + rs[perm[j]] + 1);
          out.emplace_back(m, n, std::move(pairs));
        } while (std::next_permutation(perm.begin(), perm.end()));
      });
    });
  }
  return out;
}

/// sum_k C(m,k) C(n,k) k!
inline std::int64_t contraction_count(int m, int n) {
  double s = 0.0;
  for (int k = 0; k <= std::min(m, n); ++k) s += binomial(m, k) * binomial(n, k) * factorial(k);
  return static_cast<std::int64_t>(std::llround(s));
}

namespace detail {

inline void require_args(const Contraction& c, std::size_t theta, std::size_t eta) {
  if (static_cast<int>(theta) != c.m() || static_cast<int>(eta) != c.n())
    throw InputError("argument tuple lengths do not match contraction shape");
}

// S^(m)_{a,b} over xi = (theta, eta), 1-based, with diff(a, b) = S(xi_a - xi_b)
// on zero-based positions.
template <class Diff>
cplx s_m(int m, int a, int b, Diff&& diff) {
  const bool across = (a <= m && m < b) || (b <= m && m < a);
  return across ? diff(b - 1, a - 1) : diff(a - 1, b - 1);
}

template <class Diff>
cplx s_c_with(const Contraction& c, Diff&& diff) {
  const int m = c.m();
  cplx r = 1.0;
  for (auto [l, rr] : c.pairs())
    for (int p = l + 1; p <= rr - 1; ++p) r *= s_m(m, p, l, diff);
  for (auto [li, ri] : c.pairs())
    for (auto [lj, rj] : c.pairs())
      if (ri < rj && li < lj) r *= s_m(m, lj, ri, diff);
  return r;
}

template <class Diff>
cplx r_c_with(const Contraction& c, Diff&& diff) {
  const int m = c.m();
  cplx r = 1.0;
  for (auto [l, rr] : c.pairs()) {
    (void)rr;
    cplx prod = 1.0;
    for (int p = 1; p <= m + c.n(); ++p) prod *= s_m(m, l, p, diff);
    r *= 1.0 - prod;
  }
  return r;
}

}  // namespace detail

/// delta_C on grid tuples: 1 iff theta_{l_j} = eta_{r_j - m} for every pair.
inline int delta_pairs(const Contraction& c, std::span<const int> theta, std::span<const int> eta) {
  detail::require_args(c, theta.size(), eta.size());
  for (auto [l, r] : c.pairs())
    if (theta[l - 1] != eta[r - c.m() - 1]) return 0;
  return 1;
}

/// S_C on rapidity values.
inline cplx s_c_factor(const ScatteringModel& model, const Contraction& c, std::span<const double> theta,
                       std::span<const double> eta) {
  detail::require_args(c, theta.size(), eta.size());
  std::vector<double> xi(theta.begin(), theta.end());
  xi.insert(xi.end(), eta.begin(), eta.end());
  return detail::s_c_with(c, [&](int a, int b) { return model(xi[a] - xi[b]); });
}

/// S_C on grid tuples.
inline cplx s_c_factor(const ScatteringTable& table, const Contraction& c, std::span<const int> theta,
                       std::span<const int> eta) {
  detail::require_args(c, theta.size(), eta.size());
  std::vector<int> xi(theta.begin(), theta.end());
  xi.insert(xi.end(), eta.begin(), eta.end());
  return detail::s_c_with(c, [&](int a, int b) { return table(xi[a], xi[b]); });
}

/// R_C = prod_j (1 - prod_{p=1}^{m+n} S^(m)_{l_j,p}) on rapidity values.
inline cplx r_c_factor(const ScatteringModel& model, const Contraction& c, std::span<const double> theta,
                       std::span<const double> eta) {
  detail::require_args(c, theta.size(), eta.size());
  std::vector<double> xi(theta.begin(), theta.end());
  xi.insert(xi.end(), eta.begin(), eta.end());
  return detail::r_c_with(c, [&](int a, int b) { return model(xi[a] - xi[b]); });
}

inline cplx r_c_factor(const ScatteringTable& table, const Contraction& c, std::span<const int> theta,
                       std::span<const int> eta) {
  detail::require_args(c, theta.size(), eta.size());
  std::vector<int> xi(theta.begin(), theta.end());
  xi.insert(xi.end(), eta.begin(), eta.end());
  return detail::r_c_with(c, [&](int a, int b) { return table(xi[a], xi[b]); });
}

/// C followed by C', whose indices are renumbered into the free slots of C.
inline Contraction compose(const Contraction& c, const Contraction& cp) {
  const int k = c.length();
  if (cp.m() != c.m() - k || cp.n() != c.n() - k)
    throw InputError("compose: second contraction must have shape (m-|C|, n-|C|)");
  const auto fl = c.free_left();
  const auto fr = c.free_right();
  auto pairs = c.pairs();
  for (auto [l, r] : cp.pairs()) pairs.emplace_back(fl[l - 1], fr[r - cp.m() - 1]);
  return Contraction(c.m(), c.n(), std::move(pairs));
}

/// Splits d into (C, C') with C the pairs selected by `mask` and compose(C, C') == d.
inline std::pair<Contraction, Contraction> split(const Contraction& d, std::uint32_t mask) {
  std::vector<Contraction::Pair> first, rest;
  for (int j = 0; j < d.length(); ++j) (mask >> j & 1u ? first : rest).push_back(d.pairs()[j]);
  Contraction c(d.m(), d.n(), first);
  const auto fl = c.free_left();
  const auto fr = c.free_right();
  std::vector<Contraction::Pair> renumbered;
  const int mp = d.m() - c.length();
  for (auto [l, r] : rest) {
    const int li = static_cast<int>(std::find(fl.begin(), fl.end(), l) - fl.begin()) + 1;
    const int ri = static_cast<int>(std::find(fr.begin(), fr.end(), r) - fr.begin()) + 1;
    renumbered.emplace_back(li, mp + ri);
  }
  return {c, Contraction(mp, d.n() - c.length(), std::move(renumbered))};
}

/// C^J = (n, m, {(r_j - m, l_j + n)}).
inline Contraction reflect_contraction(const Contraction& c) {
  std::vector<Contraction::Pair> pairs;
  for (auto [l, r] : c.pairs()) pairs.emplace_back(r - c.m(), l + c.n());
  return Contraction(c.n(), c.m(), std::move(pairs));
}

/// Canonical permutations with delta_C S_C = delta_C S^sigma(theta) S^rho(eta).
/// sigma lists the free left slots, then l_1..l_k; rho lists r_k..r_1, then
/// the free right slots (shifted to 1..n).
inline std::pair<Permutation, Permutation> sigma_rho(const Contraction& c) {
  std::vector<int> sigma, rho;
  for (int l : c.free_left()) sigma.push_back(l);
  for (auto [l, r] : c.pairs()) sigma.push_back(l);
  for (auto it = c.pairs().rbegin(); it != c.pairs().rend(); ++it) rho.push_back(it->second - c.m());
  for (int r : c.free_right()) rho.push_back(r - c.m());
  return {Permutation::from_images(sigma), Permutation::from_images(rho)};
}

/// The free arguments (theta^, eta^) left after removing contracted slots.
inline std::pair<std::vector<int>, std::vector<int>> free_arguments(const Contraction& c, std::span<const int> theta,
                                                                    std::span<const int> eta) {
  detail::require_args(c, theta.size(), eta.size());
  std::vector<int> t, e;
  for (int l : c.free_left()) t.push_back(theta[l - 1]);
  for (int r : c.free_right()) e.push_back(eta[r - c.m() - 1]);
  return {t, e};
}

}  // namespace zfexp
