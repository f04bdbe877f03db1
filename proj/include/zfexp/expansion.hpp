#pragma once

#include "zfexp/contractions.hpp"
#include "zfexp/fock.hpp"
#include "zfexp/kernel.hpp"
#include "zfexp/zops.hpp"

#include <map>
#include <optional>
#include <vector>

namespace zfexp {

enum class Side { Left, Right };

/// Left: z^dagger(theta_1) ... z^dagger(theta_m) Omega with contracted slots
/// left out. Right: z^dagger(eta_n) ... z^dagger(eta_1) Omega likewise.
inline FockState contracted_vector(const Realization& r, Side side, const Contraction& c, std::span<const int> args) {
  const int len = side == Side::Left ? c.m() : c.n();
  if (static_cast<int>(args.size()) != len) throw InputError("contracted_vector: argument length mismatch");
  const int free = len - c.length();
  if (free > r.layout.truncation())
    throw InputError("contracted_vector: " + std::to_string(free) + " creators exceed truncation K=" +
                     std::to_string(r.layout.truncation()));
  FockState s = FockState::vacuum(r.grid, r.layout.truncation());
  if (side == Side::Left) {
    for (int i = len; i >= 1; --i)
      if (!c.left_contracted(i)) s = r.creator(args[i - 1]).apply(s);
  } else {
    for (int j = 1; j <= len; ++j)
      if (!c.right_contracted(c.m() + j)) s = r.creator(args[j - 1]).apply(s);
  }
  return s;
}

namespace detail {

// Calls fn(theta, eta, free_theta_flat, free_eta_flat) over the support of
// delta_C: theta runs over grid^m, the free eta slots over grid^(n-|C|), the
// contracted eta slots copy their partner.
template <class Fn>
void for_each_support(const Contraction& c, int N, Fn&& fn) {
  const int m = c.m(), n = c.n(), k = c.length();
  const auto fl = c.free_left();
  const auto fr = c.free_right();
  std::vector<int> theta(m), eta(n), eta_free(n - k), theta_free(m - k);
  for (std::int64_t tf = 0; tf < ipow(N, m); ++tf) {
    decode_tuple(tf, N, theta);
    for (int i = 0; i < m - k; ++i) theta_free[i] = theta[fl[i] - 1];
    const auto tfree = encode_tuple(theta_free, N);
    for (auto [l, r] : c.pairs()) eta[r - m - 1] = theta[l - 1];
    for (std::int64_t ef = 0; ef < ipow(N, n - k); ++ef) {
      decode_tuple(ef, N, eta_free);
      for (int j = 0; j < n - k; ++j) eta[fr[j] - m - 1] = eta_free[j];
      fn(std::span<const int>(theta), std::span<const int>(eta), tfree, ef);
    }
  }
}

}  // namespace detail

// Matrix elements <theta-vector | A eta-vector> for all tuple lengths, with
// the vectors built once per length and cached. Powers f_{m,n}[A] and the
// inversion formula.
class CoefficientExtractor {
 public:
  CoefficientExtractor(Realization r, QuadraticForm a)
      : r_(std::move(r)), a_(std::move(a)), table_(r_.model, r_.grid.points()) {
    if (!(a_.layout == r_.layout)) throw InputError("form does not live on the realization's Fock space");
    const int K = r_.layout.truncation();
    vectors_.resize(K + 1);
    elements_.resize((K + 1) * (K + 1));
  }

  const Realization& realization() const { return r_; }
  const ScatteringTable& table() const { return table_; }
  int truncation() const { return r_.layout.truncation(); }

  /// Column t is the sector-a part of z^dagger(t_1)...z^dagger(t_a) Omega.
  const CMatrix& left_vectors(int a) {
    auto& slot = vectors_.at(a);
    if (!slot) {
      const int N = r_.grid.size();
      if (a == 0) {
        slot = CMatrix::Ones(1, 1);
      } else {
        const CMatrix& prev = left_vectors(a - 1);
        const auto rest = ipow(N, a - 1);
        CMatrix v(ipow(N, a), ipow(N, a));
        for (int t = 0; t < N; ++t) v.middleCols(t * rest, rest) = r_.creator(t).block(a, a - 1) * prev;
        slot = std::move(v);
      }
    }
    return *slot;
  }

  /// G(a, b)[theta, eta] = <theta-vector | A eta-vector>, a grid^a x grid^b matrix.
  const CMatrix& elements(int a, int b) {
    auto& slot = elements_.at(a * (truncation() + 1) + b);
    if (!slot) {
      const CMatrix& left = left_vectors(a);
      const CMatrix& right_raw = left_vectors(b);
      CMatrix right(right_raw.rows(), right_raw.cols());
      for (Eigen::Index c = 0; c < right.cols(); ++c)
        right.col(c) = right_raw.col(reversed_index(c, r_.grid.size(), b));
      slot = CMatrix(left.adjoint() * a_.block(a, b) * right);
    }
    return *slot;
  }

  /// f_{m,n}[A] = sum_C (-1)^|C| delta_C S_C <theta-vector_C | A eta-vector_C>.
  KernelTensor fmn(int m, int n) {
    check_order(m, n);
    const int N = r_.grid.size();
    KernelTensor out(m, n, N);
    for (const auto& c : enumerate_contractions(m, n)) {
      const double sign = c.length() % 2 == 0 ? 1.0 : -1.0;
      const CMatrix& g = elements(m - c.length(), n - c.length());
      detail::for_each_support(c, N, [&](auto theta, auto eta, std::int64_t tf, std::int64_t ef) {
        out.values(encode_tuple(theta, N) * ipow(N, n) + encode_tuple(eta, N)) +=
            sign * s_c_factor(table_, c, theta, eta) * g(tf, ef);
      });
    }
    return out;
  }

  void check_order(int m, int n) const {
    if (m < 0 || n < 0 || m > truncation() || n > truncation())
      throw InputError("coefficient order (" + std::to_string(m) + "," + std::to_string(n) +
                       ") outside 0..K=" + std::to_string(truncation()));
  }

 private:
  Realization r_;
  QuadraticForm a_;
  ScatteringTable table_;
  std::vector<std::optional<CMatrix>> vectors_;
  std::vector<std::optional<CMatrix>> elements_;
};

inline KernelTensor fmn_coefficients(const Realization& r, const QuadraticForm& a, int m, int n) {
  return CoefficientExtractor(r, a).fmn(m, n);
}

inline KernelTensor fmn_coefficients(const FockSpace& space, const QuadraticForm& a, int m, int n) {
  return fmn_coefficients(realization(space), a, m, n);
}

// f_{m,n} for all 0 <= m, n <= K over one grid.
struct CoefficientFamily {
  RapidityGrid grid;
  int truncation = 0;
  std::vector<KernelTensor> entries;

  CoefficientFamily(RapidityGrid g, int K) : grid(std::move(g)), truncation(K) {
    if (K < 0) throw InputError("truncation K must be >= 0");
    for (int m = 0; m <= K; ++m)
      for (int n = 0; n <= K; ++n) entries.emplace_back(m, n, grid.size());
  }

  KernelTensor& at(int m, int n) { return entries.at(index(m, n)); }
  const KernelTensor& at(int m, int n) const { return entries.at(index(m, n)); }

  std::size_t index(int m, int n) const {
    if (m < 0 || n < 0 || m > truncation || n > truncation) throw InputError("coefficient order outside 0..K");
    return static_cast<std::size_t>(m * (truncation + 1) + n);
  }

  /// Largest entry over the family.
  double scale() const {
    double s = 0.0;
    for (const auto& f : entries) s = std::max(s, max_abs(f.values));
    return s;
  }
};

inline CoefficientFamily expand(const Realization& r, const QuadraticForm& a) {
  CoefficientExtractor ex(r, a);
  CoefficientFamily fam(r.grid, r.layout.truncation());
  for (int m = 0; m <= fam.truncation; ++m)
    for (int n = 0; n <= fam.truncation; ++n) fam.at(m, n) = ex.fmn(m, n);
  return fam;
}

inline CoefficientFamily expand(const FockSpace& space, const QuadraticForm& a) { return expand(realization(space), a); }

/// sum_{m,n} 1/(m! n!) z^{dagger m} z^n(f_{m,n}).
inline QuadraticForm reconstruct(const FockSpace& space, const CoefficientFamily& fam) {
  if (fam.truncation != space.truncation() || !(fam.grid == space.grid()))
    throw InputError("coefficient family does not match the Fock space");
  QuadraticForm a(space.layout());
  for (int m = 0; m <= fam.truncation; ++m)
    for (int n = 0; n <= fam.truncation; ++n) {
      const auto& f = fam.at(m, n);
      if (f.values.cwiseAbs().maxCoeff() == 0.0) continue;
      a.matrix += zmzn_form(space, f).matrix / (factorial(m) * factorial(n));
    }
  return a;
}

/// Sym_theta Sym_eta applied to every member.
inline CoefficientFamily symmetrize_family(const ScatteringTable& table, const CoefficientFamily& fam) {
  CoefficientFamily out = fam;
  for (auto& f : out.entries) f = symmetrize_split(table, f);
  return out;
}

/// max over grid tuples of |<theta-vector|A eta-vector> - sum_C delta_C S_C f_{m-|C|,n-|C|}(theta^, eta^)|.
inline double inversion_check(const Realization& r, const QuadraticForm& a, int m, int n) {
  CoefficientExtractor ex(r, a);
  ex.check_order(m, n);
  const int N = r.grid.size();
  CMatrix rhs = CMatrix::Zero(ipow(N, m), ipow(N, n));
  for (const auto& c : enumerate_contractions(m, n)) {
    const KernelTensor f = ex.fmn(m - c.length(), n - c.length());
    const auto cols = ipow(N, n - c.length());
    detail::for_each_support(c, N, [&](auto theta, auto eta, std::int64_t tf, std::int64_t ef) {
      rhs(encode_tuple(theta, N), encode_tuple(eta, N)) += s_c_factor(ex.table(), c, theta, eta) * f.values(tf * cols + ef);
    });
  }
  return max_abs(CMatrix(ex.elements(m, n) - rhs));
}

inline double inversion_check(const FockSpace& space, const QuadraticForm& a, int m, int n) {
  return inversion_check(realization(space), a, m, n);
}

/// U(x, lambda) A U(x, lambda)^* as a form over the grid shifted by +lambda.
inline std::pair<FockSpace, QuadraticForm> transform_form_poincare(const FockSpace& space, const QuadraticForm& a,
                                                                   const Vec2& x, double lambda) {
  require_finite(x(0), "translation x0");
  require_finite(x(1), "translation x1");
  require_finite(lambda, "rapidity shift");
  FockSpace moved(space.grid().shifted(lambda), space.model(), space.truncation());
  const CVector u = translation_phases(moved.grid(), moved.layout(), x);
  return {moved, QuadraticForm(a.layout, u.asDiagonal() * a.matrix * u.conjugate().asDiagonal())};
}

/// Coefficients of U(x, lambda) A U(x, lambda)^*: arrays carried to the grid
/// shifted by +lambda, times exp(i (p(theta) - p(eta)).x) on that grid.
inline CoefficientFamily transform_coeffs_poincare(const CoefficientFamily& fam, const Vec2& x, double lambda) {
  require_finite(x(0), "translation x0");
  require_finite(x(1), "translation x1");
  CoefficientFamily out(fam.grid.shifted(lambda), fam.truncation);
  const int N = fam.grid.size();
  std::vector<double> phase(N);
  for (int i = 0; i < N; ++i) phase[i] = minkowski(momentum(out.grid, out.grid[i]), x);
  for (int m = 0; m <= fam.truncation; ++m)
    for (int n = 0; n <= fam.truncation; ++n) {
      const auto& f = fam.at(m, n);
      auto& g = out.at(m, n);
      std::vector<int> idx(m + n);
      for (Eigen::Index flat = 0; flat < f.values.size(); ++flat) {
        decode_tuple(flat, N, idx);
        double ph = 0.0;
        for (int s = 0; s < m; ++s) ph += phase[idx[s]];
        for (int s = m; s < m + n; ++s) ph -= phase[idx[s]];
        g.values(flat) = std::polar(1.0, ph) * f.values(flat);
      }
    }
  return out;
}

/// J A^* J, defined by <psi, (J A^* J) chi> = <J chi, A J psi>.
inline QuadraticForm reflect_form(const QuadraticForm& a) {
  const auto rev = reversal_map(a.layout);
  const auto D = a.layout.total_dim();
  QuadraticForm out(a.layout);
  for (std::int64_t i = 0; i < D; ++i)
    for (std::int64_t j = 0; j < D; ++j) out.matrix(i, j) = a.matrix(rev[j], rev[i]);
  return out;
}

/// sum_C (-1)^|C| delta_C S_C R_C(theta, eta) f_{n-|C|,m-|C|}(eta^, theta^): the
/// coefficients of J A^* J in terms of those of A.
inline KernelTensor reflected_coeffs(const CoefficientFamily& fam, const ScatteringTable& table, int m, int n) {
  if (m < 0 || n < 0 || m > fam.truncation || n > fam.truncation)
    throw InputError("coefficient order outside 0..K");
  const int N = fam.grid.size();
  KernelTensor out(m, n, N);
  for (const auto& c : enumerate_contractions(m, n)) {
    const int k = c.length();
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    const auto& f = fam.at(n - k, m - k);
    const auto cols = ipow(N, m - k);
    detail::for_each_support(c, N, [&](auto theta, auto eta, std::int64_t tf, std::int64_t ef) {
      const cplx factor = s_c_factor(table, c, theta, eta) * r_c_factor(table, c, theta, eta);
      if (factor == 0.0) return;
      out.values(encode_tuple(theta, N) * ipow(N, n) + encode_tuple(eta, N)) +=
          sign * factor * f.values(ef * cols + tf);
    });
  }
  return out;
}

/// c_mn = sum_C sqrt((m-|C|)! (n-|C|)!).
inline double fmn_bound_constant(int m, int n) {
  double c = 0.0;
  for (int k = 0; k <= std::min(m, n); ++k)
    c += binomial(m, k) * binomial(n, k) * factorial(k) * std::sqrt(factorial(m - k) * factorial(n - k));
  return c;
}

}  // namespace zfexp
