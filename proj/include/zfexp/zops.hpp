#pragma once

#include "zfexp/core.hpp"
#include "zfexp/fock.hpp"
#include "zfexp/kernel.hpp"

#include <vector>

namespace zfexp {

// Sesquilinear form on the truncated Fock space, stored as a dense matrix in
// the full tensor basis. Block (l, k) maps sector k to sector l. Forms built
// by this library annihilate the non-symmetric complement.
struct QuadraticForm {
  FockLayout layout;
  CMatrix matrix;

  QuadraticForm() = default;
  explicit QuadraticForm(FockLayout l) : layout(std::move(l)), matrix(CMatrix::Zero(layout.total_dim(), layout.total_dim())) {}
  QuadraticForm(FockLayout l, CMatrix m) : layout(std::move(l)), matrix(std::move(m)) {
    if (matrix.rows() != layout.total_dim() || matrix.cols() != layout.total_dim())
      throw InputError("form matrix does not match the Fock layout");
  }

  int truncation() const { return layout.truncation(); }

  auto block(int out, int in) {
    return matrix.block(layout.offset(out), layout.offset(in), layout.sector_dim(out), layout.sector_dim(in));
  }
  auto block(int out, int in) const {
    return matrix.block(layout.offset(out), layout.offset(in), layout.sector_dim(out), layout.sector_dim(in));
  }

  QuadraticForm adjoint() const { return {layout, matrix.adjoint()}; }

  /// Matrix element <chi, A psi>.
  cplx operator()(const FockState& chi, const FockState& psi) const {
    return chi.amplitudes.dot(matrix * psi.amplitudes);
  }

  FockState apply(const FockState& psi) const {
    FockState out = psi;
    out.amplitudes = matrix * psi.amplitudes;
    return out;
  }

  /// Largest block Frobenius norm; the scale for relative residuals.
  double scale() const {
    double s = 0.0;
    for (int l = 0; l <= truncation(); ++l)
      for (int k = 0; k <= truncation(); ++k) s = std::max(s, block(l, k).norm());
    return s;
  }

  /// Smallest and largest particle-number change l - k over non-zero blocks.
  std::pair<int, int> particle_change_range() const {
    int lo = truncation() + 1, hi = -truncation() - 1;
    for (int l = 0; l <= truncation(); ++l)
      for (int k = 0; k <= truncation(); ++k)
        if (block(l, k).cwiseAbs().maxCoeff() > 0.0) {
          lo = std::min(lo, l - k);
          hi = std::max(hi, l - k);
        }
    if (lo > hi) return {0, 0};
    return {lo, hi};
  }

  QuadraticForm& operator+=(const QuadraticForm& o) {
    require_same(o);
    matrix += o.matrix;
    return *this;
  }
  QuadraticForm& operator-=(const QuadraticForm& o) {
    require_same(o);
    matrix -= o.matrix;
    return *this;
  }
  QuadraticForm& operator*=(cplx c) {
    matrix *= c;
    return *this;
  }

  friend QuadraticForm operator+(QuadraticForm a, const QuadraticForm& b) { return a += b; }
  friend QuadraticForm operator-(QuadraticForm a, const QuadraticForm& b) { return a -= b; }
  friend QuadraticForm operator*(cplx c, QuadraticForm a) { return a *= c; }
  friend QuadraticForm operator*(const QuadraticForm& a, const QuadraticForm& b) {
    a.require_same(b);
    return {a.layout, a.matrix * b.matrix};
  }

  void require_same(const QuadraticForm& o) const {
    if (!(layout == o.layout)) throw InputError("forms live on different Fock spaces");
  }
};

/// True when the truncated product a*b can differ from the untruncated one:
/// b raises particle number (into a dropped sector K+1) and a lowers it again.
inline bool product_overflow(const QuadraticForm& a, const QuadraticForm& b) {
  return b.particle_change_range().second >= 1 && a.particle_change_range().first <= -1;
}

/// Restriction to input sectors 0..kmax (other columns zeroed).
inline QuadraticForm restrict_input(const QuadraticForm& a, int kmax) {
  QuadraticForm out = a;
  for (int k = kmax + 1; k <= a.truncation(); ++k)
    out.matrix.middleCols(a.layout.offset(k), a.layout.sector_dim(k)).setZero();
  return out;
}

/// Restriction to output sectors 0..lmax.
inline QuadraticForm restrict_output(const QuadraticForm& a, int lmax) {
  QuadraticForm out = a;
  for (int l = lmax + 1; l <= a.truncation(); ++l)
    out.matrix.middleRows(a.layout.offset(l), a.layout.sector_dim(l)).setZero();
  return out;
}

inline QuadraticForm identity_form(const FockSpace& space) { return {space.layout(), space.full_projector()}; }

inline QuadraticForm zero_form(const FockSpace& space) { return QuadraticForm(space.layout()); }

/// A projected onto the S-symmetric subspace from both sides.
inline QuadraticForm project_form(const FockSpace& space, const QuadraticForm& a) {
  const CMatrix p = space.full_projector();
  return {a.layout, p * a.matrix * p};
}

template <class T>
struct WithOverflow {
  T value;
  bool overflow = false;
};

namespace detail {

inline void require_one_particle(const FockSpace& space, const CVector& f) {
  if (f.size() != space.grid_size()) throw InputError("one-particle vector does not match grid size");
}

inline void require_state_on(const FockSpace& space, const FockState& s) {
  if (!(s.layout == space.layout())) throw InputError("state does not live on this Fock space");
}

}  // namespace detail

/// z^dagger(f): sector n of the result is sqrt(n) P_n^S (f (x) psi_{n-1}).
/// Content pushed to sector K+1 is dropped and flagged.
inline WithOverflow<FockState> create(const FockSpace& space, const CVector& f, const FockState& state) {
  detail::require_one_particle(space, f);
  detail::require_state_on(space, state);
  const int K = space.truncation();
  WithOverflow<FockState> out{FockState(state.grid, K), false};
  for (int n = 1; n <= K; ++n) {
    const auto prev = state.sector(n - 1);
    CVector t(f.size() * prev.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) t.segment(i * prev.size(), prev.size()) = f(i) * prev;
    out.value.sector(n) = std::sqrt(static_cast<double>(n)) * (space.projector(n) * t);
  }
  out.overflow = state.sector(K).norm() > 0.0 && f.norm() > 0.0;
  return out;
}

/// z(f): sector n of the result is sqrt(n+1) sum_theta f(theta) psi_{n+1}(theta, .).
inline FockState annihilate(const FockSpace& space, const CVector& f, const FockState& state) {
  detail::require_one_particle(space, f);
  detail::require_state_on(space, state);
  const int K = space.truncation();
  const int N = space.grid_size();
  FockState out(state.grid, K);
  for (int n = 0; n < K; ++n) {
    const auto src = state.sector(n + 1);
    const auto rest = ipow(N, n);
    CVector acc = CVector::Zero(rest);
    for (int t = 0; t < N; ++t) acc += f(t) * src.segment(t * rest, rest);
    out.sector(n) = std::sqrt(static_cast<double>(n + 1)) * acc;
  }
  return out;
}

/// Matrix of z^dagger(f) on the whole truncated space.
inline QuadraticForm creator_form(const FockSpace& space, const CVector& f) {
  detail::require_one_particle(space, f);
  QuadraticForm a(space.layout());
  for (int n = 1; n <= space.truncation(); ++n) {
    const auto rest = ipow(space.grid_size(), n - 1);
    CMatrix raise = CMatrix::Zero(ipow(space.grid_size(), n), rest);
    for (int t = 0; t < space.grid_size(); ++t)
      raise.block(t * rest, 0, rest, rest).diagonal().setConstant(f(t));
    a.block(n, n - 1) = std::sqrt(static_cast<double>(n)) * space.projector(n) * raise * space.projector(n - 1);
  }
  return a;
}

/// Matrix of z(f); equals creator_form(conj f)^*.
inline QuadraticForm annihilator_form(const FockSpace& space, const CVector& f) {
  return creator_form(space, f.conjugate()).adjoint();
}

inline CVector basis_vector(int grid_size, int i) {
  CVector e = CVector::Zero(grid_size);
  e(i) = 1.0;
  return e;
}

// A family of creation operators z^dagger(theta_i), one per grid point, on a
// particle-number-graded truncated space, together with the scattering
// function their exchange relations carry. The S-symmetric Fock space gives
// one; the warped free space gives another.
struct Realization {
  RapidityGrid grid;
  FockLayout layout;
  ScatteringModel model;
  std::vector<QuadraticForm> creators;
  CMatrix unit;  // identity on the physical subspace

  const QuadraticForm& creator(int i) const { return creators.at(i); }
  QuadraticForm annihilator(int i) const { return creators.at(i).adjoint(); }
  QuadraticForm identity() const { return {layout, unit}; }
};

inline Realization realization(const FockSpace& space) {
  Realization r{space.grid(), space.layout(), space.model(), {}, space.full_projector()};
  for (int i = 0; i < space.grid_size(); ++i) r.creators.push_back(creator_form(space, basis_vector(space.grid_size(), i)));
  return r;
}

/// Kernel z^{dagger m} z^n(f) as an explicit operator product
/// sum_{theta,eta} f(theta,eta) z^dagger(theta_1)...z^dagger(theta_m) z(eta_1)...z(eta_n).
/// Exact on every block whose output sector is <= K.
inline QuadraticForm monomial_form(const Realization& r, const KernelTensor& f) {
  const int N = r.grid.size();
  if (f.grid_size != N) throw InputError("kernel grid size does not match realization");
  QuadraticForm out(r.layout);
  std::vector<QuadraticForm> annihilators;
  for (int i = 0; i < N; ++i) annihilators.push_back(r.annihilator(i));
  std::vector<int> idx(f.rank());
  for (Eigen::Index flat = 0; flat < f.values.size(); ++flat) {
    if (f.values(flat) == 0.0) continue;
    decode_tuple(flat, N, idx);
    CMatrix prod = r.unit;
    for (int s = f.rank() - 1; s >= 0; --s)
      prod = (s < f.m ? r.creators[idx[s]].matrix : annihilators[idx[s]].matrix) * prod;
    out.matrix += f.values(flat) * prod;
  }
  return out;
}

/// Kernel with its eta slots reversed, as a grid^m x grid^n matrix.
inline CMatrix reversed_eta_matrix(const KernelTensor& f) {
  const CMatrix mat = f.as_matrix();
  CMatrix out(mat.rows(), mat.cols());
  for (Eigen::Index c = 0; c < mat.cols(); ++c) out.col(c) = mat.col(reversed_index(c, f.grid_size, f.n));
  return out;
}

/// Closed-form z^{dagger m} z^n(f): block (k-n+m, k), k >= n, equals
/// sqrt(k!(k-n+m)!)/(k-n)! P (f~ (x) 1) P with f~(theta, eta) = f(theta, reversed eta).
inline QuadraticForm zmzn_form(const FockSpace& space, const KernelTensor& f) {
  const int K = space.truncation();
  const int N = space.grid_size();
  if (f.grid_size != N) throw InputError("kernel grid size does not match Fock space");
  if (f.m > K || f.n > K) throw InputError("kernel order exceeds truncation");
  const CMatrix frev = reversed_eta_matrix(f);
  QuadraticForm out(space.layout());
  for (int k = f.n; k <= K; ++k) {
    const int l = k - f.n + f.m;
    if (l > K) break;
    const auto rest = ipow(N, k - f.n);
    CMatrix core = CMatrix::Zero(ipow(N, l), ipow(N, k));
    for (Eigen::Index r = 0; r < frev.rows(); ++r)
      for (Eigen::Index c = 0; c < frev.cols(); ++c) {
        if (frev(r, c) == 0.0) continue;
        core.block(r * rest, c * rest, rest, rest).diagonal().array() += frev(r, c);
      }
    const double pref = std::sqrt(factorial(k) * factorial(l)) / factorial(k - f.n);
    out.block(l, k) = pref * space.projector(l) * core * space.projector(k);
  }
  return out;
}

/// f*(theta, eta) = conj f(eta_m..eta_1, theta_n..theta_1), an (n, m) kernel.
inline KernelTensor kernel_adjoint(const KernelTensor& f) {
  KernelTensor out(f.n, f.m, f.grid_size);
  std::vector<int> idx(f.rank()), src(f.rank());
  for (Eigen::Index flat = 0; flat < out.values.size(); ++flat) {
    decode_tuple(flat, f.grid_size, idx);
    // idx = (theta_1..theta_n, eta_1..eta_m) of the adjoint.
    for (int j = 0; j < f.m; ++j) src[j] = idx[f.n + f.m - 1 - j];
    for (int j = 0; j < f.n; ++j) src[f.m + j] = idx[f.n - 1 - j];
    out.values(flat) = std::conj(f.values(encode_tuple(src, f.grid_size)));
  }
  return out;
}

inline QuadraticForm adjoint_form(const QuadraticForm& a) { return a.adjoint(); }

/// exp(-omega(E)) over grid^k tuples.
inline Eigen::VectorXd tuple_damping(const RapidityGrid& grid, int k, const Indicatrix& omega) {
  const auto dim = ipow(grid.size(), k);
  Eigen::VectorXd w(dim);
  std::vector<int> idx(k);
  for (std::int64_t t = 0; t < dim; ++t) {
    decode_tuple(t, grid.size(), idx);
    double e = 0.0;
    for (int i : idx) e += std::cosh(grid[i]);
    w(t) = std::exp(-omega(e));
  }
  return w;
}

/// ||f||_{m x n}: the kernel's operator norm from l2(grid^n) to l2(grid^m).
inline double cross_norm_plain(const KernelTensor& f) { return operator_norm(f.as_matrix()); }

/// ||f||^omega_{m x n} = 1/2 ||e^{-omega(E(theta))} f|| + 1/2 ||f e^{-omega(E(eta))}||.
inline double cross_norm(const KernelTensor& f, const RapidityGrid& grid, const Indicatrix& omega) {
  if (f.grid_size != grid.size()) throw InputError("kernel grid size does not match grid");
  const CMatrix mat = f.as_matrix();
  const Eigen::VectorXd left = tuple_damping(grid, f.m, omega);
  const Eigen::VectorXd right = tuple_damping(grid, f.n, omega);
  return 0.5 * operator_norm(left.cast<cplx>().asDiagonal() * mat) +
         0.5 * operator_norm(mat * right.cast<cplx>().asDiagonal());
}

/// ||g||^omega_2 = ||e^{omega(E)} g||_2 for a tensor g over grid^k.
inline double omega_l2_norm(const CVector& g, const RapidityGrid& grid, int k, const Indicatrix& omega) {
  const Eigen::VectorXd w = tuple_damping(grid, k, omega);
  return g.cwiseQuotient(w.cast<cplx>()).norm();
}

/// ||A||^omega_n = 1/2 ||P_n A e^{-omega(H/mu)} P_n|| + 1/2 ||P_n e^{-omega(H/mu)} A P_n||
/// with P_n the projector onto S-symmetric sectors 0..n.
inline double qform_norm(const FockSpace& space, const QuadraticForm& a, int n, const Indicatrix& omega) {
  if (n < 0 || n > space.truncation()) throw InputError("qform_norm: n must lie in 0..K");
  const auto d = space.layout().offset(n) + space.layout().sector_dim(n);
  const CMatrix p = space.full_projector().topLeftCorner(d, d);
  const Eigen::VectorXd w = omega_weights(space.grid(), space.layout(), omega, -1).head(d);
  const CMatrix sub = a.matrix.topLeftCorner(d, d);
  const CMatrix wd = w.cast<cplx>().asDiagonal();
  return 0.5 * operator_norm(p * sub * wd * p) + 0.5 * operator_norm(p * wd * sub * p);
}

}  // namespace zfexp
