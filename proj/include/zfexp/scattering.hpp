#pragma once

#include "zfexp/core.hpp"
#include "zfexp/kernel.hpp"
#include "zfexp/permutation.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zfexp {

enum class ScatteringFamily { Free, Ising, SinhExp, Tabulated };

inline std::string to_string(ScatteringFamily f) {
  switch (f) {
    case ScatteringFamily::Free: return "free";
    case ScatteringFamily::Ising: return "ising";
    case ScatteringFamily::SinhExp: return "sinh_exp";
    case ScatteringFamily::Tabulated: return "table";
  }
  return "unknown";
}

// Two-particle scattering function S of a rapidity difference. Immutable.
//
// Built-in families: Free (S = 1), Ising (S = -1) and SinhExp
// (S(t) = exp(i a sinh t)). Tabulated models hold S at a finite set of
// rapidity differences closed under t -> -t and are validated on
// construction against |S| = 1 and S(-t) = conj S(t).
class ScatteringModel {
 public:
  struct Sample {
    double theta;
    cplx value;
  };

  static ScatteringModel free() { return ScatteringModel(ScatteringFamily::Free, 0.0); }
  static ScatteringModel ising() { return ScatteringModel(ScatteringFamily::Ising, 0.0); }
  static ScatteringModel sinh_exp(double a) {
    require_finite(a, "sinh_exp parameter a");
    return ScatteringModel(ScatteringFamily::SinhExp, a);
  }

  /// Validating constructor; throws InputError listing the first violation.
  static ScatteringModel tabulated(std::vector<Sample> samples, double tol = 1e-12) {
    ScatteringModel m = tabulated_unchecked(std::move(samples));
    if (auto err = m.table_violation(tol)) throw InputError(*err);
    return m;
  }

  /// No invariant checks; used to report broken tables instead of rejecting them.
  static ScatteringModel tabulated_unchecked(std::vector<Sample> samples) {
    ScatteringModel m(ScatteringFamily::Tabulated, 0.0);
    std::sort(samples.begin(), samples.end(),
              [](const Sample& x, const Sample& y) { return x.theta < y.theta; });
    m.table_ = std::move(samples);
    return m;
  }

  ScatteringFamily family() const { return family_; }
  double a() const { return a_; }
  bool conjugated() const { return conjugated_; }
  const std::vector<Sample>& table() const { return table_; }

  /// The model for S^{-1}(t) = conj S(t).
  ScatteringModel inverse() const {
    ScatteringModel m = *this;
    m.conjugated_ = !m.conjugated_;
    return m;
  }

  cplx operator()(double theta) const {
    require_finite(theta, "rapidity");
    cplx s = raw(theta);
    return conjugated_ ? std::conj(s) : s;
  }

  std::string name() const {
    std::string base = to_string(family_);
    if (family_ == ScatteringFamily::SinhExp) base += "(a=" + std::to_string(a_) + ")";
    return conjugated_ ? base + "^-1" : base;
  }

  /// Describes the first broken axiom of a table, if any.
  std::optional<std::string> table_violation(double tol = 1e-12) const {
    for (const Sample& s : table_) {
      if (!std::isfinite(s.theta) || !std::isfinite(s.value.real()) ||
          !std::isfinite(s.value.imag()))
        return "non-finite entry in scattering table";
      if (std::abs(std::abs(s.value) - 1.0) > tol)
        return "|S(" + std::to_string(s.theta) + ")| != 1";
      const Sample* mirror = find(-s.theta);
      if (mirror == nullptr)
        return "scattering table lacks S(" + std::to_string(-s.theta) + ")";
      if (std::abs(mirror->value - std::conj(s.value)) > tol)
        return "S(-t) != conj S(t) at t=" + std::to_string(s.theta);
    }
    return std::nullopt;
  }

  /// Largest | |S(t)| - 1 | over the table; 0 for built-ins.
  double table_unitarity_residual() const {
    double r = 0.0;
    for (const Sample& s : table_) r = std::max(r, std::abs(std::abs(s.value) - 1.0));
    return r;
  }

 private:
  ScatteringModel(ScatteringFamily f, double a) : family_(f), a_(a) {}

  const Sample* find(double theta) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(theta));
    auto it = std::lower_bound(table_.begin(), table_.end(), theta - tol,
                               [](const Sample& s, double t) { return s.theta < t; });
    if (it != table_.end() && std::abs(it->theta - theta) <= tol) return &*it;
    return nullptr;
  }

  cplx raw(double theta) const {
    switch (family_) {
      case ScatteringFamily::Free: return 1.0;
      case ScatteringFamily::Ising: return -1.0;
      case ScatteringFamily::SinhExp: return std::polar(1.0, a_ * std::sinh(theta));
      case ScatteringFamily::Tabulated: {
        const Sample* s = find(theta);
        if (s == nullptr)
          throw InputError("scattering table has no entry for t=" + std::to_string(theta));
        return s->value;
      }
    }
    return 1.0;
  }

  ScatteringFamily family_;
  double a_ = 0.0;
  bool conjugated_ = false;
  std::vector<Sample> table_;
};

inline cplx eval_s(const ScatteringModel& model, double theta) { return model(theta); }

// S(theta_i - theta_j) tabulated over a rapidity grid.
class ScatteringTable {
 public:
  ScatteringTable(const ScatteringModel& model, std::span<const double> points)
      : n_(static_cast<int>(points.size())), values_(n_, n_) {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) values_(i, j) = model(points[i] - points[j]);
  }

  cplx operator()(int i, int j) const { return values_(i, j); }
  int size() const { return n_; }

 private:
  int n_;
  CMatrix values_;
};

namespace detail {

// Product over inversions of sigma of S(x_sigma(i) - x_sigma(j)), with
// `diff(a, b)` returning S(x_a - x_b).
template <class Diff>
cplx s_sigma_with(const Permutation& sigma, Diff&& diff) {
  cplx r = 1.0;
  for (auto [i, j] : sigma.inversions()) r *= diff(sigma(i), sigma(j));
  return r;
}

}  // namespace detail

/// S^sigma(theta) = prod_{i<j, sigma(i)>sigma(j)} S(theta_sigma(i) - theta_sigma(j)).
inline cplx s_sigma(const ScatteringModel& model, const Permutation& sigma,
                    std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != sigma.size())
    throw InputError("s_sigma: rapidity vector length does not match permutation size");
  return detail::s_sigma_with(sigma, [&](int a, int b) { return model(theta[a] - theta[b]); });
}

/// S^sigma on a grid tuple given by point indices.
inline cplx s_sigma(const ScatteringTable& table, const Permutation& sigma,
                    std::span<const int> idx) {
  if (static_cast<int>(idx.size()) != sigma.size())
    throw InputError("s_sigma: tuple length does not match permutation size");
  return detail::s_sigma_with(sigma, [&](int a, int b) { return table(idx[a], idx[b]); });
}

namespace detail {

inline void require_tensor_on_grid(const KernelTensor& f, const ScatteringTable& table) {
  if (f.grid_size != table.size()) throw InputError("tensor grid size does not match grid");
}

// Averages D(pi) f over permutations pi of the listed zero-based slots, the
// S-factor being S^pi of the sub-tuple on those slots.
inline KernelTensor average_over_slots(const ScatteringTable& table, const KernelTensor& f,
                                       const std::vector<int>& slots) {
  const int rank = f.rank();
  const int k = static_cast<int>(slots.size());
  if (k <= 1) return f;
  const auto perms = all_permutations(k);
  KernelTensor out(f.m, f.n, f.grid_size);
  std::vector<int> idx(rank), src(rank), sub(k);
  const double norm = 1.0 / static_cast<double>(perms.size());
  for (Eigen::Index flat = 0; flat < f.values.size(); ++flat) {
    decode_tuple(flat, f.grid_size, idx);
    for (int s = 0; s < k; ++s) sub[s] = idx[slots[s]];
    cplx acc = 0.0;
    for (const auto& pi : perms) {
      src = idx;
      for (int s = 0; s < k; ++s) src[slots[s]] = sub[pi(s)];
      acc += s_sigma(table, pi, sub) * f.values(encode_tuple(src, f.grid_size));
    }
    out.values(flat) = acc * norm;
  }
  return out;
}

}  // namespace detail

/// (D_n(sigma) f)(theta) = S^sigma(theta) f(theta^sigma) over all slots of f.
inline KernelTensor act_d(const ScatteringTable& table, const Permutation& sigma,
                          const KernelTensor& f) {
  detail::require_tensor_on_grid(f, table);
  if (sigma.size() != f.rank()) throw InputError("act_d: permutation size does not match tensor rank");
  KernelTensor out(f.m, f.n, f.grid_size);
  std::vector<int> idx(f.rank());
  for (Eigen::Index flat = 0; flat < f.values.size(); ++flat) {
    decode_tuple(flat, f.grid_size, idx);
    const auto src = sigma.permute<int>(idx);
    out.values(flat) = s_sigma(table, sigma, idx) * f.values(encode_tuple(src, f.grid_size));
  }
  return out;
}

/// S-symmetric part of f with respect to the 1-based slots in `subset`.
inline KernelTensor symmetrize(const ScatteringTable& table, const KernelTensor& f,
                               const std::vector<int>& subset) {
  detail::require_tensor_on_grid(f, table);
  std::vector<int> slots;
  slots.reserve(subset.size());
  for (int s : subset) {
    if (s < 1 || s > f.rank()) throw InputError("symmetrize: slot out of range");
    slots.push_back(s - 1);
  }
  std::sort(slots.begin(), slots.end());
  if (std::adjacent_find(slots.begin(), slots.end()) != slots.end())
    throw InputError("symmetrize: repeated slot");
  return detail::average_over_slots(table, f, slots);
}

/// S-symmetric part with respect to all slots.
inline KernelTensor symmetrize(const ScatteringTable& table, const KernelTensor& f) {
  std::vector<int> all(f.rank());
  std::iota(all.begin(), all.end(), 1);
  return symmetrize(table, f, all);
}

/// Sym_theta Sym_eta: separate symmetrization of the creation and annihilation slots.
inline KernelTensor symmetrize_split(const ScatteringTable& table, const KernelTensor& f) {
  std::vector<int> left(f.m), right(f.n);
  std::iota(left.begin(), left.end(), 1);
  std::iota(right.begin(), right.end(), f.m + 1);
  return symmetrize(table, symmetrize(table, f, left), right);
}

/// The projector P_n^S as a dense grid^n x grid^n matrix.
inline CMatrix symmetrizer_matrix(const ScatteringTable& table, int n) {
  const int N = table.size();
  const auto dim = ipow(N, n);
  CMatrix p = CMatrix::Zero(dim, dim);
  if (n == 0) {
    p(0, 0) = 1.0;
    return p;
  }
  const auto perms = all_permutations(n);
  const double norm = 1.0 / static_cast<double>(perms.size());
  std::vector<int> idx(n);
  for (Eigen::Index row = 0; row < dim; ++row) {
    decode_tuple(row, N, idx);
    for (const auto& sigma : perms) {
      const auto src = sigma.permute<int>(idx);
      p(row, encode_tuple(src, N)) += norm * s_sigma(table, sigma, idx);
    }
  }
  return p;
}

}  // namespace zfexp
