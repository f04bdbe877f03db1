#pragma once

#include "zfexp/expansion.hpp"
#include "zfexp/fock.hpp"
#include "zfexp/zops.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace zfexp {

// Q = -(a / 2 mu^2) [[0, 1], [1, 0]], skew-symmetric for the Minkowski product.
struct SkewSymmetricQ {
  double a = 0.0;
  double mass = 1.0;

  SkewSymmetricQ(double a_, double mass_) : a(a_), mass(mass_) {
    require_finite(a, "deformation parameter a");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw InputError("mass must be positive and finite");
  }

  Vec2 apply(const Vec2& p) const { return -a / (2.0 * mass * mass) * Vec2(p(1), p(0)); }

  /// x Q y = x . (Q y).
  double form(const Vec2& x, const Vec2& y) const { return minkowski(x, apply(y)); }

  SkewSymmetricQ scaled(double c) const { return {c * a, mass}; }

  SkewSymmetricQ operator+(const SkewSymmetricQ& o) const {
    if (o.mass != mass) throw InputError("cannot add deformation matrices for different masses");
    return {a + o.a, mass};
  }
};

// Partition of the tensor basis into total-momentum eigenspaces.
struct MomentumGroups {
  std::vector<int> group_of;     // basis index -> group
  std::vector<Vec2> momentum;    // group -> total momentum
  std::vector<std::vector<std::int64_t>> members;
  bool accidental = false;       // some group joins tuples that are not rearrangements of each other
};

namespace detail {

inline bool momenta_close(const Vec2& x, const Vec2& y, double rel_tol) {
  const double scale = std::max({1.0, x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});
  return (x - y).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

}  // namespace detail

/// Groups basis tuples whose total momenta agree to a relative tolerance.
inline MomentumGroups momentum_groups(const RapidityGrid& grid, const FockLayout& layout, double rel_tol = 1e-12) {
  const Eigen::Matrix2Xd p = basis_momenta(grid, layout);
  MomentumGroups g;
  g.group_of.assign(layout.total_dim(), -1);
  std::vector<std::vector<int>> signature;  // sorted tuple of the first member
  detail::for_each_basis_tuple(layout, [&](std::int64_t i, int, std::span<const int> idx) {
    std::vector<int> sorted(idx.begin(), idx.end());
    std::sort(sorted.begin(), sorted.end());
    const Vec2 pi = p.col(i);
    for (std::size_t k = 0; k < g.momentum.size(); ++k)
      if (detail::momenta_close(g.momentum[k], pi, rel_tol)) {
        g.group_of[i] = static_cast<int>(k);
        g.members[k].push_back(i);
        if (signature[k] != sorted) g.accidental = true;
        return;
      }
    g.group_of[i] = static_cast<int>(g.momentum.size());
    g.momentum.push_back(pi);
    g.members.push_back({i});
    signature.push_back(std::move(sorted));
  });
  return g;
}

enum class SpectralOrder { Right, Left };

/// tau_Q(A) as the finite spectral sum over total-momentum eigenspaces:
/// Right: sum_p U(Qp) A U(Qp)^* E_p.  Left: sum_p E_p U(Qp) A U(Qp)^*.
inline QuadraticForm warp(const QuadraticForm& a, const SkewSymmetricQ& q, const RapidityGrid& grid,
                          SpectralOrder order = SpectralOrder::Right) {
  if (grid.size() != a.layout.grid_size()) throw InputError("grid does not match form");
  const MomentumGroups groups = momentum_groups(grid, a.layout);
  const Eigen::Matrix2Xd p = basis_momenta(grid, a.layout);
  const auto D = a.layout.total_dim();
  QuadraticForm out(a.layout);
  for (std::size_t g = 0; g < groups.momentum.size(); ++g) {
    const Vec2 shift = q.apply(groups.momentum[g]);
    CVector u(D);
    for (std::int64_t i = 0; i < D; ++i) u(i) = std::polar(1.0, minkowski(p.col(i), shift));
    for (std::int64_t k : groups.members[g]) {
      if (order == SpectralOrder::Right) {
        out.matrix.col(k) = u.cwiseProduct(a.matrix.col(k)) * std::conj(u(k));
      } else {
        out.matrix.row(k) = u(k) * a.matrix.row(k).cwiseProduct(u.adjoint());
      }
    }
  }
  return out;
}

// tau_Q for a fixed Q and space, stored as the entrywise factor the spectral
// sum amounts to. Repeated deformations then cost one Hadamard product.
class Warper {
 public:
  Warper(const SkewSymmetricQ& q, const RapidityGrid& grid, const FockLayout& layout) : layout_(layout) {
    QuadraticForm ones(layout, CMatrix::Ones(layout.total_dim(), layout.total_dim()));
    factor_ = warp(ones, q, grid).matrix;
  }

  QuadraticForm operator()(const QuadraticForm& a) const {
    if (!(a.layout == layout_)) throw InputError("form does not live on this Fock space");
    return {layout_, factor_.cwiseProduct(a.matrix)};
  }

  const CMatrix& factor() const { return factor_; }

 private:
  FockLayout layout_;
  CMatrix factor_;
};

// Part of a form that shifts total momentum by `transfer`.
struct HomogeneousComponent {
  Vec2 transfer;
  QuadraticForm part;
};

/// A = sum of components E_p' A E_p grouped by momentum transfer p' - p.
inline std::vector<HomogeneousComponent> momentum_sector_decompose(const QuadraticForm& a, const RapidityGrid& grid,
                                                                   double rel_tol = 1e-12) {
  const MomentumGroups groups = momentum_groups(grid, a.layout, rel_tol);
  std::vector<HomogeneousComponent> out;
  const auto D = a.layout.total_dim();
  for (std::int64_t i = 0; i < D; ++i)
    for (std::int64_t j = 0; j < D; ++j) {
      if (a.matrix(i, j) == 0.0) continue;
      const Vec2 phi = groups.momentum[groups.group_of[i]] - groups.momentum[groups.group_of[j]];
      auto it = std::find_if(out.begin(), out.end(),
                             [&](const HomogeneousComponent& c) { return detail::momenta_close(c.transfer, phi, rel_tol); });
      if (it == out.end()) {
        out.push_back({phi, QuadraticForm(a.layout)});
        it = out.end() - 1;
      }
      it->part.matrix(i, j) = a.matrix(i, j);
    }
  return out;
}

/// max |U(x) A U(x)^* - e^{i phi.x} A| for one component.
inline double homogeneity_residual(const HomogeneousComponent& c, const RapidityGrid& grid, const Vec2& x) {
  const CVector u = translation_phases(grid, c.part.layout, x);
  const CMatrix lhs = u.asDiagonal() * c.part.matrix * u.conjugate().asDiagonal();
  return max_abs(CMatrix(lhs - std::polar(1.0, minkowski(c.transfer, x)) * c.part.matrix));
}

/// [A, B]_Q = AB - tau_{2Q}(tau_{-2Q}(B) tau_{-2Q}(A)), with cached deformations.
class QCommutator {
 public:
  QCommutator(const SkewSymmetricQ& q, const RapidityGrid& grid, const FockLayout& layout)
      : plus_(q.scaled(2.0), grid, layout), minus_(q.scaled(-2.0), grid, layout) {}

  WithOverflow<QuadraticForm> operator()(const QuadraticForm& a, const QuadraticForm& b) const {
    QuadraticForm out = a * b - plus_(minus_(b) * minus_(a));
    return {std::move(out), product_overflow(a, b) || product_overflow(b, a)};
  }

 private:
  Warper plus_;
  Warper minus_;
};

inline WithOverflow<QuadraticForm> q_commutator(const QuadraticForm& a, const QuadraticForm& b, const SkewSymmetricQ& q,
                                                const RapidityGrid& grid) {
  return QCommutator(q, grid, a.layout)(a, b);
}

/// Parity of the particle-number change: 0 even, 1 odd, nullopt if mixed.
/// The zero form counts as even.
inline std::optional<int> parity(const QuadraticForm& a) {
  bool even = false, odd = false;
  for (int l = 0; l <= a.truncation(); ++l)
    for (int k = 0; k <= a.truncation(); ++k)
      if (a.block(l, k).cwiseAbs().maxCoeff() > 0.0) ((l - k) % 2 == 0 ? even : odd) = true;
  if (even && odd) return std::nullopt;
  return odd ? 1 : 0;
}

/// (even part, odd part) with respect to (-1)^N.
inline std::pair<QuadraticForm, QuadraticForm> parity_split(const QuadraticForm& a) {
  QuadraticForm even(a.layout), odd(a.layout);
  for (int l = 0; l <= a.truncation(); ++l)
    for (int k = 0; k <= a.truncation(); ++k) ((l - k) % 2 == 0 ? even : odd).block(l, k) = a.block(l, k);
  return {even, odd};
}

/// Commutator unless both arguments are odd, then anticommutator.
inline QuadraticForm graded_commutator(const QuadraticForm& a, const QuadraticForm& b) {
  const auto pa = parity(a), pb = parity(b);
  if (!pa || !pb) throw InputError("graded commutator needs arguments of definite parity");
  const double s = (*pa == 1 && *pb == 1) ? 1.0 : -1.0;
  return {a.layout, a.matrix * b.matrix + s * (b.matrix * a.matrix)};
}

inline QuadraticForm commutator(const QuadraticForm& a, const QuadraticForm& b) { return a * b - b * a; }

/// <Omega| [z(theta_m), ... [z(theta_1), [...[A, z^dagger(eta_n)], ..., z^dagger(eta_1)]] ...] |Omega>
/// on every grid tuple, for a bracket b(X, Y).
template <class Bracket>
KernelTensor nested_coefficients(const Realization& r, const QuadraticForm& a, int m, int n, Bracket&& bracket) {
  const int K = r.layout.truncation();
  if (m < 0 || n < 0 || m > K || n > K)
    throw InputError("nested coefficient order outside 0..K=" + std::to_string(K));
  const int N = r.grid.size();
  std::vector<QuadraticForm> annihilators;
  for (int i = 0; i < N; ++i) annihilators.push_back(r.annihilator(i));
  KernelTensor out(m, n, N);
  std::vector<int> theta(m), eta(n);

  std::function<void(const QuadraticForm&, int)> outer = [&](const QuadraticForm& x, int depth) {
    if (depth == m) {
      out.values(encode_tuple(theta, N) * ipow(N, n) + encode_tuple(eta, N)) = x.matrix(0, 0);
      return;
    }
    for (int t = 0; t < N; ++t) {
      theta[depth] = t;
      outer(bracket(annihilators[t], x), depth + 1);
    }
  };
  // Innermost bracket is with eta_n, so the eta slots fill from the back.
  std::function<void(const QuadraticForm&, int)> inner = [&](const QuadraticForm& x, int slot) {
    if (slot < 0) {
      outer(x, 0);
      return;
    }
    for (int e = 0; e < N; ++e) {
      eta[slot] = e;
      inner(bracket(x, r.creator(e)), slot - 1);
    }
  };
  inner(a, n - 1);
  return out;
}

/// Nested coefficients for every (m, n) with m + n <= max_order and m, n <= K.
/// Inner brackets are shared between orders: the node reached after brackets
/// with e_1, ..., e_d serves every n = d with eta = (e_d, ..., e_1).
template <class Bracket>
std::map<std::pair<int, int>, KernelTensor> nested_family(const Realization& r, const QuadraticForm& a, int max_order,
                                                          Bracket&& bracket) {
  const int K = r.layout.truncation();
  const int N = r.grid.size();
  std::map<std::pair<int, int>, KernelTensor> out;
  for (int m = 0; m <= K; ++m)
    for (int n = 0; n <= K; ++n)
      if (m + n <= max_order) out.emplace(std::make_pair(m, n), KernelTensor(m, n, N));
  std::vector<QuadraticForm> annihilators;
  for (int i = 0; i < N; ++i) annihilators.push_back(r.annihilator(i));
  std::vector<int> order, theta;

  std::function<void(const QuadraticForm&, int)> outer = [&](const QuadraticForm& x, int n) {
    const int m = static_cast<int>(theta.size());
    std::vector<int> eta(order.rbegin(), order.rend());
    out.at({m, n}).values(encode_tuple(theta, N) * ipow(N, n) + encode_tuple(eta, N)) = x.matrix(0, 0);
    if (m + 1 > K || m + 1 + n > max_order) return;
    for (int t = 0; t < N; ++t) {
      theta.push_back(t);
      outer(bracket(annihilators[t], x), n);
      theta.pop_back();
    }
  };
  std::function<void(const QuadraticForm&)> inner = [&](const QuadraticForm& x) {
    outer(x, static_cast<int>(order.size()));
    const int d = static_cast<int>(order.size());
    if (d + 1 > K || d + 1 > max_order) return;
    for (int e = 0; e < N; ++e) {
      order.push_back(e);
      inner(bracket(x, r.creator(e)));
      order.pop_back();
    }
  };
  inner(a);
  return out;
}

/// Free case: plain nested commutators.
inline KernelTensor nested_free_coefficients(const FockSpace& space, const QuadraticForm& a, int m, int n) {
  if (space.model().family() != ScatteringFamily::Free) throw InputError("nested commutators need S = 1");
  return nested_coefficients(realization(space), a, m, n, commutator);
}

/// Ising case: graded nested commutators, applied to the even and odd parts separately.
inline KernelTensor nested_graded_coefficients(const FockSpace& space, const QuadraticForm& a, int m, int n) {
  if (space.model().family() != ScatteringFamily::Ising) throw InputError("graded nested commutators need S = -1");
  const auto r = realization(space);
  auto [even, odd] = parity_split(a);
  KernelTensor f = nested_coefficients(r, even, m, n, graded_commutator);
  f.values += nested_coefficients(r, odd, m, n, graded_commutator).values;
  return f;
}

/// z^dagger(theta) = tau_Q(a^dagger(theta)) on the free Fock space; these obey
/// the exchange relations of S(t) = exp(i a sinh t).
inline Realization deformed_realization(const FockSpace& free_space, const SkewSymmetricQ& q) {
  if (free_space.model().family() != ScatteringFamily::Free) throw InputError("deformation starts from S = 1");
  if (q.mass != free_space.grid().mass()) throw InputError("deformation mass differs from grid mass");
  const Warper tau(q, free_space.grid(), free_space.layout());
  Realization r{free_space.grid(), free_space.layout(), ScatteringModel::sinh_exp(q.a), {}, free_space.full_projector()};
  for (int i = 0; i < free_space.grid_size(); ++i)
    r.creators.push_back(tau(creator_form(free_space, basis_vector(free_space.grid_size(), i))));
  return r;
}

/// Nested Q-commutators with the deformed creators, for a form on the free Fock space.
inline KernelTensor nested_q_coefficients(const FockSpace& free_space, const QuadraticForm& a, const SkewSymmetricQ& q,
                                          int m, int n) {
  const Realization r = deformed_realization(free_space, q);
  const QCommutator qc(q, free_space.grid(), free_space.layout());
  return nested_coefficients(r, a, m, n,
                             [&](const QuadraticForm& x, const QuadraticForm& y) { return qc(x, y).value; });
}

/// Family versions of the three nested formulas, up to total order max_order.
inline std::map<std::pair<int, int>, KernelTensor> nested_free_family(const FockSpace& space, const QuadraticForm& a,
                                                                      int max_order) {
  if (space.model().family() != ScatteringFamily::Free) throw InputError("nested commutators need S = 1");
  return nested_family(realization(space), a, max_order, commutator);
}

inline std::map<std::pair<int, int>, KernelTensor> nested_graded_family(const FockSpace& space, const QuadraticForm& a,
                                                                        int max_order) {
  if (space.model().family() != ScatteringFamily::Ising) throw InputError("graded nested commutators need S = -1");
  const auto r = realization(space);
  auto [even, odd] = parity_split(a);
  auto fam = nested_family(r, even, max_order, graded_commutator);
  const auto odd_fam = nested_family(r, odd, max_order, graded_commutator);
  for (auto& [key, f] : fam) f.values += odd_fam.at(key).values;
  return fam;
}

inline std::map<std::pair<int, int>, KernelTensor> nested_q_family(const FockSpace& free_space, const QuadraticForm& a,
                                                                   const SkewSymmetricQ& q, int max_order) {
  const Realization r = deformed_realization(free_space, q);
  const QCommutator qc(q, free_space.grid(), free_space.layout());
  return nested_family(r, a, max_order, [&](const QuadraticForm& x, const QuadraticForm& y) { return qc(x, y).value; });
}

}  // namespace zfexp
