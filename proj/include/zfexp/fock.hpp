#pragma once

#include "zfexp/core.hpp"
#include "zfexp/scattering.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace zfexp {

// Finite set of rapidities with counting measure, plus the particle mass.
class RapidityGrid {
 public:
  RapidityGrid(std::vector<double> points, double mass) : points_(std::move(points)), mass_(mass) {
    if (!(mass_ > 0.0) || !std::isfinite(mass_)) throw InputError("mass must be positive and finite");
    if (points_.empty()) throw InputError("rapidity grid must not be empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      require_finite(points_[i], "grid point");
      if (i > 0 && !(points_[i] > points_[i - 1]))
        throw InputError("grid point at index " + std::to_string(i) +
                         " is not strictly greater than its predecessor");
    }
  }

  int size() const { return static_cast<int>(points_.size()); }
  double operator[](int i) const { return points_[i]; }
  const std::vector<double>& points() const { return points_; }
  double mass() const { return mass_; }

  RapidityGrid shifted(double lambda) const {
    std::vector<double> p = points_;
    for (double& x : p) x += lambda;
    return RapidityGrid(std::move(p), mass_);
  }

  std::vector<double> values(std::span<const int> idx) const {
    std::vector<double> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(points_.at(i));
    return out;
  }

  friend bool operator==(const RapidityGrid&, const RapidityGrid&) = default;

 private:
  std::vector<double> points_;
  double mass_;
};

/// p(theta) = mu (cosh theta, sinh theta).
inline Vec2 momentum(double mass, double theta) {
  require_finite(theta, "rapidity");
  return Vec2(mass * std::cosh(theta), mass * std::sinh(theta));
}

inline Vec2 momentum(const RapidityGrid& grid, double theta) { return momentum(grid.mass(), theta); }

/// Minkowski product x0 y0 - x1 y1.
inline double minkowski(const Vec2& x, const Vec2& y) { return x(0) * y(0) - x(1) * y(1); }

/// Dimensionless energy sum_j cosh theta_j.
inline double energy(std::span<const double> theta) {
  double e = 0.0;
  for (double t : theta) e += std::cosh(t);
  return e;
}

enum class IndicatrixFamily { Zero, Sqrt, Log, Custom };

// Monotone, sublinear weight function omega: [0, inf) -> [0, inf).
class Indicatrix {
 public:
  static Indicatrix zero() { return Indicatrix(IndicatrixFamily::Zero, 0.0); }
  static Indicatrix sqrt(double alpha) { return Indicatrix(IndicatrixFamily::Sqrt, alpha); }
  static Indicatrix log(double alpha) { return Indicatrix(IndicatrixFamily::Log, alpha); }

  /// Arbitrary omega, accepted only if it passes validation_residual() == 0.
  static Indicatrix custom(std::function<double(double)> fn, std::string name) {
    Indicatrix w(IndicatrixFamily::Custom, 0.0);
    w.fn_ = std::make_shared<std::function<double(double)>>(std::move(fn));
    w.name_ = std::move(name);
    if (w.validation_residual() > 0.0) throw InputError("indicatrix '" + w.name_ + "' is not monotone and sublinear");
    return w;
  }

  IndicatrixFamily family() const { return family_; }
  double alpha() const { return alpha_; }

  double operator()(double p) const {
    switch (family_) {
      case IndicatrixFamily::Zero: return 0.0;
      case IndicatrixFamily::Sqrt: return alpha_ * std::sqrt(p);
      case IndicatrixFamily::Log: return alpha_ * std::log1p(p);
      case IndicatrixFamily::Custom: return (*fn_)(p);
    }
    return 0.0;
  }

  std::string name() const {
    switch (family_) {
      case IndicatrixFamily::Zero: return "zero";
      case IndicatrixFamily::Sqrt: return "sqrt(" + std::to_string(alpha_) + ")";
      case IndicatrixFamily::Log: return "log(" + std::to_string(alpha_) + ")";
      case IndicatrixFamily::Custom: return name_;
    }
    return "?";
  }

  /// Largest violation of omega(0) >= 0, monotonicity and sublinearity on a
  /// sampled lattice, beyond 1e-12 tolerance; 0 when all hold.
  double validation_residual() const {
    constexpr double tol = 1e-12;
    double worst = 0.0;
    auto record = [&](double v) {
      if (v > tol) worst = std::max(worst, v);
    };
    record(-(*this)(0.0));
    std::vector<double> samples;
    for (int i = 0; i <= 40; ++i) samples.push_back(0.25 * i);
    for (double p : {15.0, 30.0, 100.0}) samples.push_back(p);
    for (std::size_t i = 1; i < samples.size(); ++i)
      record((*this)(samples[i - 1]) - (*this)(samples[i]));
    for (double p : samples)
      for (double q : samples) {
        const double lhs = (*this)(p + q);
        const double rhs = (*this)(p) + (*this)(q);
        record((lhs - rhs) / std::max(1.0, std::abs(rhs)));
      }
    return worst;
  }

 private:
  Indicatrix(IndicatrixFamily f, double alpha) : family_(f), alpha_(alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("indicatrix alpha must be a finite number >= 0");
  }

  IndicatrixFamily family_;
  double alpha_;
  std::shared_ptr<std::function<double(double)>> fn_;
  std::string name_;
};

// Offsets of the particle-number sectors 0..K inside the flat tensor basis.
// Sector n occupies grid^n consecutive coordinates.
class FockLayout {
 public:
  static constexpr std::int64_t kMaxDimension = 4096;

  FockLayout() = default;

  FockLayout(int grid_size, int truncation) : grid_size_(grid_size), truncation_(truncation) {
    if (grid_size <= 0) throw InputError("grid size must be positive");
    if (truncation < 0) throw InputError("truncation K must be >= 0");
    std::int64_t off = 0;
    for (int n = 0; n <= truncation; ++n) {
      offsets_.push_back(off);
      off += ipow(grid_size, n);
      if (off > kMaxDimension)
        throw ResourceError("truncated Fock space exceeds " + std::to_string(kMaxDimension) + " dimensions",
                            grid_size, truncation);
    }
    total_ = off;
  }

  int grid_size() const { return grid_size_; }
  int truncation() const { return truncation_; }
  std::int64_t offset(int n) const { return offsets_.at(n); }
  std::int64_t sector_dim(int n) const { return ipow(grid_size_, n); }
  std::int64_t total_dim() const { return total_; }

  /// Sector and in-sector flat index of a global coordinate.
  std::pair<int, std::int64_t> locate(std::int64_t i) const {
    for (int n = truncation_; n >= 0; --n)
      if (i >= offsets_[n]) return {n, i - offsets_[n]};
    throw InputError("coordinate out of range");
  }

  friend bool operator==(const FockLayout& a, const FockLayout& b) {
    return a.grid_size_ == b.grid_size_ && a.truncation_ == b.truncation_;
  }

 private:
  int grid_size_ = 0;
  int truncation_ = -1;
  std::vector<std::int64_t> offsets_;
  std::int64_t total_ = 0;
};

// Truncated multi-particle state over a rapidity grid, sectors 0..K.
struct FockState {
  RapidityGrid grid;
  FockLayout layout;
  CVector amplitudes;

  FockState(RapidityGrid g, int truncation)
      : grid(std::move(g)), layout(grid.size(), truncation), amplitudes(CVector::Zero(layout.total_dim())) {}

  FockState(RapidityGrid g, int truncation, CVector amps)
      : grid(std::move(g)), layout(grid.size(), truncation), amplitudes(std::move(amps)) {
    if (amplitudes.size() != layout.total_dim()) throw InputError("state amplitudes do not match layout");
  }

  static FockState vacuum(RapidityGrid g, int truncation) {
    FockState s(std::move(g), truncation);
    s.amplitudes(0) = 1.0;
    return s;
  }

  int truncation() const { return layout.truncation(); }

  auto sector(int n) { return amplitudes.segment(layout.offset(n), layout.sector_dim(n)); }
  auto sector(int n) const { return amplitudes.segment(layout.offset(n), layout.sector_dim(n)); }

  double norm() const { return amplitudes.norm(); }
};

inline cplx inner(const FockState& a, const FockState& b) {
  if (!(a.layout == b.layout)) throw InputError("states live on different Fock spaces");
  return a.amplitudes.dot(b.amplitudes);
}

namespace detail {

// Calls fn(global_index, sector, tuple) for every basis tuple up to K.
template <class Fn>
void for_each_basis_tuple(const FockLayout& layout, Fn&& fn) {
  std::vector<int> idx;
  for (int n = 0; n <= layout.truncation(); ++n) {
    idx.assign(n, 0);
    for (std::int64_t t = 0; t < layout.sector_dim(n); ++t) {
      decode_tuple(t, layout.grid_size(), idx);
      fn(layout.offset(n) + t, n, std::span<const int>(idx));
    }
  }
}

}  // namespace detail

/// E(theta) of every basis tuple, in layout order.
inline Eigen::VectorXd basis_energies(const RapidityGrid& grid, const FockLayout& layout) {
  Eigen::VectorXd e(layout.total_dim());
  detail::for_each_basis_tuple(layout, [&](std::int64_t i, int, std::span<const int> idx) {
    double s = 0.0;
    for (int k : idx) s += std::cosh(grid[k]);
    e(i) = s;
  });
  return e;
}

/// Total momentum sum_j p(theta_j) of every basis tuple; column i is tuple i.
inline Eigen::Matrix2Xd basis_momenta(const RapidityGrid& grid, const FockLayout& layout) {
  Eigen::Matrix2Xd p(2, layout.total_dim());
  detail::for_each_basis_tuple(layout, [&](std::int64_t i, int, std::span<const int> idx) {
    Vec2 s = Vec2::Zero();
    for (int k : idx) s += momentum(grid, grid[k]);
    p.col(i) = s;
  });
  return p;
}

/// Diagonal of exp(sign * omega(H/mu)) in the tensor basis.
inline Eigen::VectorXd omega_weights(const RapidityGrid& grid, const FockLayout& layout, const Indicatrix& omega,
                                     int sign) {
  if (sign != 1 && sign != -1) throw InputError("weight sign must be +1 or -1");
  Eigen::VectorXd e = basis_energies(grid, layout);
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = std::exp(sign * omega(e(i)));
  return e;
}

/// Diagonal of U(x) = exp(i P.x) in the tensor basis.
inline CVector translation_phases(const RapidityGrid& grid, const FockLayout& layout, const Vec2& x) {
  const Eigen::Matrix2Xd p = basis_momenta(grid, layout);
  CVector u(layout.total_dim());
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = std::polar(1.0, minkowski(p.col(i), x));
  return u;
}

inline FockState apply_omega_weight(const FockState& state, const Indicatrix& omega, int sign) {
  FockState out = state;
  out.amplitudes = state.amplitudes.cwiseProduct(
      omega_weights(state.grid, state.layout, omega, sign).cast<cplx>());
  return out;
}

inline FockState translate(const FockState& state, const Vec2& x) {
  require_finite(x(0), "translation x0");
  require_finite(x(1), "translation x1");
  FockState out = state;
  out.amplitudes = state.amplitudes.cwiseProduct(translation_phases(state.grid, state.layout, x));
  return out;
}

/// (U(0,lambda) psi)_n(theta) = psi_n(theta - lambda): identical amplitudes over
/// the grid shifted by +lambda.
inline FockState boost(const FockState& state, double lambda) {
  require_finite(lambda, "rapidity shift");
  return FockState(state.grid.shifted(lambda), state.truncation(), state.amplitudes);
}

/// Reversal of the slot order inside each sector, as a permutation of coordinates.
inline std::vector<std::int64_t> reversal_map(const FockLayout& layout) {
  std::vector<std::int64_t> map(layout.total_dim());
  for (int n = 0; n <= layout.truncation(); ++n)
    for (std::int64_t t = 0; t < layout.sector_dim(n); ++t)
      map[layout.offset(n) + t] = layout.offset(n) + reversed_index(t, layout.grid_size(), n);
  return map;
}

/// (J psi)_n(theta) = conj psi_n(theta_n, ..., theta_1).
inline FockState reflect(const FockState& state) {
  FockState out = state;
  const auto rev = reversal_map(state.layout);
  for (Eigen::Index i = 0; i < out.amplitudes.size(); ++i)
    out.amplitudes(i) = std::conj(state.amplitudes(rev[i]));
  return out;
}

// The truncated S-symmetric Fock space: grid, scattering model, truncation K
// and the cached projectors P_n^S.
class FockSpace {
 public:
  FockSpace(RapidityGrid grid, ScatteringModel model, int truncation)
      : grid_(std::move(grid)),
        model_(std::move(model)),
        layout_(grid_.size(), truncation),
        table_(model_, grid_.points()) {
    for (int n = 0; n <= truncation; ++n) projectors_.push_back(symmetrizer_matrix(table_, n));
  }

  const RapidityGrid& grid() const { return grid_; }
  const ScatteringModel& model() const { return model_; }
  const FockLayout& layout() const { return layout_; }
  const ScatteringTable& table() const { return table_; }
  int truncation() const { return layout_.truncation(); }
  int grid_size() const { return grid_.size(); }
  std::int64_t dim() const { return layout_.total_dim(); }

  const CMatrix& projector(int n) const { return projectors_.at(n); }

  /// Block-diagonal projector onto the S-symmetric sectors 0..K.
  CMatrix full_projector() const {
    CMatrix p = CMatrix::Zero(dim(), dim());
    for (int n = 0; n <= truncation(); ++n)
      p.block(layout_.offset(n), layout_.offset(n), layout_.sector_dim(n), layout_.sector_dim(n)) = projectors_[n];
    return p;
  }

  FockState vacuum() const { return FockState::vacuum(grid_, truncation()); }

  FockState project(const FockState& s) const {
    FockState out = s;
    for (int n = 0; n <= truncation(); ++n) out.sector(n) = projectors_[n] * s.sector(n);
    return out;
  }

  /// max_n |P_n^S psi_n - psi_n|.
  double symmetry_residual(const FockState& s) const {
    double r = 0.0;
    for (int n = 0; n <= truncation(); ++n)
      r = std::max(r, max_abs(CVector(projectors_[n] * s.sector(n) - s.sector(n))));
    return r;
  }

 private:
  RapidityGrid grid_;
  ScatteringModel model_;
  FockLayout layout_;
  ScatteringTable table_;
  std::vector<CMatrix> projectors_;
};

}  // namespace zfexp
