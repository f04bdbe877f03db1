#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace zfexp {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Vec2 = Eigen::Vector2d;

/// Thrown when an argument violates an operation's precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a requested configuration would not fit in memory.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, int grid_size, int truncation)
      : std::runtime_error(what + " (N=" + std::to_string(grid_size) +
                           ", K=" + std::to_string(truncation) + ")"),
        grid_size_(grid_size),
        truncation_(truncation) {}

  int grid_size() const { return grid_size_; }
  int truncation() const { return truncation_; }

 private:
  int grid_size_;
  int truncation_;
};

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

inline std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

/// Row-major multi-index over grid^rank: slot 0 is the most significant digit.
inline void decode_tuple(std::int64_t flat, int grid_size, std::span<int> out) {
  for (int s = static_cast<int>(out.size()) - 1; s >= 0; --s) {
    out[s] = static_cast<int>(flat % grid_size);
    flat /= grid_size;
  }
}

inline std::int64_t encode_tuple(std::span<const int> idx, int grid_size) {
  std::int64_t flat = 0;
  for (int i : idx) flat = flat * grid_size + i;
  return flat;
}

inline std::vector<int> decode_tuple(std::int64_t flat, int grid_size, int rank) {
  std::vector<int> out(rank);
  decode_tuple(flat, grid_size, out);
  return out;
}

/// Flat index of the tuple read in reverse slot order.
inline std::int64_t reversed_index(std::int64_t flat, int grid_size, int rank) {
  std::int64_t rev = 0;
  for (int s = 0; s < rank; ++s) {
    rev = rev * grid_size + flat % grid_size;
    flat /= grid_size;
  }
  return rev;
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const CVector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// max|a-b| / max(max|a|, max|b|); zero when both sides vanish.
template <class A, class B>
double relative_residual(const A& a, const B& b) {
  const double diff = max_abs(CMatrix(a - b));
  const double scale = std::max(max_abs(CMatrix(a)), max_abs(CMatrix(b)));
  if (scale == 0.0) return diff;
  return diff / scale;
}

/// Largest singular value.
inline double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw InputError(std::string(what) + " must be finite");
}

}  // namespace zfexp
