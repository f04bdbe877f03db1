#pragma once

#include "zfexp/core.hpp"

namespace zfexp {

// Complex array over grid^(m+n). The first m slots are the creation
// ("theta") variables, the last n slots the annihilation ("eta") variables.
// Tensors without that split use n = 0.
struct KernelTensor {
  int m = 0;
  int n = 0;
  int grid_size = 0;
  CVector values;

  KernelTensor() = default;

  KernelTensor(int m_, int n_, int grid_size_)
      : m(m_), n(n_), grid_size(grid_size_),
        values(CVector::Zero(ipow(grid_size_, m_ + n_))) {
    if (m < 0 || n < 0 || grid_size <= 0) throw InputError("invalid kernel shape");
  }

  KernelTensor(int m_, int n_, int grid_size_, CVector v)
      : m(m_), n(n_), grid_size(grid_size_), values(std::move(v)) {
    if (values.size() != ipow(grid_size, m + n))
      throw InputError("kernel values do not match shape grid^(m+n)");
  }

  int rank() const { return m + n; }

  cplx& at(std::span<const int> idx) { return values(encode_tuple(idx, grid_size)); }
  cplx at(std::span<const int> idx) const { return values(encode_tuple(idx, grid_size)); }

  /// The kernel as a grid^m x grid^n matrix (rows: theta, columns: eta).
  CMatrix as_matrix() const {
    const auto rows = ipow(grid_size, m);
    const auto cols = ipow(grid_size, n);
    CMatrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = values(r * cols + c);
    return out;
  }

  static KernelTensor from_matrix(int m, int n, int grid_size, const CMatrix& mat) {
    KernelTensor k(m, n, grid_size);
    if (mat.rows() != ipow(grid_size, m) || mat.cols() != ipow(grid_size, n))
      throw InputError("matrix shape does not match kernel shape");
    const auto cols = mat.cols();
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
      for (Eigen::Index c = 0; c < cols; ++c) k.values(r * cols + c) = mat(r, c);
    return k;
  }

  double l2_norm() const { return values.norm(); }
};

inline void require_same_shape(const KernelTensor& a, const KernelTensor& b) {
  if (a.m != b.m || a.n != b.n || a.grid_size != b.grid_size)
    throw InputError("kernel shapes differ");
}

}  // namespace zfexp
