#pragma once

#include "zfexp/fock.hpp"
#include "zfexp/kernel.hpp"
#include "zfexp/zops.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace zfexp {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Generator for check `index` of `suite`; independent of every other check.
inline std::mt19937_64 keyed_rng(std::uint64_t seed, std::string_view suite, std::uint64_t index) {
  const std::uint64_t key = splitmix64(splitmix64(seed ^ fnv1a(suite)) + index);
  return std::mt19937_64(key);
}

inline cplx random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

inline CVector random_vector(std::mt19937_64& rng, std::int64_t n) {
  CVector v(n);
  for (std::int64_t i = 0; i < n; ++i) v(i) = random_complex(rng);
  return v;
}

inline CMatrix random_matrix(std::mt19937_64& rng, std::int64_t rows, std::int64_t cols) {
  CMatrix m(rows, cols);
  for (std::int64_t j = 0; j < cols; ++j)
    for (std::int64_t i = 0; i < rows; ++i) m(i, j) = random_complex(rng);
  return m;
}

inline KernelTensor random_kernel(std::mt19937_64& rng, int m, int n, int grid_size) {
  return KernelTensor(m, n, grid_size, random_vector(rng, ipow(grid_size, m + n)));
}

/// Gaussian amplitudes projected onto the S-symmetric sectors.
inline FockState random_state(std::mt19937_64& rng, const FockSpace& space) {
  return space.project(FockState(space.grid(), space.truncation(), random_vector(rng, space.dim())));
}

/// Dense Gaussian blocks, projected onto the S-symmetric subspace on both sides.
inline QuadraticForm random_form(std::mt19937_64& rng, const FockSpace& space) {
  return project_form(space, QuadraticForm(space.layout(), random_matrix(rng, space.dim(), space.dim())));
}

}  // namespace zfexp
