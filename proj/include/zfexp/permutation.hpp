#pragma once

#include "zfexp/core.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace zfexp {

// A bijection of {0..n-1}. The public constructor takes 1-based images, which
// is how permutations are written down and serialized.
class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(int n) {
    Permutation p;
    p.map_.resize(n);
    std::iota(p.map_.begin(), p.map_.end(), 0);
    return p;
  }

  /// images[i-1] = sigma(i), 1-based.
  static Permutation from_images(const std::vector<int>& images) {
    Permutation p;
    p.map_.reserve(images.size());
    for (int v : images) p.map_.push_back(v - 1);
    p.validate();
    return p;
  }

  static Permutation from_zero_based(std::vector<int> map) {
    Permutation p;
    p.map_ = std::move(map);
    p.validate();
    return p;
  }

  /// Transposition of the 1-based positions i and j.
  static Permutation transposition(int n, int i, int j) {
    Permutation p = identity(n);
    std::swap(p.map_.at(i - 1), p.map_.at(j - 1));
    return p;
  }

  int size() const { return static_cast<int>(map_.size()); }

  /// sigma(i), zero-based.
  int operator()(int i) const { return map_[i]; }

  std::vector<int> images() const {
    std::vector<int> out(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) out[i] = map_[i] + 1;
    return out;
  }

  const std::vector<int>& zero_based() const { return map_; }

  /// (this ∘ other)(i) = this(other(i)).
  Permutation compose(const Permutation& other) const {
    if (other.size() != size()) throw InputError("permutation sizes differ");
    Permutation p;
    p.map_.resize(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) p.map_[i] = map_[other.map_[i]];
    return p;
  }

  Permutation inverse() const {
    Permutation p;
    p.map_.resize(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) p.map_[map_[i]] = static_cast<int>(i);
    return p;
  }

  /// Pairs (i, j), i < j, with sigma(i) > sigma(j); zero-based.
  std::vector<std::pair<int, int>> inversions() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j)
        if (map_[i] > map_[j]) out.emplace_back(i, j);
    return out;
  }

  int sign() const { return inversions().size() % 2 == 0 ? 1 : -1; }

  bool is_identity() const {
    for (int i = 0; i < size(); ++i)
      if (map_[i] != i) return false;
    return true;
  }

  /// Applies the permutation to a tuple: result[i] = tuple[sigma(i)].
  template <class T>
  std::vector<T> permute(std::span<const T> tuple) const {
    if (static_cast<int>(tuple.size()) != size())
      throw InputError("tuple length does not match permutation size");
    std::vector<T> out(tuple.size());
    for (int i = 0; i < size(); ++i) out[i] = tuple[map_[i]];
    return out;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  void validate() const {
    std::vector<char> seen(map_.size(), 0);
    for (int v : map_) {
      if (v < 0 || v >= static_cast<int>(map_.size()) || seen[v])
        throw InputError("permutation images must be a bijection of {1..n}");
      seen[v] = 1;
    }
  }

  std::vector<int> map_;
};

/// All n! permutations in lexicographic order of their images.
inline std::vector<Permutation> all_permutations(int n) {
  if (n < 0 || n > 8) throw InputError("permutations are materialized only for 0 <= n <= 8");
  std::vector<int> map(n);
  std::iota(map.begin(), map.end(), 0);
  std::vector<Permutation> out;
  out.reserve(static_cast<std::size_t>(factorial(n)));
  do {
    out.push_back(Permutation::from_zero_based(map));
  } while (std::next_permutation(map.begin(), map.end()));
  return out;
}

}  // namespace zfexp
