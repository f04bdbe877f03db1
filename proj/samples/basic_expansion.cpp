// Expand a random form on the S-symmetric Fock space and sum it back up.

#include "zfexp/zfexp.hpp"

#include <cstdio>

int main() {
  using namespace zfexp;
  const RapidityGrid grid({-0.8, 0.1, 0.95}, 1.0);
  const FockSpace space(grid, ScatteringModel::sinh_exp(1.0), 3);

  auto rng = keyed_rng(7, "sample", 0);
  const QuadraticForm a = random_form(rng, space);
  const CoefficientFamily fam = expand(space, a);

  for (int m = 0; m <= fam.truncation; ++m)
    for (int n = 0; n <= fam.truncation; ++n)
      std::printf("f_%d,%d  max |entry| = %.6e\n", m, n, max_abs(fam.at(m, n).values));

  const QuadraticForm back = reconstruct(space, fam);
  std::printf("roundtrip residual %.3e\n", relative_residual(back.matrix, a.matrix));
}
