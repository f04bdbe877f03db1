// Deformed creators on the free Fock space and their Q-commutators.

#include "zfexp/zfexp.hpp"

#include <cstdio>

int main() {
  using namespace zfexp;
  const RapidityGrid grid({-0.7, 0.2, 1.05}, 1.0);
  const FockSpace free(grid, ScatteringModel::free(), 3);
  const SkewSymmetricQ q(1.0, grid.mass());

  const Realization z = deformed_realization(free, q);
  const QCommutator qc(q, grid, free.layout());
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < grid.size(); ++j) {
      const auto cc = qc(z.creator(i), z.creator(j));
      const auto ac = qc(z.annihilator(j), z.creator(i));
      const double ccr = max_abs(CMatrix(restrict_input(ac.value, free.truncation() - 1).matrix -
                                 (i == j ? CMatrix(restrict_input(identity_form(free), free.truncation() - 1).matrix)
                                         : CMatrix::Zero(free.dim(), free.dim()))));
      std::printf("(%d,%d)  |[z+,z+]_Q| = %.2e   |[z,z+]_Q - delta| = %.2e\n", i, j, max_abs(cc.value.matrix), ccr);
    }
}
