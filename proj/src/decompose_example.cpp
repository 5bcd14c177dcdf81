// Jones splitting of one random martingale across a range of t.

#include <cstdio>

#include "ncmart/ncmart.hpp"

using namespace ncmart;

int main() {
  InstanceSpec s;
  s.seed = 7;
  s.dim = 16;
  s.levels = 4;
  s.mode = Mode::noncommutative;
  Instance inst = generate(s);
  HardyInput in = HardyInput::of(Martingale(inst.F, inst.x));

  std::printf("%10s %12s %12s %12s %12s %6s\n", "t", "lambda", "norm_y", "norm_z", "cost/kref", "ok");
  for (double t : default_grid(sequence_norm(in, 2.0), sequence_norm(in, inf), 9, 1e2)) {
    JonesDecomposition J = jones_decompose(in, t);
    std::printf("%10.4g %12.6g %12.6g %12.6g %12.6g %6s\n", t, J.lambda, J.norm_y, J.norm_z, J.cost / J.kref,
                J.cert.all() ? "yes" : "no");
  }
  return 0;
}
