// K-curve of (h_2^c, h_inf^c) and the (θ, 2) interpolation bracket it certifies.

#include <cstdio>

#include "ncmart/ncmart.hpp"

using namespace ncmart;

int main() {
  InstanceSpec s;
  s.seed = 3;
  s.dim = 8;
  s.levels = 3;
  s.mode = Mode::dyadic;
  Instance inst = generate(s);
  Martingale m(inst.F, inst.x);
  KCurve c = k_curve(m, 2.0);

  std::printf("couple %s, %zu points, max upper/lower %.6g\n", c.couple.c_str(), c.size(), c.max_ratio());
  for (double theta : {0.25, 0.5, 0.75}) {
    Interval I = real_interp_norm(c, theta, 2.0);
    std::printf("theta %.2f: norm in [%.6g, %.6g]\n", theta, I.lo, I.hi);
  }
  return 0;
}
