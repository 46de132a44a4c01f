// Walks the Berger family on SU(2): for each t the metric diag(t, 1, 1)
// carries X = sqrt(4m - 4m/t) e1 with lambda = 4 - 2t. Prints the residual,
// the sign of lambda and the Thurston bucket of each member.

#include <cstdio>

#include "qeframe/qeframe.hpp"

using namespace qeframe;

int main(int argc, char** argv) {
  const double m = argc > 1 ? std::atof(argv[1]) : 1.0;
  const LieFrame su2 = frames::su2();
  const FrameVector hopf = basis_vector(3, 0);
  const FamilyScan scan = verify_family(su2, FrameMetric::identity(3), hopf, m, {0.5, 1.0, 1.5, 2.0, 3.0, 4.0});

  std::printf("%6s %12s %10s %12s %s\n", "t", "c_t", "lambda_t", "residual", "bucket");
  for (const auto& p : scan.points) {
    if (!p.defined()) {
      std::printf("%6.2f %12s %10.4f %12s\n", p.t, "-", p.lambda_t, "inadmissible");
      continue;
    }
    const QETriple triple{su2, canonical_variation_metric(FrameMetric::identity(3), hopf, p.t), *p.c_t * hopf, m,
                          p.lambda_t};
    const char* bucket = "trivial";
    if (*p.c_t > 0.0) bucket = to_string(classify_thurston(triple).bucket);
    std::printf("%6.2f %12.8f %10.4f %12.3e %s\n", p.t, *p.c_t, p.lambda_t, *p.residual, bucket);
  }
  return 0;
}
