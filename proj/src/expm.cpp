#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "boxheat/error.hpp"
#include "boxheat/semigroup.hpp"

namespace boxheat {

MatrixXc expm_dense(const MatrixXc& m) {
  if (m.rows() != m.cols()) throw ValidationError("expm: matrix must be square");
  const Eigen::Index n = m.rows();

  // [13/13] Pade coefficients and the matching 1-norm threshold.
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const MatrixXc a = m / std::ldexp(1.0, squarings);

  const MatrixXc id = MatrixXc::Identity(n, n);
  const MatrixXc a2 = a * a;
  const MatrixXc a4 = a2 * a2;
  const MatrixXc a6 = a4 * a2;
  const MatrixXc u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const MatrixXc u = a * u_inner;
  const MatrixXc v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  MatrixXc r = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;
  if (!r.allFinite()) throw NumericalError("expm: non-finite result");
  return r;
}

MatrixXc expm_oracle(const BoxOperator& op, double t) {
  if (op.spec().points() > 32) {
    throw ValidationError(fmt::format("expm_oracle: dense oracle limited to n <= 32 (got n = {})", op.spec().points()));
  }
  if (t < 0.0) throw ValidationError("expm_oracle: t must be >= 0");
  if (t == 0.0) return MatrixXc::Identity(op.spec().size(), op.spec().size());
  return expm_dense(-t * MatrixXc(op.matrix()));
}

}  // namespace boxheat
