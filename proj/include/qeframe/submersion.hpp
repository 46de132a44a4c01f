#pragma once

// Riemannian submersions with totally geodesic circle fibers, presented on a
// frame: the vertical direction is an invariant unit Killing field U and the
// horizontal space is its g-orthogonal complement. Base quantities live on
// the horizontal subspace; no separate base manifold is modelled.

#include <cmath>
#include <optional>
#include <vector>

#include "qeframe/quasi_einstein.hpp"
#include "qeframe/sasaki3.hpp"

namespace qeframe {

/// O'Neill data of the fibration. Horizontal quantities are written in the
/// g-orthonormal horizontal basis Y_1..Y_{d-1} (columns 1.. of `basis`).
struct SubmersionData {
  LieFrame frame;
  FrameMetric g;
  FrameVector vertical;  // unit vertical field U
  Matrix basis;          // columns: U, Y_1, ..., Y_{d-1}

  // a_tensor[i].col(j) = A_{Y_i} b_j in frame coordinates, b = basis columns.
  std::vector<Matrix> a_tensor;
  Matrix omega;       // omega(Y_i, Y_j), defined by A_Y Z = -1/2 omega(Y, Z) U
  Matrix a_gram;      // g(A_{Y_i}, A_{Y_j}) = sum_k g(A_{Y_i} Y_k, A_{Y_j} Y_k)
  Matrix base_ricci;  // Ric^B(Y_i, Y_j) = Ric(Y_i, Y_j) + 2 g(A_{Y_i}, A_{Y_j})
  Matrix ricci_horizontal;
  Vector mixed_ricci;      // Ric(Y_i, U)
  double ricci_vertical = 0.0;
  double a_norm_sq = 0.0;      // sum_i g(A_{Y_i}, A_{Y_i})
  double vertical_a_sq = 0.0;  // g(AU, AU) = sum_i |A_{Y_i} U|^2
  double omega_norm_sq = 0.0;  // full double sum over ordered pairs

  double killing_residual = 0.0;
  double geodesic_defect = 0.0;  // |nabla_U U|
  double a_skew_defect = 0.0;    // max |g(A_Y b, c) + g(A_Y c, b)|

  int dim() const { return frame.dim(); }
  int base_dim() const { return frame.dim() - 1; }
  Matrix horizontal() const { return basis.rightCols(base_dim()); }
  double base_scal() const { return base_ricci.trace(); }
};

/// Computes the O'Neill data without validating the fibration hypotheses.
/// Used where a non-Killing direction must still be measured (e.g. scans
/// over deformed metrics); build_submersion is the validated entry point.
inline SubmersionData measure_submersion(const LieFrame& frame, const FrameMetric& g,
                                         const FrameVector& vertical_dir) {
  check_compatible(frame, g);
  check_vector(frame, vertical_dir);
  if (g.norm(vertical_dir) <= 0.0) throw Error(Errc::invalid_fibration, "vertical direction vanishes");
  const int d = frame.dim();
  if (d < 2) throw Error(Errc::dimension, "submersion needs dimension at least two");
  const CurvaturePack pack = curvature(frame, g);

  SubmersionData sd{frame, g, vertical_dir / g.norm(vertical_dir), adapted_orthonormal_basis(g, vertical_dir),
                    {}, {}, {}, {}, {}, {}, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const Vector& u = sd.vertical;
  const int h = d - 1;
  auto vproj = [&](const Vector& v) -> Vector { return g.inner(v, u) * u; };
  auto hproj = [&](const Vector& v) -> Vector { return v - g.inner(v, u) * u; };

  sd.a_tensor.resize(h);
  for (int i = 0; i < h; ++i) {
    const Vector y = sd.basis.col(i + 1);
    Matrix a(d, d);
    a.col(0) = hproj(pack.covariant(y, u));
    for (int j = 1; j < d; ++j) a.col(j) = vproj(pack.covariant(y, sd.basis.col(j)));
    sd.a_tensor[i] = a;
  }

  sd.omega = Matrix::Zero(h, h);
  sd.a_gram = Matrix::Zero(h, h);
  for (int i = 0; i < h; ++i) {
    sd.vertical_a_sq += g.inner(sd.a_tensor[i].col(0), sd.a_tensor[i].col(0));
    for (int j = 0; j < h; ++j) {
      sd.omega(i, j) = -2.0 * g.inner(sd.a_tensor[i].col(j + 1), u);
      double s = 0.0;
      for (int k = 0; k < h; ++k) s += g.inner(sd.a_tensor[i].col(k + 1), sd.a_tensor[j].col(k + 1));
      sd.a_gram(i, j) = s;
    }
  }
  sd.a_norm_sq = sd.a_gram.trace();
  sd.omega_norm_sq = sd.omega.squaredNorm();

  const Matrix ric = sd.basis.transpose() * pack.ricci * sd.basis;
  sd.ricci_vertical = ric(0, 0);
  sd.mixed_ricci = ric.block(1, 0, h, 1);
  sd.ricci_horizontal = ric.block(1, 1, h, h);
  sd.base_ricci = sd.ricci_horizontal + 2.0 * sd.a_gram;

  sd.killing_residual = g.tensor_norm(lie_derivative_metric(pack, g, u));
  sd.geodesic_defect = g.norm(pack.covariant(u, u));
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const double s = g.inner(sd.a_tensor[i].col(j), sd.basis.col(k)) +
                         g.inner(sd.a_tensor[i].col(k), sd.basis.col(j));
        sd.a_skew_defect = std::max(sd.a_skew_defect, std::abs(s));
      }
  return sd;
}

/// Validated submersion: the vertical direction must be Killing (invariant
/// fields have constant length automatically) and its integral curves
/// geodesics.
inline SubmersionData build_submersion(const LieFrame& frame, const FrameMetric& g,
                                       const FrameVector& vertical_dir,
                                       const NumericPolicy& policy = {}) {
  SubmersionData sd = measure_submersion(frame, g, vertical_dir);
  if (sd.killing_residual > policy.structural)
    throw Error(Errc::invalid_fibration, "vertical direction is not a Killing field");
  if (sd.geodesic_defect > policy.structural)
    throw Error(Errc::not_totally_geodesic, "fibers are not geodesics (nabla_U U != 0)");
  return sd;
}

/// Reconstructs A on horizontal pairs from omega: A_{Y_i} Y_j = -1/2 omega_ij U.
inline Matrix a_from_omega(const SubmersionData& sd, int i) {
  const int h = sd.base_dim();
  Matrix out(sd.dim(), h);
  for (int j = 0; j < h; ++j) out.col(j) = -0.5 * sd.omega(i, j) * sd.vertical;
  return out;
}

struct ConditionResult {
  bool pass = false;
  double residual = 0.0;  // max-abs over components
};

/// The horizontal distribution is Yang-Mills iff the mixed Ricci curvature
/// Ric(Y, U) vanishes.
inline ConditionResult yang_mills_check(const SubmersionData& sd, const NumericPolicy& policy = {}) {
  const double r = sd.mixed_ricci.size() ? sd.mixed_ricci.cwiseAbs().maxCoeff() : 0.0;
  return {r <= policy.structural, r};
}

inline double require_vertical(const SubmersionData& sd, const FrameVector& x,
                               const NumericPolicy& policy) {
  check_vector(sd.frame, x);
  const double along = sd.g.inner(x, sd.vertical);
  const double off = sd.g.norm(x - along * sd.vertical);
  if (off > policy.structural * std::max(1.0, sd.g.norm(x)))
    throw Error(Errc::hypothesis_violation, "X is not tangent to the fibers");
  return along;
}

struct SubmersionQEReport {
  ConditionResult yang_mills;      // mixed Ricci vanishes
  ConditionResult a_norm;          // |A|^2 = lambda + |X|^2/m
  ConditionResult horizontal;      // Ric^B - 2 g(A_Y, A_Z) = lambda g
  ConditionResult trace_identity;  // s^B - 2|A|^2 = lambda (d - 1)
  bool all_pass() const { return yang_mills.pass && a_norm.pass && horizontal.pass; }
};

/// Quasi-Einstein conditions for a vertical X on a totally geodesic circle
/// fibration, split into the mixed, vertical and horizontal blocks.
inline SubmersionQEReport qe_submersion_check(const SubmersionData& sd, double m, const FrameVector& x,
                                              double lambda, const NumericPolicy& policy = {}) {
  if (m == 0.0) throw Error(Errc::invalid_parameter, "m must be nonzero");
  require_vertical(sd, x, policy);
  const double xn2 = sd.g.inner(x, x);
  const int h = sd.base_dim();
  SubmersionQEReport rep;
  rep.yang_mills = yang_mills_check(sd, policy);
  const double r2 = std::abs(sd.a_norm_sq - (lambda + xn2 / m));
  rep.a_norm = {r2 <= policy.structural, r2};
  const Matrix hres = sd.base_ricci - 2.0 * sd.a_gram - lambda * Matrix::Identity(h, h);
  const double r3 = h ? hres.cwiseAbs().maxCoeff() : 0.0;
  rep.horizontal = {r3 <= policy.structural, r3};
  const double rt = std::abs(sd.base_scal() - 2.0 * sd.a_norm_sq - lambda * h);
  rep.trace_identity = {rt <= policy.structural, rt};
  return rep;
}

struct CircleBundleReport {
  ConditionResult coclosed;     // omega coclosed, via mixed Ricci
  ConditionResult condition_b;  // Ric^B - 1/2 g(omega_Y, omega_Z) = (|omega|^2/4 - |X|^2/m) g
  bool all_pass() const { return coclosed.pass && condition_b.pass; }
};

/// Circle-bundle form of the quasi-Einstein conditions in terms of the
/// curvature 2-form omega. `base_lambda`, when given, replaces the measured
/// base Ricci tensor by base_lambda * g^B.
inline CircleBundleReport prop38_check(const SubmersionData& sd, double m, const FrameVector& x,
                                       std::optional<double> base_lambda = std::nullopt,
                                       const NumericPolicy& policy = {}) {
  if (m == 0.0) throw Error(Errc::invalid_parameter, "m must be nonzero");
  require_vertical(sd, x, policy);
  const double xn2 = sd.g.inner(x, x);
  const int h = sd.base_dim();
  const Matrix id = Matrix::Identity(h, h);
  const Matrix base = base_lambda ? Matrix(*base_lambda * id) : sd.base_ricci;
  // g(omega_Y, omega_Z) = sum_i omega(Y, Y_i) omega(Z, Y_i)
  const Matrix omega_gram = sd.omega * sd.omega.transpose();
  const Matrix res = base - 0.5 * omega_gram - (sd.omega_norm_sq / 4.0 - xn2 / m) * id;
  CircleBundleReport rep;
  rep.coclosed = yang_mills_check(sd, policy);
  const double rb = h ? res.cwiseAbs().maxCoeff() : 0.0;
  rep.condition_b = {rb <= policy.structural, rb};
  return rep;
}

struct AlmostKahler {
  bool trivial_product = false;  // lambda^B + |X|^2/m = 0: P = B x S^1
  Matrix j;                      // omega(Y, Z) = g^B(J Y, Z)
  Matrix j_normalized;           // J / kappa, squares to -1
  double kappa = 0.0;
  double defect = 0.0;           // |J'^2 + I|, max-abs
};

/// Almost complex structure on the base of an Einstein circle bundle.
inline AlmostKahler almost_kahler_J(const SubmersionData& sd, double m, double x_norm_sq,
                                    double base_lambda, const NumericPolicy& policy = {}) {
  const int h = sd.base_dim();
  if (h % 2 != 0) throw Error(Errc::dimension, "base dimension must be even");
  if (m == 0.0) throw Error(Errc::invalid_parameter, "m must be nonzero");
  AlmostKahler out;
  const double positivity = base_lambda + x_norm_sq / m;
  if (std::abs(positivity) <= policy.structural) {
    out.trivial_product = true;
    return out;
  }
  if (positivity < 0.0)
    throw Error(Errc::precondition, "lambda^B + |X|^2/m must be positive");
  // In the orthonormal horizontal basis g^B = I, so omega_ij = (J Y_i)_j,
  // i.e. J = omega^T.
  out.j = sd.omega.transpose();
  const double k2 = 2.0 * base_lambda - sd.omega_norm_sq / 2.0 + 2.0 * x_norm_sq / m;
  if (k2 <= 0.0) throw Error(Errc::precondition, "normalisation constant is not positive");
  out.kappa = std::sqrt(k2);
  out.j_normalized = out.j / out.kappa;
  const Matrix id = Matrix::Identity(h, h);
  out.defect = (out.j_normalized * out.j_normalized + id).cwiseAbs().maxCoeff();
  if (out.defect > policy.structural)
    throw Error(Errc::precondition, "J/kappa does not square to -1 (base not Einstein?)");
  return out;
}

}  // namespace qeframe
