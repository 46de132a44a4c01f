#pragma once

// The quasi-Einstein equation
//     Ric + 1/2 L_X g - (1/m) X^flat (x) X^flat = lambda g
// evaluated on frame data, together with the Bochner identity for Killing
// fields and the Ricci spectrum used to single out the X direction.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <vector>

#include "qeframe/frame_geometry.hpp"

namespace qeframe {

/// Candidate solution (g, X, m, lambda) on a frame.
struct QETriple {
  LieFrame frame;
  FrameMetric g;
  FrameVector x;
  double m = 1.0;
  double lambda = 0.0;

  void validate() const {
    check_compatible(frame, g);
    check_vector(frame, x);
    if (m == 0.0 || !std::isfinite(m)) throw Error(Errc::invalid_parameter, "m must be a nonzero real");
    if (!std::isfinite(lambda)) throw Error(Errc::invalid_parameter, "lambda must be finite");
  }
};

/// The Bakry-Emery tensor Ric + 1/2 L_X g - (1/m) X^flat (x) X^flat.
inline Matrix bakry_emery(const CurvaturePack& pack, const FrameMetric& g, const FrameVector& x,
                          double m) {
  if (m == 0.0) throw Error(Errc::invalid_parameter, "m must be nonzero");
  const Vector xf = g.flat(x);
  return pack.ricci + 0.5 * lie_derivative_metric(pack, g, x) - (xf * xf.transpose()) / m;
}

struct Residual {
  Matrix tensor;      // frame components
  double norm = 0.0;  // Frobenius norm in the g-orthonormal frame
};

inline Residual qe_residual(const QETriple& t) {
  t.validate();
  const CurvaturePack pack = curvature(t.frame, t.g);
  Residual r;
  r.tensor = bakry_emery(pack, t.g, t.x, t.m) - t.lambda * t.g.gram();
  r.norm = t.g.tensor_norm(r.tensor);
  return r;
}

struct LambdaFit {
  double lambda = 0.0;
  double residual = 0.0;
};

/// Least-squares lambda: the g-trace of the Bakry-Emery tensor divided by d,
/// i.e. its orthogonal projection onto multiples of g.
inline LambdaFit fit_lambda(const LieFrame& frame, const FrameMetric& g, const FrameVector& x,
                            double m) {
  check_compatible(frame, g);
  check_vector(frame, x);
  const CurvaturePack pack = curvature(frame, g);
  const Matrix be = bakry_emery(pack, g, x, m);
  LambdaFit fit;
  fit.lambda = (g.inverse() * be).trace() / frame.dim();
  fit.residual = g.tensor_norm(be - fit.lambda * g.gram());
  return fit;
}

/// Full diagnostic for a triple; the residual uses the stored lambda.
struct QEReport {
  double residual_norm = 0.0;
  double lambda_fit = 0.0;
  double fit_residual = 0.0;
  double killing_residual = 0.0;
  double x_norm = 0.0;
  Matrix bakry_emery;
  double scal = 0.0;
  double positivity = 0.0;  // lambda + |X|^2 / m
  bool trivial = false;     // X == 0: an Einstein metric
};

inline QEReport qe_report(const QETriple& t, const NumericPolicy& policy = {}) {
  t.validate();
  const CurvaturePack pack = curvature(t.frame, t.g);
  QEReport rep;
  rep.bakry_emery = bakry_emery(pack, t.g, t.x, t.m);
  rep.residual_norm = t.g.tensor_norm(rep.bakry_emery - t.lambda * t.g.gram());
  rep.lambda_fit = (t.g.inverse() * rep.bakry_emery).trace() / t.frame.dim();
  rep.fit_residual = t.g.tensor_norm(rep.bakry_emery - rep.lambda_fit * t.g.gram());
  rep.killing_residual = t.g.tensor_norm(lie_derivative_metric(pack, t.g, t.x));
  rep.x_norm = t.g.norm(t.x);
  rep.scal = pack.scal;
  rep.positivity = t.lambda + rep.x_norm * rep.x_norm / t.m;
  rep.trivial = rep.x_norm <= policy.structural;
  return rep;
}

/// |nabla K|^2 - Ric(K, K) for a Killing field K. Since |K| is constant the
/// Bochner formula forces this to vanish.
inline double bochner_check(const LieFrame& frame, const FrameMetric& g, const FrameVector& k,
                            const NumericPolicy& policy = {}) {
  check_compatible(frame, g);
  check_vector(frame, k);
  const CurvaturePack pack = curvature(frame, g);
  const double kill = g.tensor_norm(lie_derivative_metric(pack, g, k));
  if (kill > policy.structural) throw Error(Errc::not_killing, "field is not Killing");
  return nabla_norm_sq(pack, g, k) - k.dot(pack.ricci * k);
}

enum class Positivity { ParallelProduct, StrictlyPositive };

inline const char* to_string(Positivity p) {
  return p == Positivity::ParallelProduct ? "ParallelProduct" : "StrictlyPositive";
}

struct PositivityResult {
  Positivity kind = Positivity::StrictlyPositive;
  double value = 0.0;           // lambda + |X|^2 / m
  double unit_nabla_sq = 0.0;   // |nabla (X/|X|)|^2
  double nabla_x_norm = 0.0;    // |nabla X|
};

/// Splits a verified Killing solution into the parallel (product) case and the
/// strictly positive case. The value lambda + |X|^2/m must equal
/// |nabla(X/|X|)|^2; a mismatch is reported as a precondition failure.
inline PositivityResult positivity_trichotomy(const QETriple& t, const NumericPolicy& policy = {}) {
  t.validate();
  const CurvaturePack pack = curvature(t.frame, t.g);
  const double xn = t.g.norm(t.x);
  if (xn <= policy.structural) throw Error(Errc::trivial_solution, "X vanishes");
  const Matrix res = bakry_emery(pack, t.g, t.x, t.m) - t.lambda * t.g.gram();
  if (t.g.tensor_norm(res) > policy.qe_gate)
    throw Error(Errc::precondition, "triple is not quasi-Einstein");
  if (t.g.tensor_norm(lie_derivative_metric(pack, t.g, t.x)) > policy.structural)
    throw Error(Errc::precondition, "X is not Killing");

  PositivityResult out;
  out.value = t.lambda + xn * xn / t.m;
  const FrameVector unit = t.x / xn;
  out.unit_nabla_sq = nabla_norm_sq(pack, t.g, unit);
  out.nabla_x_norm = std::sqrt(std::max(0.0, nabla_norm_sq(pack, t.g, t.x)));
  if (std::abs(out.value - out.unit_nabla_sq) > policy.qe_gate * std::max(1.0, std::abs(out.value)))
    throw Error(Errc::precondition, "lambda + |X|^2/m differs from |nabla(X/|X|)|^2");
  out.kind = out.nabla_x_norm <= policy.structural ? Positivity::ParallelProduct
                                                   : Positivity::StrictlyPositive;
  return out;
}

/// Sign exclusion: no solution can have m < 0 and lambda < 0.
/// Returns true when the pair is allowed.
constexpr bool exclusion_check(double m, double lambda) { return !(m < 0.0 && lambda < 0.0); }

struct EigenGroup {
  double value = 0.0;
  int multiplicity = 0;
  Matrix vectors;  // columns span the eigenspace, g-orthonormal
};

struct RicciSpectrum {
  Vector eigenvalues;  // ascending
  Matrix eigenvectors; // g-orthonormal columns
  std::vector<EigenGroup> groups;
  // Filled when a verified nontrivial triple is supplied.
  std::optional<double> x_eigenvalue;
  std::optional<bool> x_eigenvalue_simple;

  int multiplicity_of(double value, double tol) const {
    for (const auto& grp : groups)
      if (std::abs(grp.value - value) <= tol) return grp.multiplicity;
    return 0;
  }
};

/// Solves Ric v = mu g v and groups eigenvalues within policy.multiplicity.
inline RicciSpectrum ricci_eigenstructure(const LieFrame& frame, const FrameMetric& g,
                                          const NumericPolicy& policy = {}) {
  check_compatible(frame, g);
  const CurvaturePack pack = curvature(frame, g);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(pack.ricci, g.gram());
  RicciSpectrum out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  const int d = frame.dim();
  for (int i = 0; i < d;) {
    int j = i + 1;
    while (j < d && out.eigenvalues[j] - out.eigenvalues[j - 1] <= policy.multiplicity) ++j;
    EigenGroup grp;
    grp.value = out.eigenvalues.segment(i, j - i).mean();
    grp.multiplicity = j - i;
    grp.vectors = out.eigenvectors.middleCols(i, j - i);
    out.groups.push_back(std::move(grp));
    i = j;
  }
  return out;
}

/// Spectrum plus the multiplicity of the X eigenvalue lambda + |X|^2/m.
inline RicciSpectrum ricci_eigenstructure(const QETriple& t, const NumericPolicy& policy = {}) {
  RicciSpectrum out = ricci_eigenstructure(t.frame, t.g, policy);
  const double xn = t.g.norm(t.x);
  if (xn > policy.structural && qe_residual(t).norm <= policy.qe_gate) {
    const double mu = t.lambda + xn * xn / t.m;
    out.x_eigenvalue = mu;
    out.x_eigenvalue_simple = out.multiplicity_of(mu, policy.multiplicity) == 1;
  }
  return out;
}

}  // namespace qeframe
