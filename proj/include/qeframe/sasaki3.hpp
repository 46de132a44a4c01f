#pragma once

// Three-dimensional Sasakian structures attached to quasi-Einstein triples:
// the unit-Killing sectional test, rescaling to the normalisation
// lambda + |X|^2/m = 2, phi-sectional curvature, eta-Einstein fits,
// D-homotheties and the Thurston-geometry buckets.

#include <cmath>
#include <optional>
#include <string>

#include "qeframe/quasi_einstein.hpp"

namespace qeframe {

/// Completes v to a g-orthonormal basis. Column 0 is v/|v|; the remaining
/// columns come from Gram-Schmidt on the frame vectors in frame order,
/// skipping those already (numerically) in the span.
inline Matrix adapted_orthonormal_basis(const FrameMetric& g, const FrameVector& v) {
  const int d = g.dim();
  Matrix basis(d, d);
  basis.col(0) = v / g.norm(v);
  int filled = 1;
  for (int i = 0; i < d && filled < d; ++i) {
    Vector w = basis_vector(d, i);
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < filled; ++c) w -= g.inner(basis.col(c), w) * basis.col(c);
    const double n = g.norm(w);
    if (n < 1e-8 * std::sqrt(g.gram()(i, i))) continue;
    basis.col(filled++) = w / n;
  }
  if (filled != d) throw Error(Errc::invalid_input, "could not complete an orthonormal basis");
  return basis;
}

/// The contact data (xi, eta, phi) of a unit Killing field; phi(Y) = -nabla_Y xi.
struct SasakiStructure {
  FrameVector xi;
  Vector eta;  // covector components eta(e_i) = g(xi, e_i)
  Matrix phi;  // column i holds phi(e_i)
};

inline void require_unit_killing(const LieFrame& frame, const FrameMetric& g, const FrameVector& xi,
                                 const NumericPolicy& policy) {
  check_compatible(frame, g);
  check_vector(frame, xi);
  if (std::abs(g.norm(xi) - 1.0) > policy.validation)
    throw Error(Errc::precondition, "xi is not unit length");
  if (!is_killing(frame, g, xi, policy).killing) throw Error(Errc::precondition, "xi is not Killing");
}

inline SasakiStructure sasaki_structure(const LieFrame& frame, const FrameMetric& g,
                                        const FrameVector& xi, const NumericPolicy& policy = {}) {
  require_unit_killing(frame, g, xi, policy);
  const CurvaturePack pack = koszul_connection(frame, g);
  return {xi, g.flat(xi), -pack.nabla_of(xi)};
}

struct SasakiCheck {
  bool sasakian = false;
  double deviation = 0.0;  // max |Sec(xi, v) - 1|
};

/// A unit Killing field xi in dimension three makes the metric Sasakian iff
/// every plane containing xi has sectional curvature one. The quadratic form
/// v -> Sec(xi, v) on the horizontal plane is pinned down by three directions.
inline SasakiCheck sasaki_check_3d(const LieFrame& frame, const FrameMetric& g,
                                   const FrameVector& xi, const NumericPolicy& policy = {}) {
  if (frame.dim() != 3) throw Error(Errc::dimension, "Sasakian test is three-dimensional");
  require_unit_killing(frame, g, xi, policy);
  const CurvaturePack pack = curvature(frame, g);
  const Matrix basis = adapted_orthonormal_basis(g, xi);
  const Vector e0 = basis.col(1), e1 = basis.col(2);
  const Vector diag = (e0 + e1) / std::sqrt(2.0);
  SasakiCheck out;
  for (const Vector& v : {e0, e1, diag})
    out.deviation = std::max(out.deviation, std::abs(sectional(pack, g, xi, v, policy) - 1.0));
  out.sasakian = out.deviation <= policy.qe_gate;
  return out;
}

struct RescaleResult {
  QETriple triple;
  double scale_sq = 1.0;       // g~ = scale_sq * g
  double normalization = 2.0;  // lambda~ + |X~|^2_{g~} / m, asserted to equal 2
};

/// Rescales a verified triple so that lambda + |X|^2/m = 2:
/// (s^2 g, X/s^2, m, lambda/s^2) with s^2 = (lambda + |X|^2/m) / 2.
inline RescaleResult rescale_to_sasakian(const QETriple& t, const NumericPolicy& policy = {}) {
  const Residual r = qe_residual(t);
  if (r.norm > policy.qe_gate) throw Error(Errc::precondition, "triple is not quasi-Einstein");
  const double xn2 = t.g.inner(t.x, t.x);
  const double value = t.lambda + xn2 / t.m;
  if (value <= policy.structural)
    throw Error(Errc::not_rescalable, "lambda + |X|^2/m is not positive (product case)");
  const double s2 = value / 2.0;
  RescaleResult out{QETriple{t.frame, t.g.scaled(s2), t.x / s2, t.m, t.lambda / s2}, s2, 0.0};
  const double xt2 = out.triple.g.inner(out.triple.x, out.triple.x);
  out.normalization = out.triple.lambda + xt2 / out.triple.m;
  if (std::abs(out.normalization - 2.0) > 1e-12 * 4)
    throw Error(Errc::precondition, "rescaled normalisation differs from 2");
  return out;
}

struct EtaEinsteinFit {
  double lambda = 0.0;
  double nu = 0.0;
  double residual = 0.0;  // Frobenius, g-orthonormal frame
};

/// Least-squares fit Ric ~ lambda g + nu eta (x) eta over span{g, eta (x) eta}.
inline EtaEinsteinFit eta_einstein_check(const LieFrame& frame, const FrameMetric& g,
                                         const FrameVector& xi, const NumericPolicy& policy = {}) {
  check_compatible(frame, g);
  check_vector(frame, xi);
  if (std::abs(g.norm(xi) - 1.0) > policy.validation)
    throw Error(Errc::precondition, "xi is not unit length");
  const CurvaturePack pack = curvature(frame, g);
  const Matrix ric = g.to_orthonormal(pack.ricci);
  const Vector eta_flat = g.flat(xi);
  const Matrix ee = g.to_orthonormal(eta_flat * eta_flat.transpose());
  const int d = frame.dim();
  const Matrix id = Matrix::Identity(d, d);
  // Normal equations with the Frobenius inner product; <I,I> = d,
  // <I, ee> = |eta|^2 = 1, <ee, ee> = 1.
  Eigen::Matrix2d normal;
  normal << (id.array() * id.array()).sum(), (id.array() * ee.array()).sum(),
      (id.array() * ee.array()).sum(), (ee.array() * ee.array()).sum();
  Eigen::Vector2d rhs((ric.array() * id.array()).sum(), (ric.array() * ee.array()).sum());
  const Eigen::Vector2d sol = normal.ldlt().solve(rhs);
  EtaEinsteinFit out{sol[0], sol[1], 0.0};
  out.residual = (ric - sol[0] * id - sol[1] * ee).norm();
  return out;
}

/// phi-sectional curvature H = Sec(Y, phi Y) for unit Y orthogonal to xi.
/// Evaluated at two horizontal directions, which must agree.
inline double phi_sectional(const LieFrame& frame, const FrameMetric& g, const FrameVector& xi,
                            const NumericPolicy& policy = {}) {
  if (frame.dim() != 3) throw Error(Errc::dimension, "phi-sectional curvature is computed in dimension three");
  const SasakiStructure s = sasaki_structure(frame, g, xi, policy);
  const CurvaturePack pack = curvature(frame, g);
  const Matrix basis = adapted_orthonormal_basis(g, xi);
  const Vector y0 = basis.col(1);
  const Vector y1 = (basis.col(1) + basis.col(2)) / std::sqrt(2.0);
  double values[2];
  int idx = 0;
  for (const Vector& y : {y0, y1}) {
    const Vector py = s.phi * y;
    if (g.norm(py) < policy.phi_degenerate)
      throw Error(Errc::degenerate_structure, "phi vanishes on the horizontal plane");
    values[idx++] = sectional(pack, g, y, py, policy);
  }
  if (std::abs(values[0] - values[1]) > policy.qe_gate * std::max(1.0, std::abs(values[0])))
    throw Error(Errc::precondition, "phi-sectional curvature is not constant");
  return values[0];
}

struct DHomothety {
  FrameMetric g;
  FrameVector xi;
  Vector eta;
};

/// g' = t g + (t^2 - t) eta (x) eta, xi' = xi / t, eta' = t eta.
inline DHomothety d_homothety(const LieFrame& frame, const FrameMetric& g, const FrameVector& xi,
                              double t, const NumericPolicy& policy = {}) {
  if (!(t > 0.0)) throw Error(Errc::invalid_parameter, "D-homothety parameter must be positive");
  require_unit_killing(frame, g, xi, policy);
  const Vector eta = g.flat(xi);
  DHomothety out{FrameMetric(t * g.gram() + (t * t - t) * eta * eta.transpose()), xi / t, t * eta};
  if (std::abs(out.g.norm(out.xi) - 1.0) > 1e-12 * 10)
    throw Error(Errc::precondition, "D-homothety lost the unit normalisation");
  return out;
}

enum class ThurstonBucket { Spherical, Nil, SL2Tilde, ProductSplit };

inline const char* to_string(ThurstonBucket b) {
  switch (b) {
    case ThurstonBucket::Spherical: return "Spherical";
    case ThurstonBucket::Nil: return "Nil";
    case ThurstonBucket::SL2Tilde: return "SL2Tilde";
    case ThurstonBucket::ProductSplit: return "ProductSplit";
  }
  return "?";
}

inline std::optional<ThurstonBucket> thurston_from_string(const std::string& s) {
  if (s == "Spherical") return ThurstonBucket::Spherical;
  if (s == "Nil") return ThurstonBucket::Nil;
  if (s == "SL2Tilde") return ThurstonBucket::SL2Tilde;
  if (s == "ProductSplit") return ThurstonBucket::ProductSplit;
  return std::nullopt;
}

/// d(alpha)(e_i, e_j) = -alpha([e_i, e_j]) for an invariant covector alpha.
inline Matrix exterior_derivative(const LieFrame& frame, const Vector& alpha) {
  const int d = frame.dim();
  Matrix out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += frame(i, j, k) * alpha[k];
      out(i, j) = -s;
    }
  return out;
}

struct Classification {
  ThurstonBucket bucket = ThurstonBucket::ProductSplit;
  double dx_flat_norm = 0.0;
  std::optional<double> phi_sectional;  // H of the Sasakian rescaling
  std::optional<SasakiCheck> sasaki;    // check on the rescaled metric
  std::optional<EtaEinsteinFit> eta_einstein;
  std::optional<double> scale_sq;
};

/// Thurston bucket of a verified nontrivial three-dimensional triple with Killing X.
/// dX^flat = 0 means the product case. Otherwise the triple is rescaled to
/// the Sasakian normalisation and bucketed by the sign of H + 3, which is
/// unchanged by D-homotheties (H' + 3 = (H + 3)/t) and separates the normal
/// forms H = 1, -3, -4.
inline Classification classify_thurston(const QETriple& t, const NumericPolicy& policy = {}) {
  if (t.frame.dim() != 3) throw Error(Errc::dimension, "classification is three-dimensional");
  t.validate();
  const double xn = t.g.norm(t.x);
  if (xn <= policy.structural) throw Error(Errc::trivial_solution, "X vanishes; trivial solution");
  if (qe_residual(t).norm > policy.qe_gate)
    throw Error(Errc::precondition, "triple is not quasi-Einstein");
  // The buckets describe Killing solutions; non-unimodular frames also carry
  // exact solutions with non-Killing X when m < 0.
  if (!is_killing(t.frame, t.g, t.x, policy).killing)
    throw Error(Errc::precondition, "X is not Killing");

  Classification out;
  out.dx_flat_norm = t.g.tensor_norm(exterior_derivative(t.frame, t.g.flat(t.x)));
  out.eta_einstein = eta_einstein_check(t.frame, t.g, t.x / xn, policy);
  if (out.dx_flat_norm <= policy.structural) {
    out.bucket = ThurstonBucket::ProductSplit;
    return out;
  }
  const RescaleResult rs = rescale_to_sasakian(t, policy);
  const FrameVector xi = rs.triple.x / rs.triple.g.norm(rs.triple.x);
  out.scale_sq = rs.scale_sq;
  out.sasaki = sasaki_check_3d(t.frame, rs.triple.g, xi, policy);
  const double h = phi_sectional(t.frame, rs.triple.g, xi, policy);
  out.phi_sectional = h;
  if (h > -3.0 + policy.qe_gate)
    out.bucket = ThurstonBucket::Spherical;
  else if (h < -3.0 - policy.qe_gate)
    out.bucket = ThurstonBucket::SL2Tilde;
  else
    out.bucket = ThurstonBucket::Nil;
  return out;
}

}  // namespace qeframe
