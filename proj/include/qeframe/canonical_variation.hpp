#pragma once

// Canonical variation g_t of a circle fibration: the vertical metric is
// scaled by t, the horizontal metric is kept. Closed forms for the Ricci
// blocks of g_t and for the quasi-Einstein family X_t = c_t U, lambda_t.
//
// Throughout, n is the dimension of the total space, so the horizontal trace
// contributes n - 1. With |A|^2 = 2 on the Hopf fibration this reproduces
// c_t = sqrt(4m - 4m/t).

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "qeframe/submersion.hpp"

namespace qeframe {

struct VariationInput {
  double a_norm_sq = 0.0;  // |A|^2 at t = 1
  double x_norm_sq = 0.0;  // |X|^2 at t = 1
  double m = 1.0;
  int n = 3;               // total-space dimension
  std::optional<double> base_einstein_lambda;

  void validate() const {
    if (n < 3) throw Error(Errc::dimension, "total dimension must be at least 3");
    if (m == 0.0 || !std::isfinite(m)) throw Error(Errc::invalid_parameter, "m must be nonzero");
    if (a_norm_sq < 0.0) throw Error(Errc::invalid_parameter, "|A|^2 must be non-negative");
    if (x_norm_sq < 0.0) throw Error(Errc::invalid_parameter, "|X|^2 must be non-negative");
  }

  static VariationInput from_submersion(const SubmersionData& sd, double m, double x_norm_sq) {
    VariationInput vi;
    vi.a_norm_sq = sd.a_norm_sq;
    vi.x_norm_sq = x_norm_sq;
    vi.m = m;
    vi.n = sd.dim();
    return vi;
  }
};

inline void require_positive_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(Errc::invalid_parameter, "t must be positive");
}

/// Argument of the square root in c_t.
inline double c_t_radicand(const VariationInput& vi, double t) {
  vi.validate();
  require_positive_t(t);
  const double n = vi.n;
  return vi.x_norm_sq / t + vi.m * (t - 1.0) * (n + 1.0) * vi.a_norm_sq / (t * (n - 1.0));
}

/// Coefficient of X_t = c_t U, or nullopt where the radicand is negative.
inline std::optional<double> c_t(const VariationInput& vi, double t) {
  const double r = c_t_radicand(vi, t);
  // Rounding at the closed endpoint must not make the Einstein point vanish.
  const double slack = 1e-14 * (vi.x_norm_sq / t + std::abs(vi.m) * vi.a_norm_sq + 1.0);
  if (r < -slack) return std::nullopt;
  return std::sqrt(std::max(0.0, r));
}

/// lambda_t = t|A|^2 - |X|^2/m - (t-1)(n+1)|A|^2/(n-1), affine and
/// decreasing in t with slope -2|A|^2/(n-1).
inline double lambda_t(const VariationInput& vi, double t) {
  vi.validate();
  require_positive_t(t);
  const double n = vi.n;
  return t * vi.a_norm_sq - vi.x_norm_sq / vi.m - (t - 1.0) * (n + 1.0) * vi.a_norm_sq / (n - 1.0);
}

/// lambda^B = (n+1)/(n-1) |A|^2 - |X|^2/m, the base Einstein constant forced
/// by the trace of the horizontal equation.
inline double base_lambda_from_total(const VariationInput& vi) {
  vi.validate();
  const double n = vi.n;
  return (n + 1.0) / (n - 1.0) * vi.a_norm_sq - vi.x_norm_sq / vi.m;
}

/// Set of admissible t > 0. Endpoints where c_t = 0 are closed.
struct AdmissibleSet {
  bool empty = false;
  bool degenerate = false;  // |A|^2 = 0: every t > 0, c_t = |X|/sqrt(t)
  double lower = 0.0;
  bool lower_closed = false;
  double upper = std::numeric_limits<double>::infinity();
  bool upper_closed = false;

  bool contains(double t) const {
    if (empty || !(t > 0.0)) return false;
    const bool above = lower_closed ? t >= lower : t > lower;
    const bool below = std::isinf(upper) ? true : (upper_closed ? t <= upper : t < upper);
    return above && below;
  }
};

inline double admissible_threshold(const VariationInput& vi) {
  const double n = vi.n;
  return 1.0 - vi.x_norm_sq * (n - 1.0) / (vi.m * (n + 1.0) * vi.a_norm_sq);
}

inline AdmissibleSet admissible_interval(const VariationInput& vi) {
  vi.validate();
  AdmissibleSet s;
  if (vi.a_norm_sq == 0.0) {
    s.degenerate = true;
    return s;
  }
  const double tmin = admissible_threshold(vi);
  if (vi.m > 0.0) {
    if (tmin > 0.0) {
      s.lower = tmin;
      s.lower_closed = true;
    }
  } else {
    if (tmin <= 0.0) {
      s.empty = true;
    } else {
      s.upper = tmin;
      s.upper_closed = true;
    }
  }
  return s;
}

/// The t at which c_t = 0, where g_t is Einstein, when it is positive.
inline std::optional<double> einstein_point(const VariationInput& vi) {
  vi.validate();
  if (vi.a_norm_sq <= 0.0) return std::nullopt;
  const double t = admissible_threshold(vi);
  if (t > 0.0) return t;
  return std::nullopt;
}

/// g_t = g + (t - 1) U^flat (x) U^flat for a g-unit vertical U.
inline FrameMetric canonical_variation_metric(const FrameMetric& g, const FrameVector& unit_vertical,
                                              double t) {
  require_positive_t(t);
  const Vector uf = g.flat(unit_vertical);
  return FrameMetric(g.gram() + (t - 1.0) * uf * uf.transpose());
}

/// Ricci tensor of g_t on the t = 1 adapted basis (U, Y_1, ...).
struct RicciBlocks {
  double vertical = 0.0;  // Ric_t(U, U)
  Matrix horizontal;      // Ric_t(Y_i, Y_j)
  Vector mixed;           // Ric_t(Y_i, U)
};

/// Block formulas: t^2 g(AU, AU), Ric^B - 2t g(A_Y, A_Z), and t times the
/// mixed (Yang-Mills) term.
inline RicciBlocks ricci_t(const SubmersionData& sd, double t) {
  require_positive_t(t);
  return {t * t * sd.vertical_a_sq, sd.base_ricci - 2.0 * t * sd.a_gram, t * sd.mixed_ricci};
}

/// The same blocks from a direct curvature computation of g_t.
inline RicciBlocks ricci_t_direct(const SubmersionData& sd, double t) {
  const FrameMetric gt = canonical_variation_metric(sd.g, sd.vertical, t);
  const CurvaturePack pack = curvature(sd.frame, gt);
  const Matrix ric = sd.basis.transpose() * pack.ricci * sd.basis;
  const int h = sd.base_dim();
  return {ric(0, 0), ric.block(1, 1, h, h), ric.block(1, 0, h, 1)};
}

inline double blocks_distance(const RicciBlocks& a, const RicciBlocks& b) {
  double d = std::abs(a.vertical - b.vertical);
  if (a.horizontal.size()) d = std::max(d, (a.horizontal - b.horizontal).cwiseAbs().maxCoeff());
  if (a.mixed.size()) d = std::max(d, (a.mixed - b.mixed).cwiseAbs().maxCoeff());
  return d;
}

struct VariationPoint {
  double t = 1.0;
  std::optional<double> c_t;  // nullopt: inadmissible
  double lambda_t = 0.0;
  double vertical_ricci = 0.0;          // t^2 |A|^2
  double horizontal_ricci_shift = 0.0;  // 2t
  std::optional<double> residual;       // qe residual of (g_t, c_t U, lambda_t)
  double scal = 0.0;                    // scalar curvature of g_t

  bool defined() const { return c_t.has_value(); }
};

struct FamilyScan {
  VariationInput input;
  double anchor_residual = 0.0;  // qe residual at t = 1
  bool base_einstein = false;
  double base_einstein_defect = 0.0;  // |Ric^B - (s^B/(n-1)) g^B|, max-abs
  std::vector<VariationPoint> points;
};

/// Walks the canonical variation anchored at (g, X = x_coeff * U): for each t
/// sets X_t = c_t U, lambda = lambda_t, and evaluates the quasi-Einstein
/// residual of g_t. Points with a negative radicand are marked inadmissible.
inline FamilyScan verify_family(const LieFrame& frame, const FrameMetric& g, const FrameVector& vertical,
                                double m, const std::vector<double>& t_grid, double x_coeff = 0.0,
                                const NumericPolicy& policy = {}) {
  (void)policy;
  const SubmersionData sd = measure_submersion(frame, g, vertical);
  FamilyScan scan;
  scan.input = VariationInput::from_submersion(sd, m, x_coeff * x_coeff);
  scan.input.validate();
  const double sign = x_coeff < 0.0 ? -1.0 : 1.0;
  scan.anchor_residual =
      qe_residual(QETriple{frame, g, x_coeff * sd.vertical, m, lambda_t(scan.input, 1.0)}).norm;
  const int h = sd.base_dim();
  const double mean = sd.base_scal() / h;
  scan.base_einstein_defect =
      (sd.base_ricci - mean * Matrix::Identity(h, h)).cwiseAbs().maxCoeff();
  scan.base_einstein = scan.base_einstein_defect <= policy.structural;
  scan.input.base_einstein_lambda =
      scan.base_einstein ? std::optional<double>(mean) : std::nullopt;

  for (double t : t_grid) {
    VariationPoint p;
    p.t = t;
    p.c_t = c_t(scan.input, t);
    p.lambda_t = lambda_t(scan.input, t);
    p.vertical_ricci = t * t * scan.input.a_norm_sq;
    p.horizontal_ricci_shift = 2.0 * t;
    const FrameMetric gt = canonical_variation_metric(g, sd.vertical, t);
    p.scal = curvature(frame, gt).scal;
    if (p.c_t) {
      const QETriple triple{frame, gt, sign * *p.c_t * sd.vertical, m, p.lambda_t};
      p.residual = qe_residual(triple).norm;
    }
    scan.points.push_back(p);
  }
  return scan;
}

}  // namespace qeframe
