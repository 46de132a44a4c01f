#pragma once

// Multistart damped Gauss-Newton search for quasi-Einstein triples on a fixed
// frame. Unknowns are a log-parameterised metric g = exp(S) with tr S = 0
// (det g = 1 removes the g -> c^2 g scaling direction), the frame
// coefficients of X, and lambda.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "qeframe/canonical_variation.hpp"
#include "qeframe/sasaki3.hpp"

namespace qeframe {

enum class MetricParameterization { Diagonal, FullSpd };

inline const char* to_string(MetricParameterization p) {
  return p == MetricParameterization::Diagonal ? "diagonal" : "full_spd";
}

struct SolverConfig {
  double m = 1.0;
  MetricParameterization metric_parameterization = MetricParameterization::Diagonal;
  int multistart_count = 64;
  int max_iterations = 200;
  double convergence_tol = 1e-8;
  double dedup_tol = 1e-6;
  std::uint64_t seed = 7;
  double log_metric_box = 1.0;  // starts draw S entries from [-box, box]
  double x_box = 2.0;           // and X coefficients from [-x_box, x_box]
  double trivial_tol = 1e-6;    // |X| below this marks a record trivial
  // Frame automorphisms (matrices P with columns the images of e_i) used when
  // deduplicating. Empty means: all bracket-preserving signed permutations.
  std::vector<Matrix> automorphisms;
  NumericPolicy policy{};

  void validate() const {
    if (m == 0.0 || !std::isfinite(m)) throw Error(Errc::invalid_parameter, "m must be nonzero");
    if (multistart_count < 1) throw Error(Errc::invalid_parameter, "multistart_count must be >= 1");
    if (max_iterations < 1) throw Error(Errc::invalid_parameter, "max_iterations must be >= 1");
    if (!(convergence_tol > 0.0) || !(dedup_tol > 0.0))
      throw Error(Errc::invalid_parameter, "tolerances must be positive");
  }
};

struct SolutionRecord {
  FrameMetric g;
  FrameVector x;
  double m = 1.0;
  double lambda = 0.0;
  double residual = 0.0;
  double killing_residual = 0.0;
  std::optional<ThurstonBucket> classification;
  bool trivial = false;

  QETriple triple(const LieFrame& frame) const { return {frame, g, x, m, lambda}; }
};

struct SolveReport {
  std::vector<SolutionRecord> records;
  std::vector<SolutionRecord> excluded;  // converged with m < 0 and lambda < 0
  int converged = 0;
  int abandoned = 0;                     // non-finite or degenerate iterates
};

/// Signed permutation matrices P with [P e_i, P e_j] = P [e_i, e_j].
inline std::vector<Matrix> signed_permutation_automorphisms(const LieFrame& frame, double tol = 1e-12) {
  const int d = frame.dim();
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Matrix> out;
  do {
    for (int signs = 0; signs < (1 << d); ++signs) {
      Matrix p = Matrix::Zero(d, d);
      for (int i = 0; i < d; ++i) p(perm[i], i) = (signs >> i) & 1 ? -1.0 : 1.0;
      const LieFrame image = frame.change_basis(p);
      double diff = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k) diff = std::max(diff, std::abs(image(i, j, k) - frame(i, j, k)));
      if (diff <= tol * std::max(1.0, frame.max_abs())) out.push_back(p);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

namespace detail {

inline int metric_param_count(int d, MetricParameterization p) {
  return p == MetricParameterization::Diagonal ? d - 1 : d * (d + 1) / 2 - 1;
}

/// Traceless symmetric S from its free entries.
inline Matrix log_metric(const Vector& s, int d, MetricParameterization p) {
  Matrix out = Matrix::Zero(d, d);
  int k = 0;
  double trace = 0.0;
  if (p == MetricParameterization::Diagonal) {
    for (int i = 0; i + 1 < d; ++i) {
      out(i, i) = s[k++];
      trace += out(i, i);
    }
  } else {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        if (i == d - 1 && j == d - 1) break;
        out(i, j) = out(j, i) = s[k++];
        if (i == j) trace += out(i, i);
      }
  }
  out(d - 1, d - 1) = -trace;
  return out;
}

inline Matrix symmetric_exp(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

struct Unpacked {
  Matrix gram;
  Vector x;
  double lambda;
};

inline Unpacked unpack(const Vector& p, int d, MetricParameterization param) {
  const int nm = metric_param_count(d, param);
  Matrix s = log_metric(p.head(nm), d, param);
  Matrix gram = param == MetricParameterization::Diagonal
                    ? Matrix(s.diagonal().array().exp().matrix().asDiagonal())
                    : symmetric_exp(s);
  gram = 0.5 * (gram + gram.transpose());
  return {gram, p.segment(nm, d), p[nm + d]};
}

/// Upper triangle of the QE tensor in a g-orthonormal frame, off-diagonal
/// entries weighted by sqrt(2) so the Euclidean norm is the Frobenius norm.
inline std::optional<Vector> residual_vector(const LieFrame& frame, const Vector& p, double m,
                                             MetricParameterization param) {
  const int d = frame.dim();
  if (!p.allFinite() || p.head(metric_param_count(d, param)).cwiseAbs().maxCoeff() > 30.0)
    return std::nullopt;
  try {
    const Unpacked u = unpack(p, d, param);
    const FrameMetric g(u.gram);
    const CurvaturePack pack = curvature(frame, g);
    const Matrix res = g.to_orthonormal(bakry_emery(pack, g, u.x, m) - u.lambda * g.gram());
    Vector r(d * (d + 1) / 2);
    int k = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) r[k++] = i == j ? res(i, i) : std::sqrt(2.0) * 0.5 * (res(i, j) + res(j, i));
    if (!r.allFinite()) return std::nullopt;
    return r;
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// Halton point with a Cranley-Patterson shift.
inline Vector shifted_halton(int index, const Vector& shift) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  Vector out(shift.size());
  for (int k = 0; k < shift.size(); ++k) {
    const int b = primes[k % 20];
    double f = 1.0, r = 0.0;
    for (int i = index; i > 0; i /= b) {
      f /= b;
      r += f * (i % b);
    }
    out[k] = std::fmod(r + shift[k], 1.0);
  }
  return out;
}

struct RunResult {
  Vector p;
  double norm = 0.0;
  bool finite = true;
};

/// Levenberg-Marquardt with a central-difference Jacobian.
inline RunResult levenberg_marquardt(const LieFrame& frame, Vector p, const SolverConfig& cfg) {
  auto eval = [&](const Vector& q) {
    return residual_vector(frame, q, cfg.m, cfg.metric_parameterization);
  };
  auto r = eval(p);
  if (!r) return {p, 0.0, false};
  double cost = r->squaredNorm();
  double mu = 1e-3;
  const int np = static_cast<int>(p.size());
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (std::sqrt(cost) <= 1e-13) break;
    Matrix jac(r->size(), np);
    for (int k = 0; k < np; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(p[k]));
      Vector a = p, b = p;
      a[k] += h;
      b[k] -= h;
      const auto ra = eval(a), rb = eval(b);
      if (!ra || !rb) return {p, std::sqrt(cost), false};
      jac.col(k) = (*ra - *rb) / (2.0 * h);
    }
    const Matrix jtj = jac.transpose() * jac;
    const Vector grad = jac.transpose() * *r;
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      Matrix lhs = jtj;
      lhs.diagonal().array() += mu * (jtj.diagonal().array() + 1.0);
      const Vector step = lhs.ldlt().solve(-grad);
      const Vector trial = p + step;
      const auto rt = eval(trial);
      if (rt && rt->squaredNorm() < cost) {
        const double rel = step.norm() / (1.0 + p.norm());
        p = trial;
        r = rt;
        cost = rt->squaredNorm();
        mu = std::max(mu / 3.0, 1e-12);
        improved = true;
        if (rel < 1e-15) it = cfg.max_iterations;
      } else {
        mu *= 4.0;
      }
    }
    if (!improved) break;
  }
  return {p, std::sqrt(cost), true};
}

inline double record_distance(const SolutionRecord& a, const SolutionRecord& b) {
  double d = std::abs(a.lambda - b.lambda);
  d = std::max(d, (a.g.gram() - b.g.gram()).cwiseAbs().maxCoeff());
  d = std::max(d, (a.x - b.x).cwiseAbs().maxCoeff());
  return d;
}

/// Lexicographic key used to order records independently of start order.
inline bool record_less(const SolutionRecord& a, const SolutionRecord& b) {
  if (a.trivial != b.trivial) return !a.trivial;
  if (std::abs(a.lambda - b.lambda) > 1e-9) return a.lambda < b.lambda;
  const Matrix& ga = a.g.gram();
  const Matrix& gb = b.g.gram();
  for (int i = 0; i < ga.size(); ++i)
    if (std::abs(ga.data()[i] - gb.data()[i]) > 1e-9) return ga.data()[i] < gb.data()[i];
  for (int i = 0; i < a.x.size(); ++i)
    if (std::abs(a.x[i] - b.x[i]) > 1e-9) return a.x[i] < b.x[i];
  return false;
}

}  // namespace detail

/// Image of a record under a frame automorphism P: g -> P^T g P, X -> P^{-1} X.
inline SolutionRecord apply_automorphism(const SolutionRecord& r, const Matrix& p) {
  SolutionRecord out = r;
  out.g = FrameMetric(p.transpose() * r.g.gram() * p);
  out.x = p.inverse() * r.x;
  return out;
}

/// Scale normalisation g -> c^2 g, X -> X/c^2, lambda -> lambda/c^2 with
/// det(c^2 g) = 1.
inline SolutionRecord normalize_scale(const SolutionRecord& r) {
  const int d = r.g.dim();
  const double c2 = std::pow(r.g.gram().determinant(), -1.0 / d);
  SolutionRecord out = r;
  out.g = r.g.scaled(c2);
  out.x = r.x / c2;
  out.lambda = r.lambda / c2;
  return out;
}

inline SolveReport solve_detailed(const LieFrame& frame, const SolverConfig& cfg) {
  cfg.validate();
  const int d = frame.dim();
  const int nm = detail::metric_param_count(d, cfg.metric_parameterization);
  const int np = nm + d + 1;
  const std::vector<Matrix> autos =
      cfg.automorphisms.empty() ? signed_permutation_automorphisms(frame) : cfg.automorphisms;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector shift(np - 1);
  for (int k = 0; k < shift.size(); ++k) shift[k] = unit(rng);

  SolveReport report;
  std::vector<SolutionRecord> found;
  for (int s = 0; s < cfg.multistart_count; ++s) {
    const Vector u = detail::shifted_halton(s + 1, shift);
    Vector p(np);
    for (int k = 0; k < nm; ++k) p[k] = cfg.log_metric_box * (2.0 * u[k] - 1.0);
    for (int k = 0; k < d; ++k) p[nm + k] = cfg.x_box * (2.0 * u[nm + k] - 1.0);
    {
      const detail::Unpacked start = detail::unpack(p, d, cfg.metric_parameterization);
      p[nm + d] = fit_lambda(frame, FrameMetric(start.gram), start.x, cfg.m).lambda;
    }
    const detail::RunResult run = detail::levenberg_marquardt(frame, p, cfg);
    if (!run.finite) {
      ++report.abandoned;
      continue;
    }
    if (run.norm > cfg.convergence_tol) continue;

    const detail::Unpacked sol = detail::unpack(run.p, d, cfg.metric_parameterization);
    SolutionRecord rec;
    rec.g = FrameMetric(sol.gram);
    rec.x = sol.x;
    rec.m = cfg.m;
    rec.lambda = sol.lambda;
    const QETriple triple = rec.triple(frame);
    rec.residual = qe_residual(triple).norm;
    if (rec.residual > cfg.convergence_tol) continue;
    ++report.converged;
    rec.killing_residual = is_killing(frame, rec.g, rec.x, cfg.policy).residual;
    rec.trivial = rec.g.norm(rec.x) <= cfg.trivial_tol;
    if (d == 3 && !rec.trivial) {
      try {
        NumericPolicy loose = cfg.policy;
        loose.qe_gate = std::max(loose.qe_gate, cfg.convergence_tol);
        loose.structural = std::max(loose.structural, cfg.convergence_tol);
        rec.classification = classify_thurston(triple, loose).bucket;
      } catch (const Error&) {
        rec.classification.reset();
      }
    }
    if (!exclusion_check(rec.m, rec.lambda)) {
      report.excluded.push_back(rec);
      continue;
    }
    found.push_back(std::move(rec));
  }

  // Canonical representative per automorphism orbit, then order-normalised dedup.
  for (auto& rec : found) {
    SolutionRecord best = rec;
    for (const Matrix& p : autos) {
      SolutionRecord img = apply_automorphism(rec, p);
      if (detail::record_less(img, best)) best = img;
    }
    best.residual = rec.residual;
    best.killing_residual = rec.killing_residual;
    rec = std::move(best);
  }
  std::stable_sort(found.begin(), found.end(), detail::record_less);
  for (auto& rec : found) {
    bool dup = false;
    for (const auto& kept : report.records)
      if (detail::record_distance(rec, kept) <= cfg.dedup_tol) dup = true;
    if (!dup) report.records.push_back(std::move(rec));
  }
  return report;
}

inline std::vector<SolutionRecord> solve(const LieFrame& frame, const SolverConfig& cfg) {
  return solve_detailed(frame, cfg).records;
}

// ---------------------------------------------------------------------------

enum class LambdaSign { Negative = -1, Zero = 0, Positive = 1 };

struct LambdaRow {
  double t = 1.0;
  double lambda_t = 0.0;
  LambdaSign sign = LambdaSign::Zero;
};

struct LambdaSignTable {
  // Einstein member of the family (X = 0 at t = 1), scaled so that its
  // Einstein constant |A|^2 equals n - 1.
  SolutionRecord anchor;
  FrameVector vertical;      // unit vertical field of the anchor
  VariationInput input;
  std::vector<LambdaRow> rows;
  std::optional<double> crossing;
};

namespace detail {

/// A g-unit Killing direction with nonzero A-tensor for a record, if any.
inline std::optional<FrameVector> fibration_direction(const LieFrame& frame, const SolutionRecord& rec,
                                                      const NumericPolicy& policy) {
  std::vector<FrameVector> candidates;
  if (!rec.trivial) candidates.push_back(rec.x);
  for (int i = 0; i < frame.dim(); ++i) candidates.push_back(basis_vector(frame.dim(), i));
  for (const auto& c : candidates) {
    try {
      const SubmersionData sd = build_submersion(frame, rec.g, c / rec.g.norm(c), policy);
      if (sd.a_norm_sq > policy.structural) return sd.vertical;
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Tabulates lambda_t along the canonical variation through a discovered
/// solution, re-anchored at its Einstein member, and locates the sign change.
inline LambdaSignTable scan_lambda_sign(const LieFrame& frame, const SolverConfig& cfg,
                                        const std::vector<double>& t_grid) {
  const std::vector<SolutionRecord> records = solve(frame, cfg);
  for (const auto& rec : records) {
    const auto dir = detail::fibration_direction(frame, rec, cfg.policy);
    if (!dir) continue;
    // Only anchors whose X lies along the fibre generate the family.
    const double x_norm = rec.g.norm(rec.x);
    if (!rec.trivial && (rec.x - rec.g.inner(rec.x, *dir) * *dir).norm() > cfg.dedup_tol * (1.0 + x_norm))
      continue;
    const SubmersionData sd = measure_submersion(frame, rec.g, *dir);
    const VariationInput vi = VariationInput::from_submersion(sd, cfg.m, x_norm * x_norm);
    const auto tstar = einstein_point(vi);
    if (!tstar) continue;

    LambdaSignTable table;
    table.anchor = rec;
    table.anchor.g = canonical_variation_metric(rec.g, sd.vertical, *tstar);
    table.anchor.x = FrameVector::Zero(frame.dim());
    table.anchor.trivial = true;
    table.vertical = sd.vertical / std::sqrt(*tstar);
    // Unit space-form scale: Einstein constant n - 1 (the round sphere on SU(2)).
    const int n = frame.dim();
    const double einstein_lambda = measure_submersion(frame, table.anchor.g, table.vertical).a_norm_sq;
    if (einstein_lambda > cfg.policy.structural) {
      const double c2 = einstein_lambda / (n - 1);
      table.anchor.g = table.anchor.g.scaled(c2);
      table.vertical /= std::sqrt(c2);
    }
    const SubmersionData sd0 = measure_submersion(frame, table.anchor.g, table.vertical);
    table.input = VariationInput::from_submersion(sd0, cfg.m, 0.0);
    table.anchor.lambda = lambda_t(table.input, 1.0);
    table.anchor.residual = qe_residual(table.anchor.triple(frame)).norm;
    table.anchor.killing_residual = 0.0;
    table.anchor.classification.reset();

    for (double t : t_grid) {
      LambdaRow row;
      row.t = t;
      row.lambda_t = lambda_t(table.input, t);
      row.sign = std::abs(row.lambda_t) <= 1e-8 ? LambdaSign::Zero
                 : row.lambda_t > 0.0       ? LambdaSign::Positive
                                            : LambdaSign::Negative;
      table.rows.push_back(row);
    }

    // lambda_t is decreasing; bracket the root and bisect.
    double lo = 1.0, hi = 2.0;
    while (lambda_t(table.input, lo) < 0.0 && lo > 1e-12) lo *= 0.5;
    while (lambda_t(table.input, hi) > 0.0 && hi < 1e12) hi *= 2.0;
    if (lambda_t(table.input, lo) >= 0.0 && lambda_t(table.input, hi) <= 0.0) {
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (lambda_t(table.input, mid) > 0.0 ? lo : hi) = mid;
      }
      table.crossing = 0.5 * (lo + hi);
    }
    return table;
  }
  throw Error(Errc::no_family, "no solution anchors a canonical variation with nonzero A-tensor");
}

}  // namespace qeframe
