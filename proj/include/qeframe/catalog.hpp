#pragma once

// Built-in frames, metrics and known solutions. Every known solution is run
// through qe_residual, is_killing and bochner_check when the catalog is built.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "qeframe/qe_solver.hpp"

namespace qeframe {

struct KnownSolution {
  FrameVector x;
  double m = 1.0;
  double lambda = 0.0;
};

struct CatalogEntry {
  std::string name;
  LieFrame frame;
  FrameMetric metric;
  std::vector<KnownSolution> known_solutions;
  std::optional<FrameVector> submersion_vertical;  // g-unit
  std::optional<ThurstonBucket> expected_bucket;
  bool compact = true;
  std::string notes;

  QETriple triple(std::size_t i = 0) const {
    const KnownSolution& s = known_solutions.at(i);
    return {frame, metric, s.x, s.m, s.lambda};
  }
};

namespace frames {

/// [e_i, e_j] = 2 e_k for (i, j, k) cyclic; g = I is the unit round sphere.
inline LieFrame su2() {
  Tensor3 c(3);
  c.set_bracket(0, 1, 2, 2.0);
  c.set_bracket(1, 2, 0, 2.0);
  c.set_bracket(2, 0, 1, 2.0);
  return LieFrame(3, c);
}

/// [e1, e2] = e3.
inline LieFrame heisenberg() {
  Tensor3 c(3);
  c.set_bracket(0, 1, 2, 1.0);
  return LieFrame(3, c);
}

/// [e1, e2] = e2: the hyperbolic plane times a line.
inline LieFrame h2_times_r() {
  Tensor3 c(3);
  c.set_bracket(0, 1, 1, 1.0);
  return LieFrame(3, c);
}

}  // namespace frames

/// X coefficient on e1 for the Berger metric diag(t, 1, 1).
inline double berger_coefficient(double t, double m) { return std::sqrt(4.0 * m - 4.0 * m / t); }

inline CatalogEntry berger_entry(double t, const std::vector<double>& ms = {1.0}) {
  CatalogEntry e{"", frames::su2(), FrameMetric::diagonal({t, 1.0, 1.0}), {}, {}, {}, true, ""};
  char buf[32];
  std::snprintf(buf, sizeof buf, "berger_t%g", t);
  e.name = buf;
  for (double m : ms)
    e.known_solutions.push_back({berger_coefficient(t, m) * basis_vector(3, 0), m, 4.0 - 2.0 * t});
  e.submersion_vertical = basis_vector(3, 0) / std::sqrt(t);
  e.expected_bucket = ThurstonBucket::Spherical;
  e.notes = "SU(2) with the Hopf fibre stretched by t; X = sqrt(4m - 4m/t) e1, lambda = 4 - 2t";
  return e;
}

/// Throws if a known solution fails residual, Killing or Bochner checks.
inline void verify_entry(const CatalogEntry& e, double tol = 1e-10) {
  for (std::size_t i = 0; i < e.known_solutions.size(); ++i) {
    const QETriple t = e.triple(i);
    const std::string where = e.name + " solution " + std::to_string(i);
    if (qe_residual(t).norm > tol) throw Error(Errc::precondition, where + ": residual too large");
    if (!is_killing(e.frame, e.metric, t.x).killing) throw Error(Errc::precondition, where + ": X not Killing");
    if (std::abs(bochner_check(e.frame, e.metric, t.x)) > tol)
      throw Error(Errc::precondition, where + ": Bochner identity fails");
  }
}

inline std::vector<CatalogEntry> build_entries() {
  std::vector<CatalogEntry> out;
  {
    CatalogEntry e{"abelian", LieFrame::abelian(3), FrameMetric::identity(3), {}, {}, {}, true, ""};
    e.known_solutions.push_back({FrameVector::Zero(3), 1.0, 0.0});
    e.submersion_vertical = basis_vector(3, 0);
    e.notes = "flat torus; only the trivial solution";
    out.push_back(e);
  }
  {
    CatalogEntry e{"su2_round", frames::su2(), FrameMetric::identity(3), {}, {}, {}, true, ""};
    e.known_solutions.push_back({FrameVector::Zero(3), 1.0, 2.0});
    e.submersion_vertical = basis_vector(3, 0);
    e.notes = "unit round 3-sphere, Ric = 2g; vertical e1 gives the Hopf fibration";
    out.push_back(e);
  }
  for (double t : {1.5, 2.0, 3.0}) out.push_back(berger_entry(t, {1.0, 2.0}));
  {
    CatalogEntry e{"nil", frames::heisenberg(), FrameMetric::diagonal({1.0, 1.0, 4.0}), {}, {}, {}, true, ""};
    e.known_solutions.push_back({basis_vector(3, 2), 1.0, -2.0});
    e.submersion_vertical = 0.5 * basis_vector(3, 2);
    e.expected_bucket = ThurstonBucket::Nil;
    e.notes = "Heisenberg group, g = diag(1,1,a) with a = 4; X = sqrt(m) e3, lambda = -a/2";
    out.push_back(e);
  }
  {
    CatalogEntry e{"h2xr", frames::h2_times_r(), FrameMetric::identity(3), {}, {}, {}, false, ""};
    e.known_solutions.push_back({basis_vector(3, 2), 1.0, -1.0});
    e.submersion_vertical = basis_vector(3, 2);
    e.expected_bucket = ThurstonBucket::ProductSplit;
    e.notes = "hyperbolic plane times a line; X = sqrt(m) e3 is parallel; noncompact";
    out.push_back(e);
  }
  for (const auto& e : out) verify_entry(e);
  return out;
}

inline const std::vector<CatalogEntry>& entries() {
  static const std::vector<CatalogEntry> cache = build_entries();
  return cache;
}

inline const CatalogEntry& entry(const std::string& name) {
  for (const auto& e : entries())
    if (e.name == name) return e;
  throw Error(Errc::invalid_input, "unknown catalog entry: " + name);
}

// Closed-form recognisers for solver output -------------------------------

struct FamilyMatch {
  bool matched = false;
  double t = 0.0;      // family parameter after normalisation
  double error = 0.0;  // max deviation from the closed form
};

/// SU(2) frame: g = diag(a t, a, a) up to permutation, X along the odd axis.
/// After g -> g/a the record must read X = sqrt(4m - 4m/t) e_i, lambda = 4 - 2t.
inline FamilyMatch berger_family_match(const SolutionRecord& r, double tol = 1e-6) {
  FamilyMatch out;
  const Matrix& g = r.g.gram();
  if (g.rows() != 3) return out;
  const Matrix off = g - Matrix(g.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() > tol * g.cwiseAbs().maxCoeff()) return out;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double a = g(j, j);
    if (std::abs(g(k, k) - a) > tol * a) continue;
    Vector x = a * r.x;
    if (std::max(std::abs(x[j]), std::abs(x[k])) > tol) continue;
    const double t = g(i, i) / a;
    const double radicand = 4.0 * r.m - 4.0 * r.m / t;
    if (radicand < 0.0) continue;
    const double err = std::max(std::abs(std::abs(x[i]) - std::sqrt(radicand)),
                                std::abs(a * r.lambda - (4.0 - 2.0 * t)));
    if (err <= tol) return {true, t, err};
  }
  return out;
}

/// Heisenberg frame [e1,e2] = e3 with g = diag(p, q, r): the closed form is
/// X = sqrt(m/(pq)) e3 and lambda = -r/(2pq).
inline FamilyMatch nil_family_match(const SolutionRecord& r, double tol = 1e-6) {
  FamilyMatch out;
  const Matrix& g = r.g.gram();
  if (g.rows() != 3 || r.m <= 0.0) return out;
  const Matrix off = g - Matrix(g.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() > tol * g.cwiseAbs().maxCoeff()) return out;
  if (std::max(std::abs(r.x[0]), std::abs(r.x[1])) > tol) return out;
  const double pq = g(0, 0) * g(1, 1);
  const double err = std::max(std::abs(std::abs(r.x[2]) - std::sqrt(r.m / pq)),
                              std::abs(r.lambda + g(2, 2) / (2.0 * pq)));
  out.t = g(2, 2) / pq;
  out.error = err;
  out.matched = err <= tol;
  return out;
}

}  // namespace qeframe
