#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace qeframe;

namespace {

FrameMetric diag(std::initializer_list<double> e) { return FrameMetric::diagonal(std::vector<double>(e)); }

QETriple berger_triple(double t, double m) {
  return {frames::su2(), diag({t, 1, 1}), berger_coefficient(t, m) * basis_vector(3, 0), m, 4.0 - 2.0 * t};
}

QETriple nil_triple() { return {frames::heisenberg(), diag({1, 1, 4}), basis_vector(3, 2), 1.0, -2.0}; }

QETriple product_triple() { return {frames::h2_times_r(), FrameMetric::identity(3), basis_vector(3, 2), 1.0, -1.0}; }

}  // namespace

TEST(QeResidual, RoundSphereIsEinstein) {
  const QETriple t{frames::su2(), FrameMetric::identity(3), Vector::Zero(3), 1.0, 2.0};
  EXPECT_LE(qe_residual(t).norm, 1e-12);
}

TEST(QeResidual, BergerFamilyMember) {
  const QETriple t = berger_triple(2.0, 1.0);
  EXPECT_NEAR(t.x[0], std::sqrt(2.0), 1e-15);
  EXPECT_LE(qe_residual(t).norm, 1e-12);
}

TEST(QeResidual, WrongLambdaLeavesMultipleOfMetric) {
  const QETriple t{frames::su2(), FrameMetric::identity(3), Vector::Zero(3), 1.0, 1.0};
  const Residual r = qe_residual(t);
  EXPECT_NEAR((r.tensor - Matrix::Identity(3, 3)).norm(), 0.0, 1e-14);
  EXPECT_NEAR(r.norm, std::sqrt(3.0), 1e-14);
}

TEST(QeResidual, ZeroMIsRejected) {
  QETriple t = berger_triple(2.0, 1.0);
  t.m = 0.0;
  try {
    qe_residual(t);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_parameter);
  }
  EXPECT_THROW(fit_lambda(t.frame, t.g, t.x, 0.0), Error);
}

TEST(FitLambda, Examples) {
  const LambdaFit round = fit_lambda(frames::su2(), FrameMetric::identity(3), Vector::Zero(3), 1.0);
  EXPECT_NEAR(round.lambda, 2.0, 1e-14);
  EXPECT_NEAR(round.residual, 0.0, 1e-14);
  const QETriple b = berger_triple(3.0, 1.0);
  EXPECT_NEAR(fit_lambda(b.frame, b.g, b.x, b.m).lambda, -2.0, 1e-12);
  EXPECT_NEAR(fit_lambda(LieFrame::abelian(3), FrameMetric::identity(3), Vector::Zero(3), 1.0).lambda, 0.0, 0.0);
}

TEST(FitLambda, RecoversStoredLambdaOnExactTriples) {
  for (double m : {1.0, 2.0, 5.0})
    for (double t : {1.25, 1.5, 2.0, 3.0, 4.0}) {
      const QETriple tr = berger_triple(t, m);
      EXPECT_NEAR(fit_lambda(tr.frame, tr.g, tr.x, m).lambda, tr.lambda, 1e-10);
    }
  const QETriple n = nil_triple();
  EXPECT_NEAR(fit_lambda(n.frame, n.g, n.x, n.m).lambda, -2.0, 1e-10);
}

TEST(QeReport, FieldsOnBerger) {
  const QEReport r = qe_report(berger_triple(2.0, 1.0));
  EXPECT_LE(r.residual_norm, 1e-12);
  EXPECT_NEAR(r.lambda_fit, 0.0, 1e-12);
  EXPECT_NEAR(r.x_norm, 2.0, 1e-14);
  EXPECT_NEAR(r.scal, 4.0, 1e-13);
  EXPECT_NEAR(r.positivity, 4.0, 1e-13);
  EXPECT_LE(r.killing_residual, 1e-14);
  EXPECT_FALSE(r.trivial);
  EXPECT_TRUE(qe_report({frames::su2(), FrameMetric::identity(3), Vector::Zero(3), 1.0, 2.0}).trivial);
}

TEST(Bochner, VanishesForKillingFields) {
  EXPECT_NEAR(bochner_check(frames::su2(), FrameMetric::identity(3), basis_vector(3, 0)), 0.0, 1e-12);
  EXPECT_NEAR(bochner_check(frames::su2(), diag({2, 1, 1}), basis_vector(3, 0)), 0.0, 1e-12);
  fixtures::Random rnd(3);
  EXPECT_NEAR(bochner_check(LieFrame::abelian(3), FrameMetric(rnd.spd(3)), rnd.vec(3)), 0.0, 1e-12);
}

TEST(Bochner, RejectsNonKillingField) {
  try {
    bochner_check(frames::su2(), diag({2, 1, 1}), basis_vector(3, 1));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_killing);
  }
}

TEST(Positivity, BergerIsStrictlyPositive) {
  const PositivityResult p = positivity_trichotomy(berger_triple(2.0, 1.0));
  EXPECT_EQ(p.kind, Positivity::StrictlyPositive);
  EXPECT_NEAR(p.value, 4.0, 1e-12);
  EXPECT_NEAR(p.unit_nabla_sq, p.value, 1e-8);
}

TEST(Positivity, ProductIsParallel) {
  const PositivityResult p = positivity_trichotomy(product_triple());
  EXPECT_EQ(p.kind, Positivity::ParallelProduct);
  EXPECT_NEAR(p.value, 0.0, 1e-12);
}

TEST(Positivity, NilIsStrictlyPositive) {
  const PositivityResult p = positivity_trichotomy(nil_triple());
  EXPECT_EQ(p.kind, Positivity::StrictlyPositive);
  EXPECT_NEAR(p.value, 2.0, 1e-12);
}

TEST(Positivity, ErrorsOnTrivialAndNonSolutions) {
  try {
    positivity_trichotomy({frames::su2(), FrameMetric::identity(3), Vector::Zero(3), 1.0, 2.0});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::trivial_solution);
  }
  QETriple bad = berger_triple(2.0, 1.0);
  bad.lambda = 1.0;
  try {
    positivity_trichotomy(bad);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::precondition);
  }
}

TEST(Positivity, EqualsUnitNablaOnAllVerifiedTriples) {
  std::vector<QETriple> triples = {nil_triple(), product_triple()};
  for (double m : {1.0, 2.0, 5.0})
    for (double t : {1.25, 2.0, 4.0}) triples.push_back(berger_triple(t, m));
  for (const auto& t : triples) {
    const PositivityResult p = positivity_trichotomy(t);
    EXPECT_NEAR(p.value, p.unit_nabla_sq, 1e-8);
  }
}

TEST(Exclusion, NegativeMAndLambda) {
  EXPECT_FALSE(exclusion_check(-1.0, -1.0));
  EXPECT_TRUE(exclusion_check(1.0, -1.0));
  EXPECT_TRUE(exclusion_check(-1.0, 2.0));
  static_assert(!exclusion_check(-2.0, -0.5));
}

TEST(RicciEigenstructure, Examples) {
  const RicciSpectrum round = ricci_eigenstructure(frames::su2(), FrameMetric::identity(3));
  ASSERT_EQ(round.groups.size(), 1u);
  EXPECT_NEAR(round.groups[0].value, 2.0, 1e-12);
  EXPECT_EQ(round.groups[0].multiplicity, 3);

  const RicciSpectrum berger = ricci_eigenstructure(berger_triple(2.0, 1.0));
  ASSERT_EQ(berger.groups.size(), 2u);
  EXPECT_NEAR(berger.groups[0].value, 0.0, 1e-12);
  EXPECT_EQ(berger.groups[0].multiplicity, 2);
  EXPECT_NEAR(berger.groups[1].value, 4.0, 1e-12);
  EXPECT_EQ(berger.groups[1].multiplicity, 1);
  ASSERT_TRUE(berger.x_eigenvalue.has_value());
  EXPECT_NEAR(*berger.x_eigenvalue, 4.0, 1e-12);
  EXPECT_TRUE(*berger.x_eigenvalue_simple);
  // The simple eigenvector is along e1.
  const Vector v = berger.groups[1].vectors.col(0);
  EXPECT_NEAR(std::abs(v[0]) * std::sqrt(2.0), 1.0, 1e-12);

  const RicciSpectrum flat = ricci_eigenstructure(LieFrame::abelian(3), FrameMetric::identity(3));
  ASSERT_EQ(flat.groups.size(), 1u);
  EXPECT_EQ(flat.groups[0].multiplicity, 3);
  EXPECT_FALSE(flat.x_eigenvalue.has_value());
}

TEST(QeProperties, RescaleCovariance) {
  std::vector<QETriple> triples = {nil_triple(), product_triple(), berger_triple(1.5, 2.0)};
  // Perturbed (non-solution) triples exercise the residual scaling law too.
  QETriple off = berger_triple(3.0, 1.0);
  off.lambda += 0.3;
  triples.push_back(off);
  for (const auto& t : triples) {
    const Residual r = qe_residual(t);
    for (double s : {0.5, 2.0, 3.0}) {
      const QETriple scaled{t.frame, t.g.scaled(s * s), t.x / (s * s), t.m, t.lambda / (s * s)};
      const Residual rs = qe_residual(scaled);
      // Frame components of the residual are unchanged; the orthonormal norm drops by s^2.
      EXPECT_NEAR(rs.norm, r.norm / (s * s), 1e-12);
      EXPECT_LE((rs.tensor - r.tensor).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(QeProperties, CatalogSolutionsAreKilling) {
  for (const auto& e : entries())
    for (std::size_t i = 0; i < e.known_solutions.size(); ++i) {
      const QETriple t = e.triple(i);
      EXPECT_TRUE(is_killing(t.frame, t.g, t.x).killing) << e.name;
    }
}
