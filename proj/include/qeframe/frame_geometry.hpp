#pragma once

// Riemannian geometry of left-invariant metrics written in a frame of
// invariant vector fields with constant structure coefficients. Every tensor
// is a finite array of frame components, so curvature reduces to linear
// algebra on d x d (x d x d) arrays.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qeframe/errors.hpp"

namespace qeframe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense rank-3 array indexed (i, j, k), row-major.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

  int dim() const { return dim_; }
  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
  const std::vector<double>& data() const { return data_; }

  /// Sets c(i, j, k) = value and c(j, i, k) = -value.
  void set_bracket(int i, int j, int k, double value) {
    (*this)(i, j, k) = value;
    (*this)(j, i, k) = -value;
  }

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dim_ + j) * dim_ + k;
  }
  int dim_ = 0;
  std::vector<double> data_;
};

/// Dense rank-4 array indexed (i, j, k, l), row-major.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int dim)
      : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

  int dim() const { return dim_; }
  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * dim_ + j) * dim_ + k) * dim_ + l;
  }
  int dim_ = 0;
  std::vector<double> data_;
};

/// Structure constants of a frame: [e_i, e_j] = sum_k c(i,j,k) e_k.
/// Construction validates antisymmetry and the Jacobi identity.
class LieFrame {
 public:
  LieFrame(int dim, Tensor3 brackets, const NumericPolicy& policy = {})
      : dim_(dim), c_(std::move(brackets)) {
    if (dim_ <= 0) throw Error(Errc::invalid_input, "frame dimension must be positive");
    if (c_.dim() != dim_) throw Error(Errc::invalid_input, "bracket array has wrong dimension");
    validate(policy);
  }

  /// The abelian frame of dimension d.
  static LieFrame abelian(int dim) { return LieFrame(dim, Tensor3(dim)); }

  int dim() const { return dim_; }
  double operator()(int i, int j, int k) const { return c_(i, j, k); }
  const Tensor3& brackets() const { return c_; }

  /// Coefficients of [v, w] for frame vectors v, w.
  Vector bracket(const Vector& v, const Vector& w) const {
    Vector out = Vector::Zero(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        const double vw = v[i] * w[j];
        if (vw == 0.0) continue;
        for (int k = 0; k < dim_; ++k) out[k] += vw * c_(i, j, k);
      }
    return out;
  }

  /// Matrix of ad_v: column j holds [v, e_j].
  Matrix ad(const Vector& v) const {
    Matrix out = Matrix::Zero(dim_, dim_);
    for (int j = 0; j < dim_; ++j)
      for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < dim_; ++k) out(k, j) += v[i] * c_(i, j, k);
    return out;
  }

  /// Largest violation of the Jacobi identity over all index tuples.
  double jacobi_defect() const {
    double worst = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          for (int l = 0; l < dim_; ++l) {
            double s = 0.0;
            for (int m = 0; m < dim_; ++m)
              s += c_(i, j, m) * c_(m, k, l) + c_(j, k, m) * c_(m, i, l) +
                   c_(k, i, m) * c_(m, j, l);
            worst = std::max(worst, std::abs(s));
          }
    return worst;
  }

  double max_abs() const {
    double worst = 0.0;
    for (double x : c_.data()) worst = std::max(worst, std::abs(x));
    return worst;
  }

  /// Structure constants in the basis e'_a = sum_i basis(i, a) e_i.
  LieFrame change_basis(const Matrix& basis) const {
    const Matrix inv = basis.inverse();
    Tensor3 out(dim_);
    for (int a = 0; a < dim_; ++a)
      for (int b = 0; b < dim_; ++b) {
        const Vector br = bracket(basis.col(a), basis.col(b));
        const Vector coeffs = inv * br;
        for (int k = 0; k < dim_; ++k) out(a, b, k) = coeffs[k];
      }
    return LieFrame(dim_, std::move(out));
  }

 private:
  void validate(const NumericPolicy& policy) const {
    for (double x : c_.data())
      if (!std::isfinite(x)) throw Error(Errc::invalid_input, "non-finite structure constant");
    const double scale = std::max(1.0, max_abs());
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          if (std::abs(c_(i, j, k) + c_(j, i, k)) > policy.validation * scale)
            throw Error(Errc::invalid_input, "structure constants are not antisymmetric");
    // Jacobi is quadratic in c, so the tolerance scales with |c|^2.
    if (jacobi_defect() > policy.validation * scale * scale)
      throw Error(Errc::jacobi_violation, "structure constants violate the Jacobi identity");
  }

  int dim_;
  Tensor3 c_;
};

/// Gram matrix g_ij = g(e_i, e_j) of a left-invariant metric.
class FrameMetric {
 public:
  FrameMetric() = default;
  explicit FrameMetric(Matrix gram, const NumericPolicy& policy = {}) : gram_(std::move(gram)) {
    if (gram_.rows() == 0 || gram_.rows() != gram_.cols())
      throw Error(Errc::invalid_input, "Gram matrix must be square and non-empty");
    if (!gram_.allFinite()) throw Error(Errc::invalid_input, "non-finite Gram entry");
    const double scale = std::max(1.0, gram_.cwiseAbs().maxCoeff());
    if ((gram_ - gram_.transpose()).cwiseAbs().maxCoeff() > policy.validation * scale)
      throw Error(Errc::invalid_input, "Gram matrix is not symmetric");
    gram_ = 0.5 * (gram_ + gram_.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= 0.0)
      throw Error(Errc::not_positive_definite, "Gram matrix is not positive definite");
    inverse_ = gram_.inverse();
    // Gram-Schmidt on e_1..e_d in frame order. With g = L L^T this is exactly
    // the upper-triangular L^{-T}.
    Eigen::LLT<Matrix> llt(gram_);
    if (llt.info() != Eigen::Success)
      throw Error(Errc::not_positive_definite, "Cholesky factorisation failed");
    const Matrix lower = llt.matrixL();
    orthonormal_ = lower.transpose().triangularView<Eigen::Upper>().solve(
        Matrix::Identity(dim(), dim()));
  }

  static FrameMetric identity(int dim) { return FrameMetric(Matrix::Identity(dim, dim)); }
  static FrameMetric diagonal(const std::vector<double>& entries) {
    Vector d = Eigen::Map<const Vector>(entries.data(), static_cast<Eigen::Index>(entries.size()));
    return FrameMetric(d.asDiagonal().toDenseMatrix());
  }

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Matrix& gram() const { return gram_; }
  const Matrix& inverse() const { return inverse_; }

  /// Columns are a g-orthonormal frame (Gram-Schmidt of e_1..e_d).
  const Matrix& orthonormal_frame() const { return orthonormal_; }

  double inner(const Vector& v, const Vector& w) const { return v.dot(gram_ * w); }
  double norm(const Vector& v) const { return std::sqrt(std::max(0.0, inner(v, v))); }
  /// The covector v^flat(e_i) = g(v, e_i).
  Vector flat(const Vector& v) const { return gram_ * v; }

  /// Components of a (0,2) tensor in the g-orthonormal frame.
  Matrix to_orthonormal(const Matrix& bilinear) const {
    return orthonormal_.transpose() * bilinear * orthonormal_;
  }
  /// Frobenius norm of a (0,2) tensor measured in the g-orthonormal frame.
  double tensor_norm(const Matrix& bilinear) const { return to_orthonormal(bilinear).norm(); }

  FrameMetric scaled(double factor) const { return FrameMetric(factor * gram_); }

 private:
  Matrix gram_;
  Matrix inverse_;
  Matrix orthonormal_;
};

/// Coefficients x^i of an invariant vector field X = sum x^i e_i.
using FrameVector = Vector;

inline FrameVector basis_vector(int dim, int index) {
  FrameVector v = FrameVector::Zero(dim);
  v[index] = 1.0;
  return v;
}

/// Connection and curvature of a frame metric.
///   gamma(i, j, k):   nabla_{e_i} e_j = sum_k gamma(i,j,k) e_k
///   riemann(i,j,k,l): g(R(e_i, e_j) e_k, e_l)
/// with R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z, so
/// the unit round sphere has sectional curvature +1.
struct CurvaturePack {
  Tensor3 gamma;
  Tensor4 riemann;
  Matrix ricci;
  double scal = 0.0;
  bool has_curvature = false;

  int dim() const { return gamma.dim(); }

  /// nabla_v w for frame vectors v, w (constant coefficients).
  Vector covariant(const Vector& v, const Vector& w) const {
    const int d = dim();
    Vector out = Vector::Zero(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double vw = v[i] * w[j];
        if (vw == 0.0) continue;
        for (int k = 0; k < d; ++k) out[k] += vw * gamma(i, j, k);
      }
    return out;
  }

  /// Matrix of Y -> nabla_Y w: column i holds nabla_{e_i} w.
  Matrix nabla_of(const Vector& w) const {
    const int d = dim();
    Matrix out(d, d);
    for (int i = 0; i < d; ++i) out.col(i) = covariant(basis_vector(d, i), w);
    return out;
  }

  /// R(v1, v2, v3, v4) for frame vectors.
  double riemann_form(const Vector& v1, const Vector& v2, const Vector& v3,
                      const Vector& v4) const {
    const int d = dim();
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      if (v1[i] == 0.0) continue;
      for (int j = 0; j < d; ++j) {
        if (v2[j] == 0.0) continue;
        for (int k = 0; k < d; ++k) {
          if (v3[k] == 0.0) continue;
          for (int l = 0; l < d; ++l) s += v1[i] * v2[j] * v3[k] * v4[l] * riemann(i, j, k, l);
        }
      }
    }
    return s;
  }
};

inline void check_compatible(const LieFrame& frame, const FrameMetric& g) {
  if (frame.dim() != g.dim())
    throw Error(Errc::invalid_input, "frame and metric dimensions differ");
}

inline void check_vector(const LieFrame& frame, const FrameVector& v) {
  if (v.size() != frame.dim()) throw Error(Errc::invalid_input, "vector has wrong dimension");
  if (!v.allFinite()) throw Error(Errc::invalid_input, "non-finite vector entry");
}

/// Levi-Civita connection from the left-invariant Koszul formula
///   2 g(nabla_i e_j, e_k) = g([e_i,e_j],e_k) - g([e_j,e_k],e_i) + g([e_k,e_i],e_j).
inline CurvaturePack koszul_connection(const LieFrame& frame, const FrameMetric& g) {
  check_compatible(frame, g);
  const int d = frame.dim();
  const Matrix& G = g.gram();
  // lowered(i,j,k) = g([e_i,e_j], e_k)
  Tensor3 lowered(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) s += frame(i, j, l) * G(l, k);
        lowered(i, j, k) = s;
      }
  CurvaturePack pack;
  pack.gamma = Tensor3(d);
  const Matrix& Ginv = g.inverse();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Vector low(d);
      for (int k = 0; k < d; ++k)
        low[k] = 0.5 * (lowered(i, j, k) - lowered(j, k, i) + lowered(k, i, j));
      const Vector up = Ginv * low;
      for (int k = 0; k < d; ++k) pack.gamma(i, j, k) = up[k];
    }
  return pack;
}

/// Full curvature: connection, Riemann tensor, Ricci tensor and scalar curvature.
inline CurvaturePack curvature(const LieFrame& frame, const FrameMetric& g) {
  CurvaturePack pack = koszul_connection(frame, g);
  const int d = frame.dim();
  const Tensor3& gm = pack.gamma;
  const Matrix& G = g.gram();

  // R(e_i,e_j)e_k expanded in the frame: comp(i,j,k,p).
  Tensor4 comp(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int p = 0; p < d; ++p) {
          double s = 0.0;
          for (int l = 0; l < d; ++l) {
            s += gm(j, k, l) * gm(i, l, p) - gm(i, k, l) * gm(j, l, p);
            s -= frame(i, j, l) * gm(l, k, p);
          }
          comp(i, j, k, p) = s;
        }
  pack.riemann = Tensor4(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0.0;
          for (int p = 0; p < d; ++p) s += comp(i, j, k, p) * G(p, l);
          pack.riemann(i, j, k, l) = s;
        }

  // Ric(e_j, e_k) = sum_{i,l} g^{il} R(e_i, e_j, e_k, e_l)
  const Matrix& Ginv = g.inverse();
  pack.ricci = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      double s = 0.0;
      for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) s += Ginv(i, l) * pack.riemann(i, j, k, l);
      pack.ricci(j, k) = s;
    }
  pack.scal = (Ginv * pack.ricci).trace();
  pack.has_curvature = true;
  return pack;
}

/// Sectional curvature of the plane spanned by v, w.
inline double sectional(const CurvaturePack& pack, const FrameMetric& g, const FrameVector& v,
                        const FrameVector& w, const NumericPolicy& policy = {}) {
  if (!pack.has_curvature) throw Error(Errc::invalid_input, "curvature pack has no Riemann tensor");
  const double vv = g.inner(v, v), ww = g.inner(w, w), vw = g.inner(v, w);
  const double denom = vv * ww - vw * vw;
  if (denom < policy.degenerate) throw Error(Errc::degenerate_plane, "vectors span a degenerate plane");
  return pack.riemann_form(v, w, w, v) / denom;
}

/// (L_X g)(e_i, e_j) = g(nabla_{e_i} X, e_j) + g(nabla_{e_j} X, e_i).
inline Matrix lie_derivative_metric(const CurvaturePack& pack, const FrameMetric& g,
                                    const FrameVector& x) {
  const Matrix nabla = pack.nabla_of(x);  // column i = nabla_{e_i} X
  const Matrix lowered = nabla.transpose() * g.gram();  // (i, j) = g(nabla_i X, e_j)
  return lowered + lowered.transpose();
}

inline Matrix lie_derivative_metric(const LieFrame& frame, const FrameMetric& g,
                                    const FrameVector& x) {
  check_vector(frame, x);
  return lie_derivative_metric(koszul_connection(frame, g), g, x);
}

struct KillingReport {
  bool killing = false;
  double residual = 0.0;  // |L_X g| in the g-orthonormal frame
};

inline KillingReport is_killing(const LieFrame& frame, const FrameMetric& g, const FrameVector& x,
                                const NumericPolicy& policy = {}) {
  const double r = g.tensor_norm(lie_derivative_metric(frame, g, x));
  return {r <= policy.structural, r};
}

/// |nabla X|^2 = sum_a |nabla_{E_a} X|^2 over a g-orthonormal frame.
inline double nabla_norm_sq(const CurvaturePack& pack, const FrameMetric& g, const FrameVector& x) {
  const Matrix on = g.orthonormal_frame();
  const Matrix nabla = pack.nabla_of(x) * on;  // column a = nabla_{E_a} X
  return (nabla.transpose() * g.gram() * nabla).trace();
}

/// Residuals of the identities every Levi-Civita curvature pack must satisfy,
/// measured in the g-orthonormal frame.
struct StructureReport {
  double metric_compatibility = 0.0;
  double torsion = 0.0;
  double antisymmetry_12 = 0.0;
  double antisymmetry_34 = 0.0;
  double pair_symmetry = 0.0;
  double bianchi = 0.0;
  double ricci_symmetry = 0.0;
  double ricci_contraction = 0.0;
  double scal_trace = 0.0;

  double worst() const {
    return std::max({metric_compatibility, torsion, antisymmetry_12, antisymmetry_34,
                     pair_symmetry, bianchi, ricci_symmetry, ricci_contraction, scal_trace});
  }
};

inline StructureReport check_structure(const LieFrame& frame, const FrameMetric& g,
                                       const CurvaturePack& pack) {
  const int d = frame.dim();
  const Matrix& P = g.orthonormal_frame();
  std::vector<Vector> E(d);
  for (int a = 0; a < d; ++a) E[a] = P.col(a);

  StructureReport rep;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const Vector nab = pack.covariant(E[a], E[b]);
      const Vector nba = pack.covariant(E[b], E[a]);
      const Vector tors = nab - nba - frame.bracket(E[a], E[b]);
      rep.torsion = std::max(rep.torsion, g.norm(tors));
      for (int c = 0; c < d; ++c) {
        const double mc = g.inner(nab, E[c]) + g.inner(E[b], pack.covariant(E[a], E[c]));
        rep.metric_compatibility = std::max(rep.metric_compatibility, std::abs(mc));
      }
    }

  Tensor4 r(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) r(a, b, c, e) = pack.riemann_form(E[a], E[b], E[c], E[e]);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          rep.antisymmetry_12 = std::max(rep.antisymmetry_12, std::abs(r(a, b, c, e) + r(b, a, c, e)));
          rep.antisymmetry_34 = std::max(rep.antisymmetry_34, std::abs(r(a, b, c, e) + r(a, b, e, c)));
          rep.pair_symmetry = std::max(rep.pair_symmetry, std::abs(r(a, b, c, e) - r(c, e, a, b)));
          rep.bianchi = std::max(rep.bianchi,
                                 std::abs(r(a, b, c, e) + r(b, c, a, e) + r(c, a, b, e)));
        }
  const Matrix ric_on = g.to_orthonormal(pack.ricci);
  double scal = 0.0;
  for (int b = 0; b < d; ++b) {
    for (int c = 0; c < d; ++c) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += r(a, b, c, a);
      rep.ricci_contraction = std::max(rep.ricci_contraction, std::abs(s - ric_on(b, c)));
      rep.ricci_symmetry = std::max(rep.ricci_symmetry, std::abs(ric_on(b, c) - ric_on(c, b)));
    }
    scal += ric_on(b, b);
  }
  rep.scal_trace = std::abs(scal - pack.scal);
  return rep;
}

}  // namespace qeframe
