#pragma once

// Shared inputs for the test suites and the acceptance runner: named frames,
// the rational oracle bridged to library types, and seeded random frames and
// metrics.

#include <random>
#include <vector>

#include "oracles/rational_geometry.hpp"
#include "qeframe/qeframe.hpp"

namespace fixtures {

using qeframe::FrameMetric;
using qeframe::LieFrame;
using qeframe::Matrix;
using qeframe::Tensor3;
using qeframe::Vector;

inline LieFrame to_frame(const oracle::RationalFrame& rf) {
  Tensor3 c(rf.dim);
  for (int i = 0; i < rf.dim; ++i)
    for (int j = 0; j < rf.dim; ++j)
      for (int k = 0; k < rf.dim; ++k) c(i, j, k) = oracle::to_double(rf.c[i][j][k]);
  return LieFrame(rf.dim, c);
}

inline Matrix to_matrix(const oracle::QMat& m) {
  Matrix out(m.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = oracle::to_double(m[i][j]);
  return out;
}

inline oracle::QMat qmat(std::initializer_list<std::initializer_list<long long>> rows) {
  oracle::QMat out;
  for (const auto& r : rows) {
    oracle::QVec row;
    for (long long v : r) row.push_back(oracle::Q(v));
    out.push_back(row);
  }
  return out;
}

/// [e1,e2] = e2 + e4, [e1,e3] = e3, e4 central. With vertical e4 the
/// horizontal distribution is not Yang-Mills and the base is 3-dimensional.
inline LieFrame twisted_four() {
  Tensor3 c(4);
  c.set_bracket(0, 1, 1, 1.0);
  c.set_bracket(0, 1, 3, 1.0);
  c.set_bracket(0, 2, 2, 1.0);
  return LieFrame(4, c);
}

/// Frame of the direct product: brackets of a on the first block, b on the second.
inline LieFrame direct_sum(const LieFrame& a, const LieFrame& b) {
  const int da = a.dim(), d = a.dim() + b.dim();
  Tensor3 c(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        if (i < da && j < da && k < da) c(i, j, k) = a(i, j, k);
        if (i >= da && j >= da && k >= da) c(i, j, k) = b(i - da, j - da, k - da);
      }
  return LieFrame(d, c);
}

inline Matrix block_diagonal(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

/// Berger(1.5) x SU(2) with the second factor scaled to Ric = g: a
/// quasi-Einstein triple (lambda = 1) with X along e1. Fibring along e1 gives
/// a five-dimensional base S^2 x S^3 whose Ricci eigenvalues 4 and 1 differ,
/// so the base is not Einstein.
struct ProductFibration {
  LieFrame frame;
  FrameMetric g;
  qeframe::FrameVector unit_vertical;
  double x_coeff;  // X = x_coeff * unit_vertical
  double m;
  double lambda;
};

inline ProductFibration berger_times_sphere(double m = 1.0) {
  const double t = 1.5;
  const LieFrame frame = direct_sum(qeframe::frames::su2(), qeframe::frames::su2());
  const FrameMetric g(block_diagonal(Vector(Eigen::Vector3d(t, 1, 1)).asDiagonal(), 2.0 * Matrix::Identity(3, 3)));
  const qeframe::FrameVector u = qeframe::basis_vector(6, 0) / std::sqrt(t);
  return {frame, g, u, qeframe::berger_coefficient(t, m) * std::sqrt(t), m, 4.0 - 2.0 * t};
}

/// Milnor frame [e2,e3] = -a e1, [e3,e1] = b e2, [e1,e2] = b e3 of SL(2,R).
inline LieFrame sl2_milnor(double a, double b) {
  Tensor3 c(3);
  c.set_bracket(1, 2, 0, -a);
  c.set_bracket(2, 0, 1, b);
  c.set_bracket(0, 1, 2, b);
  return LieFrame(3, c);
}

/// Unimodular 3D frame c[i][j][l] = sum_k eps_ijk N_lk with N symmetric;
/// the Jacobi identity holds for every symmetric N.
inline Tensor3 unimodular_brackets(const Matrix& n) {
  Tensor3 c(3);
  const int eps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                            {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                            {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += eps[i][j][k] * n(l, k);
        c(i, j, l) = s;
      }
  return c;
}

class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  /// A A^T + floor * I with entries of A uniform in [-1, 1].
  Matrix spd(int d, double floor = 0.3) {
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = uniform(-1.0, 1.0);
    return a * a.transpose() + floor * Matrix::Identity(d, d);
  }

  Vector vec(int d, double scale = 1.0) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = uniform(-scale, scale);
    return v;
  }

  Matrix invertible(int d) {
    while (true) {
      Matrix a(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = uniform(-1.0, 1.0);
      a += 1.5 * Matrix::Identity(d, d);
      if (std::abs(a.determinant()) > 0.2) return a;
    }
  }

  LieFrame unimodular() {
    Matrix n(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) n(i, j) = n(j, i) = uniform(-2.0, 2.0);
    return LieFrame(3, unimodular_brackets(n));
  }

 private:
  std::mt19937_64 rng_;
};

/// (frame, metric) pairs cycling through SU(2), Nil, H^2 x R, abelian and
/// random unimodular frames, each with a random SPD Gram matrix.
struct FramePair {
  LieFrame frame;
  FrameMetric g;
};

inline std::vector<FramePair> random_pairs(int count, std::uint64_t seed) {
  Random rnd(seed);
  std::vector<FramePair> out;
  for (int i = 0; i < count; ++i) {
    LieFrame f = [&] {
      switch (i % 5) {
        case 0: return qeframe::frames::su2();
        case 1: return qeframe::frames::heisenberg();
        case 2: return qeframe::frames::h2_times_r();
        case 3: return LieFrame::abelian(3);
        default: return rnd.unimodular();
      }
    }();
    out.push_back({f, FrameMetric(rnd.spd(3))});
  }
  return out;
}

}  // namespace fixtures
