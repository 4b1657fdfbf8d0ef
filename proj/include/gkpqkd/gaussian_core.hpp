// Copyright 2026 The gkpqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GKPQKD_GAUSSIAN_CORE_HPP_
#define GKPQKD_GAUSSIAN_CORE_HPP_

// Symplectic and covariance-matrix primitives.
//
// Quadratures are ordered (q1, p1, q2, p2, ...) everywhere. Matrices are
// dynamic-size Eigen matrices wrapped in small value types that check their
// defining invariant on construction.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gkpqkd/errors.hpp"

namespace gkpqkd {

// Tolerance below 1 within which a symplectic eigenvalue is treated as 1.
inline constexpr double kPhysicalityTolerance = 1e-9;
inline constexpr double kSymplecticTolerance = 1e-12;

class SymplecticMatrix;

// Real symmetric 2n x 2n covariance matrix.
class CovMatrix {
 public:
  explicit CovMatrix(Eigen::MatrixXd m) : m_(std::move(m)) { Validate(); }

  static CovMatrix Identity(int n_modes) {
    return CovMatrix(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  int modes() const { return dim() / 2; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  // 2x2 block of modes (i, j).
  Eigen::Matrix2d Block(int mode_i, int mode_j) const {
    return m_.block<2, 2>(2 * mode_i, 2 * mode_j);
  }

  // Checks V + i Omega >= 0 with the given absolute tolerance, `vacuum` being
  // the vacuum variance of the convention V is expressed in.
  bool IsPhysical(double vacuum = 1.0,
                  double tol = kPhysicalityTolerance) const;

  friend CovMatrix operator*(double s, const CovMatrix& v) {
    return CovMatrix(s * v.m_);
  }

 private:
  void Validate() const {
    internal::Require(m_.rows() == m_.cols() && m_.rows() > 0 && m_.rows() % 2 == 0,
                      "covariance matrix must be square with positive even dimension");
    internal::Require(m_.allFinite(), "covariance matrix has non-finite entries");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    internal::Require((m_ - m_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
                      "covariance matrix is not symmetric");
  }

  Eigen::MatrixXd m_;
};

// Block-diagonal symplectic form, each block (0, 1; -1, 0).
inline Eigen::MatrixXd SymplecticFormMatrix(int n_modes) {
  internal::Require(n_modes >= 1, "symplectic form needs at least one mode");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

// A real matrix S with S Omega S^T = Omega.
class SymplecticMatrix {
 public:
  // Throws InvalidArgument if `m` is not symplectic to within 1e-12 (max norm,
  // scaled by the largest entry squared for strongly squeezing maps).
  explicit SymplecticMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    internal::Require(m_.rows() == m_.cols() && m_.rows() % 2 == 0 && m_.rows() > 0,
                      "symplectic matrix must be square with even dimension");
    internal::Require(SymplecticDefect(m_) < kSymplecticTolerance *
                                                 std::max(1.0, m_.cwiseAbs2().maxCoeff()),
                      "matrix is not symplectic");
  }

  static double SymplecticDefect(const Eigen::MatrixXd& s) {
    const Eigen::MatrixXd omega = SymplecticFormMatrix(static_cast<int>(s.rows() / 2));
    return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }

  SymplecticMatrix operator*(const SymplecticMatrix& other) const {
    return SymplecticMatrix(m_ * other.m_);
  }
  SymplecticMatrix Transpose() const { return SymplecticMatrix(m_.transpose()); }
  SymplecticMatrix Inverse() const {
    // S^{-1} = Omega^T S^T Omega for symplectic S.
    const Eigen::MatrixXd omega = SymplecticFormMatrix(dim() / 2);
    return SymplecticMatrix(omega.transpose() * m_.transpose() * omega);
  }

  // S V S^T.
  CovMatrix Apply(const CovMatrix& v) const {
    Eigen::MatrixXd out = m_ * v.matrix() * m_.transpose();
    out = 0.5 * (out + out.transpose()).eval();
    return CovMatrix(std::move(out));
  }

 private:
  Eigen::MatrixXd m_;
};

inline SymplecticMatrix SymplecticForm(int n_modes) {
  return SymplecticMatrix(SymplecticFormMatrix(n_modes));
}

inline SymplecticMatrix DirectSum(const SymplecticMatrix& a, const SymplecticMatrix& b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.dim() + b.dim(), a.dim() + b.dim());
  m.topLeftCorner(a.dim(), a.dim()) = a.matrix();
  m.bottomRightCorner(b.dim(), b.dim()) = b.matrix();
  return SymplecticMatrix(std::move(m));
}

// Single-mode squeezer diag(e^{-r}, e^{r}).
inline SymplecticMatrix Squeezer(double r) {
  internal::Require(std::isfinite(r), "squeezing must be finite");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = std::exp(-r);
  m(1, 1) = std::exp(r);
  return SymplecticMatrix(std::move(m));
}

// Two-mode beamsplitter with transmittance 1/2 acting as
// (q1, p1, q2, p2) -> ((q1 + q2)/sqrt2, (p1 + p2)/sqrt2, (q2 - q1)/sqrt2, ...).
inline SymplecticMatrix BalancedBeamSplitter() {
  const double c = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd m(4, 4);
  m << c, 0, c, 0,
       0, c, 0, c,
       -c, 0, c, 0,
       0, -c, 0, c;
  return SymplecticMatrix(std::move(m));
}

// Two-mode squeezing realised as B (S(r) + S(-r)) B^T.
inline SymplecticMatrix TmsSymplectic(double r) {
  const SymplecticMatrix b = BalancedBeamSplitter();
  return b * DirectSum(Squeezer(r), Squeezer(-r)) * b.Transpose();
}

// Symplectic spectrum of an arbitrary 2n x 2n covariance matrix, sorted in
// descending order. Uses the real eigenproblem of Omega V, whose eigenvalues
// come in pairs +-i v_k.
inline std::vector<double> SymplecticEigenvalues(const CovMatrix& v) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pd(v.matrix());
  if (pd.eigenvalues().minCoeff() <= 0.0) {
    throw InvalidArgument("symplectic spectrum needs a positive-definite matrix");
  }
  const Eigen::MatrixXd omega = SymplecticFormMatrix(v.modes());
  Eigen::EigenSolver<Eigen::MatrixXd> es(omega * v.matrix(), /*computeEigenvectors=*/false);
  std::vector<double> mags;
  mags.reserve(v.dim());
  for (int i = 0; i < v.dim(); ++i) mags.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  std::vector<double> out;
  out.reserve(v.modes());
  for (int k = 0; k < v.modes(); ++k) out.push_back(0.5 * (mags[2 * k] + mags[2 * k + 1]));
  return out;
}

// Closed-form spectrum of a two-mode CM from the invariants of Omega V:
// its characteristic polynomial is x^4 + D x^2 + det V with
// D = det A + det B + 2 det C. Returns (v_plus, v_minus).
inline std::pair<double, double> TwoModeSymplecticEigenvalues(const Eigen::Matrix4d& v) {
  const Eigen::Matrix2d a = v.block<2, 2>(0, 0);
  const Eigen::Matrix2d b = v.block<2, 2>(2, 2);
  const Eigen::Matrix2d c = v.block<2, 2>(0, 2);
  const double delta = a.determinant() + b.determinant() + 2.0 * c.determinant();
  const double det = v.determinant();
  if (!(det > 0.0)) {
    throw InvalidArgument("symplectic spectrum needs a positive-definite matrix");
  }
  const double disc = std::max(0.0, delta * delta - 4.0 * det);
  const double v_plus_sq = 0.5 * (delta + std::sqrt(disc));
  const double v_plus = std::sqrt(v_plus_sq);
  // v_plus^2 v_minus^2 = det V; avoids cancellation for nearly pure states.
  const double v_minus = std::sqrt(det / v_plus_sq);
  return {v_plus, v_minus};
}

inline std::pair<double, double> TwoModeSymplecticEigenvalues(const CovMatrix& v) {
  internal::Require(v.dim() == 4, "two-mode spectrum needs a 4x4 matrix");
  return TwoModeSymplecticEigenvalues(Eigen::Matrix4d(v.matrix()));
}

// Von Neumann entropy (bits) of a thermal mode with symplectic eigenvalue v
// in shot-noise units.
inline double HFunction(double v) {
  if (!(v >= 1.0 - kPhysicalityTolerance)) {
    throw UnphysicalState("symplectic eigenvalue " + std::to_string(v) + " below 1");
  }
  if (v <= 1.0) return 0.0;
  const double plus = 0.5 * (v + 1.0);
  const double minus = 0.5 * (v - 1.0);
  return plus * std::log2(plus) - minus * std::log2(minus);
}

// Conditions block b on a heterodyne (vacuum-1 units) of block a:
//   V_b - C^T (V_a + I)^{-1} C, with C the a-b correlation block (rows a).
inline Eigen::MatrixXd SchurCondition(const Eigen::MatrixXd& block_a,
                                      const Eigen::MatrixXd& block_b,
                                      const Eigen::MatrixXd& cross) {
  internal::Require(block_a.rows() == block_a.cols() && block_b.rows() == block_b.cols() &&
                        cross.rows() == block_a.rows() && cross.cols() == block_b.rows(),
                    "Schur conditioning blocks are not conformable");
  const Eigen::MatrixXd shifted =
      block_a + Eigen::MatrixXd::Identity(block_a.rows(), block_a.cols());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(shifted);
  if (!lu.isInvertible()) throw SingularMatrix("V_a + I is singular");
  Eigen::MatrixXd out = block_b - cross.transpose() * lu.solve(cross);
  return 0.5 * (out + out.transpose());
}

// Same on a full CM whose first `modes_a` modes form block a and the rest b.
inline CovMatrix SchurCondition(const CovMatrix& v, int modes_a) {
  internal::Require(modes_a >= 1 && modes_a < v.modes(), "invalid split for conditioning");
  const int na = 2 * modes_a;
  const int nb = v.dim() - na;
  return CovMatrix(SchurCondition(v.matrix().topLeftCorner(na, na),
                                  v.matrix().bottomRightCorner(nb, nb),
                                  v.matrix().topRightCorner(na, nb)));
}

inline bool CovMatrix::IsPhysical(double vacuum, double tol) const {
  const Eigen::MatrixXd omega = SymplecticFormMatrix(modes());
  const Eigen::MatrixXcd herm =
      m_.cast<std::complex<double>>() +
      std::complex<double>(0.0, vacuum) * omega.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace gkpqkd

#endif  // GKPQKD_GAUSSIAN_CORE_HPP_
