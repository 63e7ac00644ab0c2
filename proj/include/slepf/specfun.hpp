#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>

#include "slepf/errors.hpp"

namespace slepf {

double gamma_fn(double x);
double lgamma_fn(double x);
double beta_fn(double a, double b);

/// Gauss hypergeometric 2F1(a, b; c; z) for real z in [0, 1].
///
/// z <= 1/2 sums the power series; z > 1/2 uses the z -> 1 - z connection
/// formula, falling back to Taylor re-expansion of the hypergeometric ODE when
/// c - a - b is within 1e-2 of an integer. Terminating series (a or b a
/// nonpositive integer) are summed exactly. At z = 1 returns the Gauss sum when
/// c - a - b > 0 and +infinity otherwise.
double gauss_2f1(double a, double b, double c, double z);

/// Power series alone; only meaningful for z well inside [0, 1).
double gauss_2f1_series(double a, double b, double c, double z);
/// Connection formula alone (z in (0, 1], c - a - b not an integer).
double gauss_2f1_connection(double a, double b, double c, double z);

/// Complete elliptic integral of the first kind K(k) via the AGM.
double ellint_k(double k);

struct JacobiElliptic {
  double sn, cn, dn;
};
/// Jacobi elliptic functions of real argument, modulus k in [0, 1).
JacobiElliptic jacobi_elliptic(double u, double k);

struct RectangleMap {
  double k;   // modulus with K(k') / K(k) = 2 r
  double K;   // K(k), half the rectangle width in the sn picture
  double Kp;  // K(k'), the rectangle height
  std::array<double, 4> corners;  // (-1/k, -1, 1, 1/k)
};

/// Half-plane images of the corners of a rectangle of aspect r = height / width,
/// ordered top-left, bottom-left, bottom-right, top-right (counterclockwise from
/// the top-left corner). r must lie in (0.05, 20).
RectangleMap rect_corner_images(double r);

/// Image under the same map of the boundary point at counterclockwise arc-length
/// fraction s in [0, 1), measured from the top-left corner.
double rect_boundary_image(const RectangleMap& map, double s);

/// Cross-ratio (x2 - x1)(x4 - x3) / ((x4 - x2)(x3 - x1)).
inline double cross_ratio(double x1, double x2, double x3, double x4) {
  return (x2 - x1) * (x4 - x3) / ((x4 - x2) * (x3 - x1));
}

namespace detail {

template <typename Derived>
double pfaffian_expand(const Eigen::MatrixBase<Derived>& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 1.0;
  if (n == 2) return a(0, 1);
  // Expand along the first row: pf(A) = sum_j (-1)^j a_{0j} pf(A with rows/cols 0, j removed).
  double total = 0.0;
  Eigen::MatrixXd minor(n - 2, n - 2);
  for (Eigen::Index j = 1; j < n; ++j) {
    if (a(0, j) == 0.0) continue;
    Eigen::Index r = 0;
    for (Eigen::Index p = 1; p < n; ++p) {
      if (p == j) continue;
      Eigen::Index c = 0;
      for (Eigen::Index q = 1; q < n; ++q) {
        if (q == j) continue;
        minor(r, c++) = a(p, q);
      }
      ++r;
    }
    const double sign = (j % 2 == 1) ? 1.0 : -1.0;
    total += sign * a(0, j) * pfaffian_expand(minor);
  }
  return total;
}

// Skew-symmetric Gaussian elimination with pivoting (Parlett-Reid style).
inline double pfaffian_eliminate(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  double pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index piv;
    const double big = a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&piv);
    piv += k + 1;
    if (big == 0.0) return 0.0;
    if (piv != k + 1) {
      a.row(k + 1).swap(a.row(piv));
      a.col(k + 1).swap(a.col(piv));
      pf = -pf;
    }
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const Eigen::VectorXd tau = a.row(k).tail(n - k - 2) / a(k, k + 1);
      const Eigen::VectorXd u = a.col(k + 1).tail(n - k - 2);
      // Rank-2 skew update keeps antisymmetry.
      a.bottomRightCorner(n - k - 2, n - k - 2) += tau * u.transpose() - u * tau.transpose();
    }
  }
  return pf;
}

}  // namespace detail

/// Pfaffian of an antisymmetric matrix of even size. Sizes up to 8 use the
/// recursive row expansion; larger ones use skew elimination.
template <typename Derived>
double pfaffian(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) throw DomainError("pfaffian: matrix must be square");
  if (a.rows() % 2 != 0) throw DomainError("pfaffian: matrix size must be even");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("pfaffian: matrix is not antisymmetric");
  }
  if (a.rows() <= 8) return detail::pfaffian_expand(a);
  return detail::pfaffian_eliminate(a.eval());
}

}  // namespace slepf
