#ifndef LANLAB_FISHER_HPP
#define LANLAB_FISHER_HPP

/**
 * @file fisher.hpp
 * @brief The (d+1)x(d+1) block information matrix
 *
 *            [ t <d_i S, d_j S>        -t^2/(2T^2) <d_i S, S'> ]
 *   F(t)  =  [        ...                t^3/(3T^4) <S', S'>   ]
 *
 * its t-derivative F'(t), the invertibility check on F', and the
 * empirical counterpart built from a simulated path.
 */

#include <cmath>
#include <cstdio>

#include <Eigen/Dense>

#include "lanlab/ergodic.hpp"
#include "lanlab/errors.hpp"
#include "lanlab/sde.hpp"
#include "lanlab/signal.hpp"

namespace lanlab {

enum class FisherProvenance { ClosedForm, Quadrature, PathEstimate };

struct FisherMatrix {
  double t = 1.0;
  Matrix F;       ///< (d+1)x(d+1), symmetric
  Matrix Fprime;  ///< (d+1)x(d+1), symmetric, nonnegative-definite
  FisherProvenance provenance = FisherProvenance::ClosedForm;
};

/// Assembles F(t) and F'(t) from exact nu inner products (constant sigma).
inline FisherMatrix fisher_matrix(const SignalSpec& spec, const Vector& theta,
                                  double T, double t, double sigma_const) {
  if (!(t > 0.0)) throw InvalidParameter("fisher: t must be positive");
  if (!(T > 0.0)) throw InvalidParameter("fisher: T must be positive");
  detail::check_eval_args(spec, theta, T);
  const int d = spec.d;
  Matrix A(d, d);
  Vector v(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      A(i, j) = A(j, i) = nu_inner_product(spec, theta, SigComponent::theta(i),
                                           SigComponent::theta(j), sigma_const);
    }
    v[i] = nu_inner_product(spec, theta, SigComponent::theta(i),
                            SigComponent::sprime(), sigma_const);
  }
  const double w = nu_inner_product(spec, theta, SigComponent::sprime(),
                                    SigComponent::sprime(), sigma_const);
  const double T2 = T * T;
  FisherMatrix out;
  out.t = t;
  out.provenance = FisherProvenance::ClosedForm;
  out.F.setZero(d + 1, d + 1);
  out.Fprime.setZero(d + 1, d + 1);
  out.F.topLeftCorner(d, d) = t * A;
  out.F.topRightCorner(d, 1) = -(t * t) / (2.0 * T2) * v;
  out.F.bottomLeftCorner(1, d) = out.F.topRightCorner(d, 1).transpose();
  out.F(d, d) = (t * t * t) / (3.0 * T2 * T2) * w;
  out.Fprime.topLeftCorner(d, d) = A;
  out.Fprime.topRightCorner(d, 1) = -t / T2 * v;
  out.Fprime.bottomLeftCorner(1, d) = out.Fprime.topRightCorner(d, 1).transpose();
  out.Fprime(d, d) = (t * t) / (T2 * T2) * w;
  return out;
}

/// True iff the smallest eigenvalue of F' exceeds tol times the largest:
/// the linear-independence condition on (d_1 S, ..., d_d S, S').
inline bool check_S7(const FisherMatrix& fm, double tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(fm.Fprime);
  const auto& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  return lo > tol * hi;
}

/**
 * @brief Empirical information F_n(t) from a path:
 *
 *   F_n(t) = delta_n ( int_0^{tn} Sdot Sdot^T / sigma^2(xi_s) ds ) delta_n
 *
 * via left-point sums.  F' is recovered from the block scaling of F
 * (blocks proportional to t, t^2, t^3).
 */
inline FisherMatrix fisher_path_estimate(const PathRecord& path,
                                         const DiffusionSpec& dspec,
                                         const SignalSpec& spec,
                                         const Vector& theta, double T,
                                         double t, std::int64_t n) {
  if (!(t > 0.0) || n <= 0) throw InvalidParameter("fisher: bad t or n");
  const double upper = t * static_cast<double>(n);
  if (path.horizon() < upper - 1e-9)
    throw InvalidParameter("fisher: path horizon too short");
  const std::int64_t count = std::llround(upper / path.dt);
  const int d = spec.d;
  Matrix acc = Matrix::Zero(d + 1, d + 1);
  Vector sdot(d + 1);
  scan_signal_grid(spec, theta, T, 0.0, path.dt, count,
                   [&](std::int64_t i, double ti, double /*value*/, double sp,
                       const double* grad) {
                     for (int q = 0; q < d; ++q) sdot[q] = grad[q];
                     sdot[d] = -(ti / (T * T)) * sp;
                     const double sig =
                         dspec.sigma(path.xi[static_cast<std::size_t>(i)]);
                     acc.selfadjointView<Eigen::Lower>().rankUpdate(
                         sdot, path.dt / (sig * sig));
                   });
  acc.triangularView<Eigen::StrictlyUpper>() =
      acc.triangularView<Eigen::StrictlyLower>().transpose();
  Vector delta(d + 1);
  const double rn = 1.0 / std::sqrt(static_cast<double>(n));
  for (int q = 0; q < d; ++q) delta[q] = rn;
  delta[d] = rn * rn * rn;
  FisherMatrix out;
  out.t = t;
  out.provenance = FisherProvenance::PathEstimate;
  out.F = delta.asDiagonal() * acc * delta.asDiagonal();
  out.Fprime = out.F;
  out.Fprime.topLeftCorner(d, d) *= 1.0 / t;
  out.Fprime.topRightCorner(d, 1) *= 2.0 / t;
  out.Fprime.bottomLeftCorner(1, d) *= 2.0 / t;
  out.Fprime(d, d) *= 3.0 / t;
  return out;
}

/// Symmetric PSD square root via eigendecomposition.
inline Matrix sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

/// CSV with row/column labels theta1..thetad, T; F block then Fprime block.
template <class Ostream>
void write_fisher_csv(Ostream& os, const FisherMatrix& fm) {
  const int d = static_cast<int>(fm.F.rows()) - 1;
  auto label = [&](int i) {
    return i < d ? "theta" + std::to_string(i + 1) : std::string("T");
  };
  char buf[64];
  for (const char* which : {"F", "Fprime"}) {
    const Matrix& m = (which[1] == 'p') ? fm.Fprime : fm.F;
    os << "matrix,row";
    for (int j = 0; j <= d; ++j) os << "," << label(j);
    os << "\n";
    for (int i = 0; i <= d; ++i) {
      os << which << "," << label(i);
      for (int j = 0; j <= d; ++j) {
        std::snprintf(buf, sizeof buf, ",%.17g", m(i, j));
        os << buf;
      }
      os << "\n";
    }
  }
}

}  // namespace lanlab

#endif  // LANLAB_FISHER_HPP
