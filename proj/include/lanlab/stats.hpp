#ifndef LANLAB_STATS_HPP
#define LANLAB_STATS_HPP

/// Small statistics toolbox: one-sample Kolmogorov-Smirnov distance,
/// critical values, moments and log-log slope fits.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "lanlab/errors.hpp"

namespace lanlab {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// sup_x |F_emp(x) - Phi((x - mu)/sd)|.
inline double ks_distance_normal(std::vector<double> samples, double mu = 0.0,
                                 double sd = 1.0) {
  const std::size_t m = samples.size();
  if (m == 0) throw InvalidParameter("stats: empty sample");
  std::sort(samples.begin(), samples.end());
  double d = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double c = normal_cdf((samples[i] - mu) / sd);
    d = std::max(d, std::max(c - static_cast<double>(i) / m,
                             static_cast<double>(i + 1) / m - c));
  }
  return d;
}

/// Two-sided KS critical value, Stephens' finite-sample approximation.
/// Supported levels: 0.10, 0.05, 0.01.
inline double ks_critical_value(double alpha, std::size_t m) {
  double c;
  if (alpha == 0.10) c = 1.224;
  else if (alpha == 0.05) c = 1.358;
  else if (alpha == 0.01) c = 1.628;
  else c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double s = std::sqrt(static_cast<double>(m));
  return c / (s + 0.12 + 0.11 / s);
}

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Sample standard deviation (denominator m-1).
inline double sample_sd(const std::vector<double>& x) {
  const std::size_t m = x.size();
  if (m < 2) return 0.0;
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return std::sqrt(s / static_cast<double>(m - 1));
}

inline double median(std::vector<double> x) {
  if (x.empty()) throw InvalidParameter("stats: empty sample");
  const std::size_t m = x.size();
  std::sort(x.begin(), x.end());
  return m % 2 == 1 ? x[m / 2] : 0.5 * (x[m / 2 - 1] + x[m / 2]);
}

inline double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw InvalidParameter("stats: empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * x[lo] + frac * x[hi];
}

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x,
                       const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidParameter("stats: slope needs >= 2 matched points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

/// ||A - B||_2 / ||B||_2 (spectral norms via singular values).
inline double operator_norm_rel_error(const Eigen::MatrixXd& a,
                                      const Eigen::MatrixXd& b) {
  const double nb = b.jacobiSvd().singularValues()(0);
  const double nd = (a - b).jacobiSvd().singularValues()(0);
  return nd / nb;
}

/// Empirical covariance of row-observations (m x p), denominator m-1.
inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows) {
  const auto m = rows.rows();
  Eigen::RowVectorXd mu = rows.colwise().mean();
  Eigen::MatrixXd centered = rows.rowwise() - mu;
  return centered.transpose() * centered / static_cast<double>(m - 1);
}

}  // namespace lanlab

#endif  // LANLAB_STATS_HPP
