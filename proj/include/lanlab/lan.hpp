#ifndef LANLAB_LAN_HPP
#define LANLAB_LAN_HPP

/**
 * @file lan.hpp
 * @brief Log-likelihood ratios along paths, the rescaled score, and the
 * Monte Carlo harness checking the quadratic expansion
 *
 *   Lambda_n = h^T Delta_n - 1/2 h^T F_n(1) h + R_n(1) - 1/2 U_n(1) - V_n(1),
 *
 * which is an exact identity of the discretized integrals (the candidate
 * signal is split pointwise into its linearization plus remainder).  The
 * harness aggregates score normality tests and remainder decay
 * diagnostics across replications.
 */

#include <cmath>
#include <cstdint>
#include <vector>

#include "lanlab/errors.hpp"
#include "lanlab/fisher.hpp"
#include "lanlab/parallel.hpp"
#include "lanlab/rng.hpp"
#include "lanlab/sde.hpp"
#include "lanlab/signal.hpp"
#include "lanlab/stats.hpp"

namespace lanlab {

/// Local scale delta_n = diag(n^{-1/2}, ..., n^{-1/2}, n^{-3/2}).
struct LocalScale {
  std::int64_t n = 1;
  Vector diag;

  static LocalScale make(int d, std::int64_t n) {
    if (n <= 0) throw InvalidParameter("lan: n must be positive");
    LocalScale s;
    s.n = n;
    s.diag.resize(d + 1);
    const double r = 1.0 / std::sqrt(static_cast<double>(n));
    for (int q = 0; q < d; ++q) s.diag[q] = r;
    s.diag[d] = r * r * r;
    return s;
  }
};

namespace detail {

/// Signal values of the candidate minus base along the grid, with the
/// base values and the h-projection a_i = (delta_n h)^T Sdot(t_i).
struct LanGrids {
  std::vector<double> s_base;   // S_{(theta,T)}(t_i)
  std::vector<double> s_diff;   // S_candidate - S_base
  std::vector<double> proj;     // (delta_n h)^T Sdot(t_i)
  std::vector<double> rem;      // s_diff - proj
  std::vector<std::vector<double>> sdot;  // (d+1) rows of Sdot components
};

inline LanGrids build_lan_grids(const SignalSpec& spec, const Vector& theta,
                                double T, const Vector& dh, double dt,
                                std::int64_t count) {
  const int d = spec.d;
  LanGrids g;
  g.s_base.resize(static_cast<std::size_t>(count));
  g.s_diff.resize(static_cast<std::size_t>(count));
  g.proj.resize(static_cast<std::size_t>(count));
  g.rem.resize(static_cast<std::size_t>(count));
  g.sdot.assign(static_cast<std::size_t>(d) + 1,
                std::vector<double>(static_cast<std::size_t>(count)));
  scan_signal_grid(spec, theta, T, 0.0, dt, count,
                   [&](std::int64_t i, double t, double value, double sp,
                       const double* grad) {
                     const auto u = static_cast<std::size_t>(i);
                     g.s_base[u] = value;
                     double a = 0.0;
                     for (int q = 0; q < d; ++q) {
                       g.sdot[static_cast<std::size_t>(q)][u] = grad[q];
                       a += dh[q] * grad[q];
                     }
                     const double dT = -(t / (T * T)) * sp;
                     g.sdot[static_cast<std::size_t>(d)][u] = dT;
                     a += dh[d] * dT;
                     g.proj[u] = a;
                   });
  const Vector theta_c = theta + dh.head(theta.size());
  const double T_c = T + dh[d];
  if (!(T_c > 0.0)) throw InvalidParameter("lan: perturbed T not positive");
  scan_signal_grid(spec, theta_c, T_c, 0.0, dt, count,
                   [&](std::int64_t i, double, double value, double,
                       const double*) {
                     const auto u = static_cast<std::size_t>(i);
                     g.s_diff[u] = value - g.s_base[u];
                     g.rem[u] = g.s_diff[u] - g.proj[u];
                   });
  return g;
}

}  // namespace detail

/// Girsanov log-likelihood ratio of the candidate parameters against the
/// path's generating parameters, using the path's stored increments:
///   sum (S~ - S)/sigma dW - 1/2 sum ((S~ - S)/sigma)^2 dt.
inline double log_likelihood_ratio_sim(const PathRecord& path,
                                       const DiffusionSpec& dspec,
                                       const SignalSpec& spec,
                                       const Vector& theta2, double T2) {
  if (!(T2 > 0.0)) throw InvalidParameter("lan: candidate T must be positive");
  const std::int64_t count = path.steps();
  std::vector<double> diff(static_cast<std::size_t>(count));
  scan_signal_grid(spec, path.theta, path.T, 0.0, path.dt, count,
                   [&](std::int64_t i, double, double v, double, const double*) {
                     diff[static_cast<std::size_t>(i)] = -v;
                   });
  scan_signal_grid(spec, theta2, T2, 0.0, path.dt, count,
                   [&](std::int64_t i, double, double v, double, const double*) {
                     diff[static_cast<std::size_t>(i)] += v;
                   });
  double ito = 0.0, quad = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double r = diff[u] / dspec.sigma(path.xi[u]);
    ito += r * path.dW[u];
    quad += r * r;
  }
  return ito - 0.5 * quad * path.dt;
}

/// Observed-path form: the driving increments are reconstructed from the
/// path as dW = (d xi - (S_base + b) dt)/sigma.  On Euler paths this
/// agrees with log_likelihood_ratio_sim to machine precision.
inline double log_likelihood_ratio_obs(const PathRecord& path,
                                       const DiffusionSpec& dspec,
                                       const SignalSpec& spec,
                                       const Vector& theta_base, double T_base,
                                       const Vector& theta2, double T2) {
  if (!(T2 > 0.0) || !(T_base > 0.0))
    throw InvalidParameter("lan: T must be positive");
  const std::int64_t count = path.steps();
  std::vector<double> base(static_cast<std::size_t>(count));
  std::vector<double> diff(static_cast<std::size_t>(count));
  scan_signal_grid(spec, theta_base, T_base, 0.0, path.dt, count,
                   [&](std::int64_t i, double, double v, double, const double*) {
                     base[static_cast<std::size_t>(i)] = v;
                     diff[static_cast<std::size_t>(i)] = -v;
                   });
  scan_signal_grid(spec, theta2, T2, 0.0, path.dt, count,
                   [&](std::int64_t i, double, double v, double, const double*) {
                     diff[static_cast<std::size_t>(i)] += v;
                   });
  double ito = 0.0, quad = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double x = path.xi[u];
    const double sig = dspec.sigma(x);
    const double dW_rec =
        (path.xi[u + 1] - x - (base[u] + dspec.drift_b(x)) * path.dt) / sig;
    const double r = diff[u] / sig;
    ito += r * dW_rec;
    quad += r * r;
  }
  return ito - 0.5 * quad * path.dt;
}

/// Rescaled score Delta_n = delta_n sum Sdot(t_i)/sigma(xi_i) dW_i over
/// [0, n].
inline Vector score(const PathRecord& path, const DiffusionSpec& dspec,
                    const SignalSpec& spec, std::int64_t n) {
  if (path.horizon() < static_cast<double>(n) - 1e-9)
    throw InvalidParameter("lan: path horizon shorter than n");
  const std::int64_t count = std::llround(static_cast<double>(n) / path.dt);
  const int d = spec.d;
  Vector raw = Vector::Zero(d + 1);
  const double T = path.T;
  scan_signal_grid(spec, path.theta, T, 0.0, path.dt, count,
                   [&](std::int64_t i, double t, double, double sp,
                       const double* grad) {
                     const auto u = static_cast<std::size_t>(i);
                     const double w = path.dW[u] / dspec.sigma(path.xi[u]);
                     for (int q = 0; q < d; ++q) raw[q] += grad[q] * w;
                     raw[d] += -(t / (T * T)) * sp * w;
                   });
  const LocalScale ls = LocalScale::make(d, n);
  return ls.diag.asDiagonal() * raw;
}

/// Per-replication diagnostics and aggregate tests of the quadratic
/// expansion.
struct LanReport {
  std::int64_t n = 0;
  int replications = 0;
  Vector h;
  Matrix scores;  ///< replications x (d+1)
  FisherMatrix F_ref;
  std::vector<double> lambda;      ///< Lambda_n per path
  std::vector<double> quad;        ///< h^T Delta - 1/2 h^T F_ref h per path
  std::vector<double> r_integral;  ///< R_n(1), stochastic-integral form
  std::vector<double> r_residual;  ///< R_n(1), residual form (bookkeeping check)
  std::vector<double> u_term;      ///< U_n(1)
  std::vector<double> v_term;      ///< V_n(1)
  std::vector<double> hFnh;        ///< h^T F_n(1) h per path

  double cov_rel_error = 0.0;          ///< ||cov(Delta) - F||_2 / ||F||_2
  std::vector<double> ks_distance;     ///< per standardized component
  double ks_critical_1pct = 0.0;
  double residual_median = 0.0;        ///< median |Lambda - quad|
  double residual_q90 = 0.0;
  double identity_max_rel_error = 0.0;
};

/**
 * @brief Runs `replications` independent paths over [0, n] and fills a
 * LanReport.  Replication r uses the stream derive_seed(seed, r);
 * results are reduced in replication order, so the outcome does not
 * depend on the thread count.
 */
inline LanReport lan_report(const DiffusionSpec& dspec, const SignalSpec& spec,
                            const Vector& theta, double T, const Vector& h,
                            std::int64_t n, int replications, double dt,
                            std::uint64_t seed, unsigned threads = 1) {
  dspec.validate();
  detail::check_eval_args(spec, theta, T);
  const int d = spec.d;
  if (h.size() != d + 1) throw InvalidParameter("lan: h must have length d+1");
  if (replications <= 0) throw InvalidParameter("lan: replications must be positive");

  FisherMatrix F_ref;
  if (dspec.sigma_is_constant()) {
    F_ref = fisher_matrix(spec, theta, T, 1.0, dspec.sigma_c);
  } else {
    // no closed form for nu: estimate from one long reference path
    PathRecord ref = simulate_path(dspec, spec, theta, T,
                                   static_cast<double>(n), dt,
                                   derive_seed(seed, 0xfefefefeULL));
    F_ref = fisher_path_estimate(ref, dspec, spec, theta, T, 1.0, n);
  }
  if (!check_S7(F_ref))
    throw S7Violation("lan: F' is numerically singular for this model");

  const LocalScale ls = LocalScale::make(d, n);
  const Vector dh = ls.diag.asDiagonal() * h;
  const std::int64_t count = std::llround(static_cast<double>(n) / dt);
  const detail::LanGrids grids =
      detail::build_lan_grids(spec, theta, T, dh, dt, count);
  const double hFh_ref = h.dot(F_ref.F * h);

  LanReport rep;
  rep.n = n;
  rep.replications = replications;
  rep.h = h;
  rep.F_ref = F_ref;
  rep.scores.resize(replications, d + 1);
  rep.lambda.resize(static_cast<std::size_t>(replications));
  rep.quad.resize(static_cast<std::size_t>(replications));
  rep.r_integral.resize(static_cast<std::size_t>(replications));
  rep.r_residual.resize(static_cast<std::size_t>(replications));
  rep.u_term.resize(static_cast<std::size_t>(replications));
  rep.v_term.resize(static_cast<std::size_t>(replications));
  rep.hFnh.resize(static_cast<std::size_t>(replications));

  parallel_for(replications, threads, [&](std::int64_t r) {
    GaussianStream g(derive_seed(seed, static_cast<std::uint64_t>(r)));
    const double sq = std::sqrt(dt);
    double x = dspec.x0;
    Vector raw = Vector::Zero(d + 1);
    double lam_ito = 0.0, lam_q = 0.0;
    double hFnh = 0.0, R = 0.0, U = 0.0, V = 0.0;
    for (std::int64_t i = 0; i < count; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const double dW = sq * g();
      const double sig = dspec.sigma(x);
      const double w = dW / sig;
      for (int q = 0; q <= d; ++q)
        raw[q] += grids.sdot[static_cast<std::size_t>(q)][u] * w;
      const double diff_s = grids.s_diff[u] / sig;
      lam_ito += diff_s * dW;
      lam_q += diff_s * diff_s;
      const double a_s = grids.proj[u] / sig;
      hFnh += a_s * a_s;
      const double rem_s = grids.rem[u] / sig;
      R += rem_s * dW;
      U += rem_s * rem_s;
      V += rem_s * a_s;
      x += (grids.s_base[u] + dspec.drift_b(x)) * dt + sig * dW;
    }
    const double lambda = lam_ito - 0.5 * lam_q * dt;
    hFnh *= dt;
    U *= dt;
    V *= dt;
    const Vector delta = ls.diag.asDiagonal() * raw;
    rep.scores.row(r) = delta.transpose();
    rep.lambda[static_cast<std::size_t>(r)] = lambda;
    rep.quad[static_cast<std::size_t>(r)] = h.dot(delta) - 0.5 * hFh_ref;
    rep.r_integral[static_cast<std::size_t>(r)] = R;
    rep.r_residual[static_cast<std::size_t>(r)] =
        lambda - h.dot(delta) + 0.5 * hFnh + 0.5 * U + V;
    rep.u_term[static_cast<std::size_t>(r)] = U;
    rep.v_term[static_cast<std::size_t>(r)] = V;
    rep.hFnh[static_cast<std::size_t>(r)] = hFnh;
  });

  // aggregate tests
  double worst = 0.0;
  std::vector<double> absresid(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r) {
    const auto u = static_cast<std::size_t>(r);
    const double lhs = rep.lambda[u];
    const double rhs = rep.h.dot(rep.scores.row(r).transpose()) -
                       0.5 * rep.hFnh[u] + rep.r_integral[u] -
                       0.5 * rep.u_term[u] - rep.v_term[u];
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    absresid[u] = std::abs(rep.lambda[u] - rep.quad[u]);
  }
  rep.identity_max_rel_error = worst;
  rep.residual_median = median(absresid);
  rep.residual_q90 = quantile(absresid, 0.9);
  rep.cov_rel_error =
      operator_norm_rel_error(sample_covariance(rep.scores), F_ref.F);
  rep.ks_distance.resize(static_cast<std::size_t>(d) + 1);
  for (int q = 0; q <= d; ++q) {
    std::vector<double> comp(static_cast<std::size_t>(replications));
    const double sd = std::sqrt(F_ref.F(q, q));
    for (int r = 0; r < replications; ++r)
      comp[static_cast<std::size_t>(r)] = rep.scores(r, q) / sd;
    rep.ks_distance[static_cast<std::size_t>(q)] = ks_distance_normal(comp);
  }
  rep.ks_critical_1pct =
      ks_critical_value(0.01, static_cast<std::size_t>(replications));
  return rep;
}

}  // namespace lanlab

#endif  // LANLAB_LAN_HPP
