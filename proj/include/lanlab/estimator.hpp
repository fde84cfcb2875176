#ifndef LANLAB_ESTIMATOR_HPP
#define LANLAB_ESTIMATOR_HPP

/**
 * @file estimator.hpp
 * @brief Joint (theta, T) maximum likelihood from one observed path.
 *
 * For signals affine in theta the likelihood is maximized in closed form
 * for each candidate period (normal equations G(T) theta = v(T)), which
 * reduces the joint problem to a one-dimensional profile search over T.
 * The profile objective ripples on a scale of order T^2/n, so the search
 * is a dense coarse grid followed by golden-section refinement.
 */

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "lanlab/errors.hpp"
#include "lanlab/fisher.hpp"
#include "lanlab/lan.hpp"
#include "lanlab/parallel.hpp"
#include "lanlab/sde.hpp"
#include "lanlab/signal.hpp"
#include "lanlab/stats.hpp"

namespace lanlab {

/// Parameter-dependent part of the Girsanov log-density, computable from
/// the observed increments alone:
///   l(theta,T) = sum S/sigma^2 (d eta - b dt) - 1/2 sum S^2/sigma^2 dt.
inline double quasi_log_likelihood(const PathRecord& path,
                                   const DiffusionSpec& dspec,
                                   const SignalSpec& spec, const Vector& theta,
                                   double T) {
  if (!(T > 0.0)) throw InvalidParameter("estimator: T must be positive");
  const std::int64_t count = path.steps();
  double acc = 0.0;
  scan_signal_grid(spec, theta, T, 0.0, path.dt, count,
                   [&](std::int64_t i, double, double s, double,
                       const double*) {
                     const auto u = static_cast<std::size_t>(i);
                     const double x = path.xi[u];
                     const double sig2 = dspec.sigma(x);
                     const double inv = 1.0 / (sig2 * sig2);
                     const double deta = path.xi[u + 1] - x;
                     acc += inv * (s * (deta - dspec.drift_b(x) * path.dt) -
                                   0.5 * s * s * path.dt);
                   });
  return acc;
}

struct EstimationResult {
  Vector theta_hat;
  double T_hat = 0.0;
  double loglik = 0.0;  ///< profiled objective at the maximum
  std::vector<std::pair<double, double>> profile_curve;  ///< (T, profiled ll)
  Vector stderr_;  ///< delta_n diag(F^{-1})^{1/2}; empty if sigma non-constant
};

namespace detail {

struct NormalEquations {
  Matrix G;
  Vector v;
  double const0 = 0.0;
};

/// One pass over the path for a candidate period: G_ij = sum psi_i psi_j
/// w, v_i = sum psi_i (d eta - (b + psi0) dt)/sigma^2, where psi are the
/// theta-partials of the signal and psi0 its theta-independent part.
inline NormalEquations accumulate_normal_equations(const PathRecord& path,
                                                   const DiffusionSpec& dspec,
                                                   const SignalSpec& spec,
                                                   double T) {
  const int d = spec.d;
  NormalEquations ne;
  ne.G = Matrix::Zero(d, d);
  ne.v = Vector::Zero(d);
  const Vector zero = Vector::Zero(d);
  const double dt = path.dt;
  double* Gp = ne.G.data();
  double* vp = ne.v.data();
  scan_signal_grid(
      spec, zero, T, 0.0, dt, path.steps(),
      [&](std::int64_t i, double, double psi0, double, const double* psi) {
        const auto u = static_cast<std::size_t>(i);
        const double x = path.xi[u];
        const double sig = dspec.sigma(x);
        const double inv = 1.0 / (sig * sig);
        const double resid =
            path.xi[u + 1] - x - (dspec.drift_b(x) + psi0) * dt;
        const double y = inv * resid;
        const double w = inv * dt;
        for (int a = 0; a < d; ++a) {
          vp[a] += psi[a] * y;
          const double pw = psi[a] * w;
          // column-major: fills row b <= col a, the upper triangle
          for (int b = 0; b <= a; ++b) Gp[a * d + b] += pw * psi[b];
        }
        ne.const0 += inv * psi0 * (resid + 0.5 * psi0 * dt);
      });
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) ne.G(b, a) = ne.G(a, b);
  return ne;
}

struct ProfilePoint {
  Vector theta;
  double ll = 0.0;
};

inline ProfilePoint solve_profile(const NormalEquations& ne) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(ne.G);
  const auto& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e10)
    throw SingularNormalEquations("estimator: normal equations ill-conditioned");
  ProfilePoint p;
  p.theta = ne.G.llt().solve(ne.v);
  p.ll = ne.const0 + 0.5 * ne.v.dot(p.theta);
  return p;
}

}  // namespace detail

/**
 * @brief Profile-likelihood MLE of (theta, T) over a bracket of candidate
 * periods.
 *
 * Coarse grid of max(grid_points, ceil(4 n / T_lo)) cells resolves the
 * ripple scale of the profiled objective; golden-section then refines
 * around the best grid point.  A collapsed bracket (Tlo == Thi) runs the
 * known-period fit.  Ties break toward smaller T; a maximum on the
 * bracket boundary is an error.
 */
inline EstimationResult profile_mle(const PathRecord& path,
                                    const DiffusionSpec& dspec,
                                    const SignalSpec& spec, double T_lo,
                                    double T_hi, int grid_points = 64) {
  if (!(T_lo > 0.0) || T_hi < T_lo)
    throw InvalidParameter("estimator: bad period bracket");
  dspec.validate();
  const double n_eff = path.horizon();
  const std::int64_t n = std::llround(n_eff);

  auto finish = [&](double T_hat, EstimationResult res) {
    const auto ne = detail::accumulate_normal_equations(path, dspec, spec, T_hat);
    const auto p = detail::solve_profile(ne);
    res.theta_hat = p.theta;
    res.T_hat = T_hat;
    res.loglik = p.ll;
    if (dspec.sigma_is_constant() && n > 0) {
      const FisherMatrix fm =
          fisher_matrix(spec, p.theta, T_hat, 1.0, dspec.sigma_c);
      const LocalScale ls = LocalScale::make(spec.d, n);
      res.stderr_ = ls.diag.cwiseProduct(
          fm.F.inverse().diagonal().cwiseMax(0.0).cwiseSqrt());
    }
    return res;
  };

  EstimationResult res;
  if (T_hi == T_lo) return finish(T_lo, std::move(res));

  const int cells = std::max<std::int64_t>(
      grid_points,
      static_cast<std::int64_t>(std::ceil(4.0 * n_eff / T_lo)));
  const double step = (T_hi - T_lo) / cells;
  auto objective = [&](double T) {
    return detail::solve_profile(
               detail::accumulate_normal_equations(path, dspec, spec, T))
        .ll;
  };
  res.profile_curve.reserve(static_cast<std::size_t>(cells) + 1);
  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= cells; ++j) {
    const double T = T_lo + j * step;
    const double ll = objective(T);
    res.profile_curve.emplace_back(T, ll);
    if (ll > best_ll) {  // strict: ties stay at smaller T
      best_ll = ll;
      best = j;
    }
  }
  if (best == 0 || best == cells)
    throw BoundaryMaximum("estimator: profiled maximum on bracket boundary");

  // golden-section refinement on [T(best-1), T(best+1)]
  const double tol = std::max(
      1e-6 * std::pow(n_eff, -1.5) * (T_hi - T_lo), 1e-10);
  constexpr double invphi = 0.6180339887498949;
  double a = T_lo + (best - 1) * step;
  double b = T_lo + (best + 1) * step;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (b - a > tol) {
    if (f1 >= f2) {  // ties toward smaller T
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = objective(x2);
    }
  }
  return finish(0.5 * (a + b), std::move(res));
}

/// One line per (n, component): spread of the estimation error and the
/// fitted log-log slope against n.
struct RateTable {
  struct Row {
    std::int64_t n = 0;
    Vector theta_sd;
    double T_sd = 0.0;
    int dropped = 0;
  };
  std::vector<Row> rows;
  Vector theta_slopes;
  double T_slope = 0.0;
  bool degenerate_variance = false;  ///< some sd ~ 0; slope fit rejected
};

/**
 * @brief Monte Carlo confirmation of the two-rate structure: sd(theta_hat)
 * should scale like n^{-1/2} and sd(T_hat) like n^{-3/2}.
 *
 * Failed replications (boundary or singular fits) are dropped and
 * counted, not fatal.
 */
inline RateTable rate_experiment(const DiffusionSpec& dspec,
                                 const SignalSpec& spec, const Vector& theta,
                                 double T, const std::vector<std::int64_t>& n_list,
                                 int replications, double dt,
                                 std::uint64_t seed, double T_lo, double T_hi,
                                 int grid_points = 64, unsigned threads = 1) {
  if (n_list.size() < 3 ||
      !std::is_sorted(n_list.begin(), n_list.end(),
                      [](auto a, auto b) { return a <= b; }))
    throw InvalidParameter(
        "estimator: n_list must be strictly increasing with length >= 3");
  const int d = spec.d;
  RateTable table;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const std::int64_t n = n_list[ni];
    std::vector<Vector> theta_err(static_cast<std::size_t>(replications));
    std::vector<double> T_err(static_cast<std::size_t>(replications));
    std::vector<char> ok(static_cast<std::size_t>(replications), 0);
    parallel_for(replications, threads, [&](std::int64_t r) {
      const std::uint64_t s =
          derive_seed(seed, static_cast<std::uint64_t>(ni) * 1000003ULL +
                                static_cast<std::uint64_t>(r));
      PathRecord path = simulate_path(dspec, spec, theta, T,
                                      static_cast<double>(n), dt, s);
      try {
        EstimationResult est =
            profile_mle(path, dspec, spec, T_lo, T_hi, grid_points);
        theta_err[static_cast<std::size_t>(r)] = est.theta_hat - theta;
        T_err[static_cast<std::size_t>(r)] = est.T_hat - T;
        ok[static_cast<std::size_t>(r)] = 1;
      } catch (const BoundaryMaximum&) {
      } catch (const SingularNormalEquations&) {
      }
    });
    RateTable::Row row;
    row.n = n;
    row.theta_sd = Vector::Zero(d);
    std::vector<double> Ts;
    std::vector<std::vector<double>> comps(static_cast<std::size_t>(d));
    for (int r = 0; r < replications; ++r) {
      if (!ok[static_cast<std::size_t>(r)]) {
        ++row.dropped;
        continue;
      }
      Ts.push_back(T_err[static_cast<std::size_t>(r)]);
      for (int q = 0; q < d; ++q)
        comps[static_cast<std::size_t>(q)].push_back(
            theta_err[static_cast<std::size_t>(r)][q]);
    }
    if (Ts.size() < 2)
      throw InvalidParameter("estimator: too few successful replications");
    row.T_sd = sample_sd(Ts);
    for (int q = 0; q < d; ++q)
      row.theta_sd[q] = sample_sd(comps[static_cast<std::size_t>(q)]);
    table.rows.push_back(std::move(row));
  }
  // slope fit on log-log scale
  table.theta_slopes = Vector::Zero(d);
  std::vector<double> lx;
  for (const auto& row : table.rows) {
    lx.push_back(std::log(static_cast<double>(row.n)));
    if (row.T_sd < 1e-12 || row.theta_sd.minCoeff() < 1e-12)
      table.degenerate_variance = true;
  }
  if (table.degenerate_variance) {
    table.T_slope = std::numeric_limits<double>::quiet_NaN();
    table.theta_slopes.setConstant(std::numeric_limits<double>::quiet_NaN());
    return table;
  }
  std::vector<double> ly;
  for (const auto& row : table.rows) ly.push_back(std::log(row.T_sd));
  table.T_slope = ls_slope(lx, ly);
  for (int q = 0; q < d; ++q) {
    ly.clear();
    for (const auto& row : table.rows) ly.push_back(std::log(row.theta_sd[q]));
    table.theta_slopes[q] = ls_slope(lx, ly);
  }
  return table;
}

}  // namespace lanlab

#endif  // LANLAB_ESTIMATOR_HPP
