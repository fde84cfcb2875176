#ifndef LANLAB_SDE_HPP
#define LANLAB_SDE_HPP

/**
 * @file sde.hpp
 * @brief Euler-Maruyama simulation of the periodically driven diffusion
 *
 *   d xi_t = [ S_{(theta,T)}(t) + b(xi_t) ] dt + sigma(xi_t) dW_t.
 *
 * Paths keep the Gaussian increments that generated them, so the Euler
 * update is an exact identity on the stored data and downstream Ito sums
 * can be formed against either dW or the path increments interchangeably.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "lanlab/errors.hpp"
#include "lanlab/rng.hpp"
#include "lanlab/signal.hpp"

namespace lanlab {

enum class DriftKind { Zero, MeanReverting, Custom };
enum class SigmaKind { Constant, BoundedPerturbation };

/// Piecewise-affine drift table: on [breakpoints[i], breakpoints[i+1]) the
/// drift is intercepts[i] + slopes[i]*x; the first/last pieces extend to
/// -inf/+inf.
struct DriftTable {
  std::vector<double> breakpoints;  // strictly increasing, size p-1 for p pieces
  std::vector<double> intercepts;   // size p
  std::vector<double> slopes;       // size p
};

/**
 * @brief Drift perturbation b, volatility sigma and start point.
 *
 * sigma = BoundedPerturbation(c0, a) means sigma(x) = c0 + a/(1+x^2);
 * validity requires c0 - |a| > 0 so sigma stays bounded away from zero.
 */
struct DiffusionSpec {
  DriftKind drift = DriftKind::Zero;
  double beta = 1.0;  ///< mean-reversion speed for MeanReverting, b(x) = -beta x
  DriftTable table;   ///< used when drift == Custom

  SigmaKind sigma_kind = SigmaKind::Constant;
  double sigma_c = 1.0;    ///< constant value, or c0 for BoundedPerturbation
  double sigma_amp = 0.0;  ///< perturbation amplitude

  double x0 = 0.0;

  double drift_b(double x) const {
    switch (drift) {
      case DriftKind::Zero:
        return 0.0;
      case DriftKind::MeanReverting:
        return -beta * x;
      case DriftKind::Custom: {
        const auto& bp = table.breakpoints;
        const std::size_t i = static_cast<std::size_t>(
            std::upper_bound(bp.begin(), bp.end(), x) - bp.begin());
        return table.intercepts[i] + table.slopes[i] * x;
      }
    }
    return 0.0;
  }

  double sigma(double x) const {
    if (sigma_kind == SigmaKind::Constant) return sigma_c;
    return sigma_c + sigma_amp / (1.0 + x * x);
  }

  bool sigma_is_constant() const { return sigma_kind == SigmaKind::Constant; }

  /// inf sigma over the real line.
  double sigma_inf() const {
    if (sigma_kind == SigmaKind::Constant) return sigma_c;
    return sigma_amp >= 0.0 ? sigma_c : sigma_c + sigma_amp;
  }

  void validate() const {
    if (drift == DriftKind::MeanReverting && !(beta > 0.0))
      throw InvalidModel("sde: mean-reversion speed must be positive");
    if (drift == DriftKind::Custom) {
      const std::size_t p = table.intercepts.size();
      if (p == 0 || table.slopes.size() != p || table.breakpoints.size() + 1 != p)
        throw InvalidModel("sde: malformed drift table");
      if (!std::is_sorted(table.breakpoints.begin(), table.breakpoints.end()))
        throw InvalidModel("sde: drift breakpoints must be increasing");
    }
    if (!(sigma_inf() > 0.0))
      throw InvalidModel("sde: sigma must be bounded away from zero");
  }
};

/// A discretized trajectory together with the Brownian increments that
/// generated it.  xi has N+1 entries, dW has N, t_i = i*dt.
struct PathRecord {
  double dt = 0.0;
  std::vector<double> xi;
  std::vector<double> dW;
  Vector theta;
  double T = 0.0;
  std::uint64_t seed = 0;

  std::int64_t steps() const { return static_cast<std::int64_t>(dW.size()); }
  double horizon() const { return static_cast<double>(steps()) * dt; }
};

inline constexpr std::int64_t kMaxSteps = 1'000'000'000;

/// Euler-Maruyama with caller-supplied increments (test hook: pass zeros
/// for a noiseless path).
inline PathRecord simulate_path_with_increments(const DiffusionSpec& dspec,
                                                const SignalSpec& sspec,
                                                const Vector& theta, double T,
                                                double dt,
                                                std::vector<double> dW,
                                                std::uint64_t seed = 0) {
  dspec.validate();
  if (!(dt > 0.0)) throw InvalidParameter("sde: dt must be positive");
  const std::int64_t n = static_cast<std::int64_t>(dW.size());
  PathRecord path;
  path.dt = dt;
  path.theta = theta;
  path.T = T;
  path.seed = seed;
  path.dW = std::move(dW);
  path.xi.resize(static_cast<std::size_t>(n) + 1);
  path.xi[0] = dspec.x0;
  scan_signal_grid(sspec, theta, T, 0.0, dt, n,
                   [&](std::int64_t i, double /*t*/, double s_val,
                       double /*sp*/, const double* /*grad*/) {
                     const double x = path.xi[static_cast<std::size_t>(i)];
                     path.xi[static_cast<std::size_t>(i) + 1] =
                         x + (s_val + dspec.drift_b(x)) * dt +
                         dspec.sigma(x) * path.dW[static_cast<std::size_t>(i)];
                   });
  return path;
}

/**
 * @brief Simulates one path over [0, horizon] with step dt.
 *
 * Deterministic in (spec, seed); replication r of an experiment should
 * pass derive_seed(seed, r).
 */
inline PathRecord simulate_path(const DiffusionSpec& dspec,
                                const SignalSpec& sspec, const Vector& theta,
                                double T, double horizon, double dt,
                                std::uint64_t seed) {
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw InvalidParameter("sde: horizon and dt must be positive");
  const double steps_f = horizon / dt;
  if (steps_f > static_cast<double>(kMaxSteps))
    throw ResourceLimit("sde: step budget exceeded");
  const std::int64_t n = std::llround(steps_f);
  std::vector<double> dW(static_cast<std::size_t>(n));
  GaussianStream g(seed);
  const double sq = std::sqrt(dt);
  for (auto& w : dW) w = sq * g();
  return simulate_path_with_increments(dspec, sspec, theta, T, dt,
                                       std::move(dW), seed);
}

/// Samples the path at the grid times k*T, k = 0..floor(horizon/T),
/// rounding k*T/dt half-up to the nearest grid index.
inline std::vector<double> grid_chain(const PathRecord& path) {
  const double T = path.T;
  const double horizon = path.horizon();
  if (T > horizon) throw InvalidParameter("sde: T exceeds path horizon");
  const std::int64_t kmax =
      static_cast<std::int64_t>(std::floor(horizon / T + 1e-12));
  std::vector<double> chain;
  chain.reserve(static_cast<std::size_t>(kmax) + 1);
  for (std::int64_t k = 0; k <= kmax; ++k) {
    std::int64_t idx = static_cast<std::int64_t>(
        std::floor(static_cast<double>(k) * T / path.dt + 0.5));
    idx = std::min<std::int64_t>(idx, path.steps());
    chain.push_back(path.xi[static_cast<std::size_t>(idx)]);
  }
  return chain;
}

/// Writes the path as CSV with columns t, xi, dW (dW empty on last row).
template <class Ostream>
void write_path_csv(Ostream& os, const PathRecord& path) {
  os << "t,xi,dW\n";
  char buf[96];
  const std::int64_t n = path.steps();
  for (std::int64_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * path.dt;
    if (i < n)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t,
                    path.xi[static_cast<std::size_t>(i)],
                    path.dW[static_cast<std::size_t>(i)]);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,\n", t,
                    path.xi[static_cast<std::size_t>(i)]);
    os << buf;
  }
}

}  // namespace lanlab

#endif  // LANLAB_SDE_HPP
