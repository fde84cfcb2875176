#ifndef LANLAB_ERGODIC_HPP
#define LANLAB_ERGODIC_HPP

/**
 * @file ergodic.hpp
 * @brief Weighted time averages along a path and the limiting
 * inner products they converge to.
 *
 * For a 1-periodic bounded f and k in {0,1,2},
 *
 *   (k+1) t^{-(k+1)} int_0^t s^k f(s/T) / sigma^2(xi_s) ds
 *
 * converges almost surely to nu[f], where nu is the occupation-type
 * measure on (0,1) induced by the invariant law and sigma^{-2}.  When
 * sigma is constant c, nu is Lebesgue measure scaled by c^{-2} and the
 * inner products have closed trigonometric forms.
 */

#include <cmath>
#include <functional>

#include "lanlab/errors.hpp"
#include "lanlab/sde.hpp"
#include "lanlab/signal.hpp"

namespace lanlab {

enum class NuMethod { ClosedForm, PathAverage };

struct NuFunctional {
  double value = 0.0;
  NuMethod method = NuMethod::ClosedForm;
  int k = 0;       ///< weight exponent for PathAverage
  double t = 0.0;  ///< averaging horizon for PathAverage
};

/// Left-point Riemann evaluation of the weighted ergodic average
/// (k+1) t^{-(k+1)} int_0^t s^k f(s/T)/sigma^2(xi_s) ds at the path's
/// full horizon.  f is a 1-periodic function of u = s/T.
inline double weighted_time_average(const PathRecord& path,
                                    const DiffusionSpec& dspec,
                                    const std::function<double(double)>& f,
                                    int k) {
  if (k < 0 || k > 2) throw InvalidParameter("ergodic: k must be in {0,1,2}");
  const double t = path.horizon();
  if (!(t > 0.0)) throw InvalidParameter("ergodic: empty path");
  const double dt = path.dt;
  double acc = 0.0;
  const std::int64_t n = path.steps();
  for (std::int64_t i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i) * dt;
    const double w = (k == 0) ? 1.0 : (k == 1 ? ti : ti * ti);
    const double sig = dspec.sigma(path.xi[static_cast<std::size_t>(i)]);
    acc += w * f(ti / path.T) / (sig * sig);
  }
  acc *= dt;
  return (k + 1) * std::pow(t, -(k + 1)) * acc;
}

/// Composite Simpson over (0,1) with 256 panels.
inline double simpson_unit_interval(const std::function<double(double)>& f) {
  constexpr int panels = 256;
  const double h = 1.0 / panels;
  double acc = f(0.0) + f(1.0);
  for (int i = 1; i < panels; ++i)
    acc += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

/// Which signal component an inner product refers to: a theta partial
/// (index in [0,d)) or the u-derivative S'_theta.
struct SigComponent {
  int theta_index = -1;  ///< -1 means S'_theta
  static SigComponent theta(int i) { return {i}; }
  static SigComponent sprime() { return {-1}; }
};

/**
 * @brief Closed-form nu inner product for constant sigma c:
 *        c^{-2} int_0^1 f g du, with f, g drawn from
 *        {d_theta_i S_theta, S'_theta}.
 *
 * Exact term-by-term trigonometric integration; no quadrature error.
 */
inline double nu_inner_product(const SignalSpec& spec, const Vector& theta,
                               SigComponent a, SigComponent b,
                               double sigma_const = 1.0) {
  detail::check_eval_args(spec, theta, 1.0);
  if (!(sigma_const > 0.0))
    throw NeedsPathEstimate("ergodic: non-constant sigma needs a path estimate");
  auto check = [&](const SigComponent& c) {
    if (c.theta_index >= spec.d)
      throw InvalidParameter("ergodic: component index out of range");
  };
  check(a);
  check(b);
  // order so that S' (if any) comes second
  if (a.theta_index < 0 && b.theta_index >= 0) std::swap(a, b);
  double acc = 0.0;
  for (const auto& t : spec.terms) {
    const double gk = detail::sin_coef(t, theta);
    const double hk = detail::cos_coef(t, theta);
    if (a.theta_index >= 0 && b.theta_index >= 0) {
      // <d_i S, d_j S> = 1/2 sum (g_ki g_kj + h_ki h_kj)
      acc += 0.5 * (t.g[a.theta_index] * t.g[b.theta_index] +
                    t.h[a.theta_index] * t.h[b.theta_index]);
    } else if (a.theta_index >= 0) {
      // <d_i S, S'> = pi sum k (h_ki g_k - g_ki h_k)
      acc += std::numbers::pi * t.k *
             (t.h[a.theta_index] * gk - t.g[a.theta_index] * hk);
    } else {
      // <S', S'> = 2 pi^2 sum k^2 (g_k^2 + h_k^2)
      acc += 2.0 * std::numbers::pi * std::numbers::pi * t.k * t.k *
             (gk * gk + hk * hk);
    }
  }
  return acc / (sigma_const * sigma_const);
}

/// Simpson fallback for factors that are not trigonometric polynomials.
inline double nu_inner_product_quadrature(
    const std::function<double(double)>& f,
    const std::function<double(double)>& g, double sigma_const = 1.0) {
  const double v =
      simpson_unit_interval([&](double u) { return f(u) * g(u); });
  return v / (sigma_const * sigma_const);
}

}  // namespace lanlab

#endif  // LANLAB_ERGODIC_HPP
