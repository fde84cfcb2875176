#include <gtest/gtest.h>

#include <cmath>

#include "lanlab/ergodic.hpp"

namespace lanlab {
namespace {

Vector vec1(double x) { return Vector::Constant(1, x); }

// independent trapezoid oracle on (0,1), 20000 panels
double trapz01(const std::function<double(double)>& f) {
  const int n = 20000;
  double acc = 0.5 * (f(0.0) + f(1.0));
  for (int i = 1; i < n; ++i) acc += f(static_cast<double>(i) / n);
  return acc / n;
}

DiffusionSpec unit_sigma() {
  DiffusionSpec d;
  d.drift = DriftKind::Zero;
  d.sigma_kind = SigmaKind::Constant;
  d.sigma_c = 1.0;
  return d;
}

DiffusionSpec perturbed_ou() {
  DiffusionSpec d;
  d.drift = DriftKind::MeanReverting;
  d.beta = 1.0;
  d.sigma_kind = SigmaKind::BoundedPerturbation;
  d.sigma_c = 1.0;
  d.sigma_amp = 0.5;
  return d;
}

PathRecord make_path(const DiffusionSpec& d, double horizon, double dt,
                     std::uint64_t seed, double T = 1.0) {
  return simulate_path(d, SignalSpec::sine(), vec1(1.0), T, horizon, dt, seed);
}

PathRecord truncate(const PathRecord& p, double t) {
  PathRecord out = p;
  const std::size_t n = static_cast<std::size_t>(std::llround(t / p.dt));
  out.xi.assign(p.xi.begin(), p.xi.begin() + static_cast<std::ptrdiff_t>(n) + 1);
  out.dW.assign(p.dW.begin(), p.dW.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

TEST(Ergodic, ConstantFunctionAllWeights) {
  const auto d = unit_sigma();
  const PathRecord p = make_path(d, 10.0, 1e-3, 11);
  for (int k = 0; k <= 2; ++k)
    EXPECT_NEAR(weighted_time_average(p, d, [](double) { return 1.0; }, k),
                1.0, 1e-3)
        << "k=" << k;
}

TEST(Ergodic, SinSquaredClosedForm) {
  const auto d = unit_sigma();
  const PathRecord p = make_path(d, 8.0, 1e-3, 12);  // t = 8 T
  const double est = weighted_time_average(
      p, d,
      [](double u) {
        const double s = std::sin(kTwoPi * u);
        return s * s;
      },
      0);
  EXPECT_NEAR(est, 0.5, 1e-9);
}

TEST(Ergodic, DeterministicForConstantSigma) {
  const auto d = unit_sigma();
  auto f = [](double u) { return std::cos(kTwoPi * u) + 2.0; };
  const double a =
      weighted_time_average(make_path(d, 6.0, 1e-3, 1), d, f, 2);
  const double b =
      weighted_time_average(make_path(d, 6.0, 1e-3, 999), d, f, 2);
  EXPECT_EQ(a, b);
}

TEST(Ergodic, KZeroAndKTwoAgreeUnderPerturbedSigma) {
  const auto d = perturbed_ou();
  const PathRecord p = make_path(d, 2000.0, 1e-3, 31);
  auto f = [](double u) {
    const double s = std::sin(kTwoPi * u);
    return s * s;
  };
  const double a0 = weighted_time_average(p, d, f, 0);
  const double a2 = weighted_time_average(p, d, f, 2);
  EXPECT_NEAR(a0, a2, 0.05 * std::abs(a0));
}

TEST(Ergodic, LinearityInConstantShift) {
  const auto d = perturbed_ou();
  const PathRecord p = make_path(d, 50.0, 1e-3, 13);
  auto f = [](double u) { return std::sin(kTwoPi * u); };
  const double c = 1.7;
  for (int k = 0; k <= 2; ++k) {
    const double base = weighted_time_average(p, d, f, k);
    const double shifted = weighted_time_average(
        p, d, [&](double u) { return f(u) + c; }, k);
    const double sig_mass =
        weighted_time_average(p, d, [](double) { return 1.0; }, k);
    EXPECT_NEAR(shifted, base + c * sig_mass,
                1e-12 * (1.0 + std::abs(shifted)));
  }
}

TEST(Ergodic, RunningAverageConverges) {
  // deviation from the t=4000 value should shrink along t = 500, 1000,
  // 2000 in most seeded runs
  const auto d = perturbed_ou();
  auto f = [](double u) {
    const double s = std::sin(kTwoPi * u);
    return s * s;
  };
  const int seeds = 50;
  int improved_ends = 0;
  double m500 = 0.0, m1000 = 0.0, m2000 = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const PathRecord p =
        make_path(d, 4000.0, 5e-3, derive_seed(400, static_cast<std::uint64_t>(s)));
    const double ref = weighted_time_average(p, d, f, 0);
    const double d500 =
        std::abs(weighted_time_average(truncate(p, 500.0), d, f, 0) - ref);
    const double d1000 =
        std::abs(weighted_time_average(truncate(p, 1000.0), d, f, 0) - ref);
    const double d2000 =
        std::abs(weighted_time_average(truncate(p, 2000.0), d, f, 0) - ref);
    m500 += d500;
    m1000 += d1000;
    m2000 += d2000;
    if (d2000 < d500) ++improved_ends;
  }
  // aggregate deviation shrinks monotonically with the horizon
  EXPECT_LT(m2000, m1000);
  EXPECT_LT(m1000, m500);
  // and most individual runs improve end to end
  EXPECT_GE(improved_ends, seeds / 2);
}

TEST(Ergodic, InvalidWeight) {
  const auto d = unit_sigma();
  const PathRecord p = make_path(d, 2.0, 1e-3, 5);
  EXPECT_THROW(
      weighted_time_average(p, d, [](double) { return 1.0; }, 3),
      InvalidParameter);
  EXPECT_THROW(
      weighted_time_average(p, d, [](double) { return 1.0; }, -1),
      InvalidParameter);
}

TEST(Ergodic, InnerProductSineExamples) {
  const SignalSpec spec = SignalSpec::sine();
  const Vector theta = vec1(1.0);
  EXPECT_DOUBLE_EQ(nu_inner_product(spec, theta, SigComponent::theta(0),
                                    SigComponent::theta(0)),
                   0.5);
  EXPECT_DOUBLE_EQ(nu_inner_product(spec, theta, SigComponent::theta(0),
                                    SigComponent::sprime()),
                   0.0);
  const double spsp = nu_inner_product(spec, theta, SigComponent::sprime(),
                                       SigComponent::sprime());
  EXPECT_NEAR(spsp, 2.0 * std::numbers::pi * std::numbers::pi, 1e-12);
  // quadrature oracle for the same quantity
  const double oracle = trapz01([](double u) {
    const double v = kTwoPi * std::cos(kTwoPi * u);
    return v * v;
  });
  EXPECT_NEAR(spsp, oracle, 1e-6 * spsp);
}

TEST(Ergodic, InnerProductGeneralFamilyMatchesQuadrature) {
  // mixed sin/cos family, all three product kinds against a trapezoid
  // oracle built from pointwise signal evaluation
  FourierTerm t1;
  t1.k = 1;
  t1.g0 = 0.2;
  t1.g = (Vector(2) << 1.0, 0.3).finished();
  t1.h = (Vector(2) << -0.4, 0.8).finished();
  FourierTerm t2;
  t2.k = 3;
  t2.h0 = -0.1;
  t2.g = (Vector(2) << 0.0, 1.2).finished();
  t2.h = (Vector(2) << 0.7, 0.0).finished();
  const SignalSpec spec = SignalSpec::fourier(2, {t1, t2});
  const Vector theta = (Vector(2) << 0.9, -0.5).finished();
  auto dtheta = [&](int i) {
    return [&, i](double u) {
      double acc = 0.0;
      for (const auto& t : spec.terms)
        acc += t.g[i] * std::sin(kTwoPi * t.k * u) +
               t.h[i] * std::cos(kTwoPi * t.k * u);
      return acc;
    };
  };
  auto sprime = [&](double u) { return shape_prime(spec, theta, u); };
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j)
      EXPECT_NEAR(nu_inner_product(spec, theta, SigComponent::theta(i),
                                   SigComponent::theta(j)),
                  trapz01([&](double u) { return dtheta(i)(u) * dtheta(j)(u); }),
                  1e-8);
    EXPECT_NEAR(nu_inner_product(spec, theta, SigComponent::theta(i),
                                 SigComponent::sprime()),
                trapz01([&](double u) { return dtheta(i)(u) * sprime(u); }),
                1e-6);
  }
  EXPECT_NEAR(nu_inner_product(spec, theta, SigComponent::sprime(),
                               SigComponent::sprime()),
              trapz01([&](double u) { return sprime(u) * sprime(u); }), 1e-4);
}

TEST(Ergodic, InnerProductSigmaScaling) {
  const SignalSpec spec = SignalSpec::sine();
  const Vector theta = vec1(1.0);
  const double base = nu_inner_product(spec, theta, SigComponent::theta(0),
                                       SigComponent::theta(0), 1.0);
  EXPECT_DOUBLE_EQ(nu_inner_product(spec, theta, SigComponent::theta(0),
                                    SigComponent::theta(0), 2.0),
                   base / 4.0);
}

TEST(Ergodic, InnerProductErrors) {
  const SignalSpec spec = SignalSpec::sine();
  EXPECT_THROW(nu_inner_product(spec, vec1(1.0), SigComponent::theta(5),
                                SigComponent::theta(0)),
               InvalidParameter);
  EXPECT_THROW(nu_inner_product(spec, vec1(1.0), SigComponent::theta(0),
                                SigComponent::theta(0), 0.0),
               NeedsPathEstimate);
}

TEST(Ergodic, QuadratureVariantMatchesClosedForm) {
  const SignalSpec spec = SignalSpec::sine();
  const Vector theta = vec1(1.0);
  auto dth = [](double u) { return std::sin(kTwoPi * u); };
  EXPECT_NEAR(nu_inner_product_quadrature(dth, dth),
              nu_inner_product(spec, theta, SigComponent::theta(0),
                               SigComponent::theta(0)),
              1e-10);
}

}  // namespace
}  // namespace lanlab
