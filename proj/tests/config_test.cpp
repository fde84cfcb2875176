#include <gtest/gtest.h>

#include "lanlab/config.hpp"

namespace lanlab {
namespace {

Json minimal_config() {
  return Json::parse(R"({
    "model": {
      "drift": {"type": "mean_reverting", "beta": 1.0},
      "sigma": {"type": "constant", "value": 1.0}
    },
    "signal": {
      "family": "fourier",
      "d": 1,
      "terms": [{"k": 1, "g": [1.0]}]
    },
    "theta": [1.0],
    "T": 1.0
  })");
}

TEST(Config, RoundTripIsIdentity) {
  const ExperimentConfig a = config_from_json(minimal_config());
  const Json echo = to_json(a);
  const ExperimentConfig b = config_from_json(echo);
  EXPECT_EQ(echo, to_json(b));
}

TEST(Config, DefaultsMaterialized) {
  const ExperimentConfig c = config_from_json(minimal_config());
  EXPECT_EQ(c.n, 100);
  EXPECT_EQ(c.replications, 100);
  EXPECT_DOUBLE_EQ(c.dt, 1e-3);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.h.size(), 2);
  EXPECT_DOUBLE_EQ(c.h[0], 1.0);
  EXPECT_DOUBLE_EQ(c.T_bracket_lo, 0.9);
  EXPECT_DOUBLE_EQ(c.T_bracket_hi, 1.1);
  const Json echo = to_json(c);
  // the echo records every default explicitly
  for (const char* key :
       {"n", "replications", "dt", "seed", "output_dir", "T_bracket",
        "grid_points", "ergodic_k", "fisher_t", "horizon"})
    EXPECT_TRUE(echo.contains(key)) << key;
}

TEST(Config, BasisFormParses) {
  Json j = minimal_config();
  j["signal"] = Json::parse(R"({
    "family": "linear_basis",
    "d": 2,
    "basis": [
      [{"k": 1, "sin": 1.4142135623730951}],
      [{"k": 2, "sin": 1.4142135623730951}]
    ]
  })");
  j["theta"] = {1.0, 0.5};
  const ExperimentConfig c = config_from_json(j);
  EXPECT_EQ(c.signal.family, SignalFamily::LinearBasis);
  EXPECT_EQ(c.signal.d, 2);
  // round-trips through the terms form
  const ExperimentConfig again = config_from_json(to_json(c));
  EXPECT_NEAR(eval(again.signal, c.theta, 1.0, 0.3),
              eval(c.signal, c.theta, 1.0, 0.3), 1e-15);
}

TEST(Config, BoundedPerturbationModel) {
  Json j = minimal_config();
  j["model"]["sigma"] =
      Json::parse(R"({"type": "bounded_perturbation", "c0": 1.0, "amplitude": 0.5})");
  const ExperimentConfig c = config_from_json(j);
  EXPECT_EQ(c.model.sigma_kind, SigmaKind::BoundedPerturbation);
  EXPECT_EQ(to_json(config_from_json(to_json(c))), to_json(c));
}

TEST(Config, ValidationErrors) {
  {
    Json j = minimal_config();
    j["theta"] = {1.0, 2.0};
    EXPECT_THROW(config_from_json(j), InvalidParameter);
  }
  {
    Json j = minimal_config();
    j["T"] = -1.0;
    EXPECT_THROW(config_from_json(j), InvalidParameter);
  }
  {
    Json j = minimal_config();
    j["n_list"] = {100, 100, 200};
    EXPECT_THROW(config_from_json(j), InvalidParameter);
  }
  {
    Json j = minimal_config();
    j["T_bracket"] = {1.2, 0.8};
    EXPECT_THROW(config_from_json(j), InvalidParameter);
  }
  {
    Json j = minimal_config();
    j["signal"]["family"] = "spline";
    EXPECT_THROW(config_from_json(j), InvalidParameter);
  }
  {
    Json j = minimal_config();
    j["model"]["drift"]["type"] = "quadratic";
    EXPECT_THROW(config_from_json(j), InvalidParameter);
  }
  {
    Json j = minimal_config();
    j["model"]["sigma"]["value"] = 0.0;
    EXPECT_THROW(config_from_json(j), InvalidModel);
  }
}

}  // namespace
}  // namespace lanlab
