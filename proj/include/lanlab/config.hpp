#ifndef LANLAB_CONFIG_HPP
#define LANLAB_CONFIG_HPP

/**
 * @file config.hpp
 * @brief Experiment configuration: JSON schema, validation and
 * round-trippable serialization.  All defaults are materialized on
 * parse, so the serialized echo is a complete record of the run.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanlab/errors.hpp"
#include "lanlab/sde.hpp"
#include "lanlab/signal.hpp"

namespace lanlab {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
  DiffusionSpec model;
  SignalSpec signal;
  Vector theta;
  double T = 1.0;
  Vector h;             ///< length d+1; defaults to ones
  std::int64_t n = 100;
  std::vector<std::int64_t> n_list;
  int replications = 100;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  double T_bracket_lo = 0.0;  ///< 0 means "derive from T"
  double T_bracket_hi = 0.0;
  int grid_points = 64;
  int ergodic_k = 0;
  double fisher_t = 1.0;
  double horizon = 0.0;  ///< 0 means "use n"

  void validate() const {
    model.validate();
    signal.validate();
    if (theta.size() != signal.d)
      throw InvalidParameter("config: theta length must equal signal d");
    if (!(T > 0.0)) throw InvalidParameter("config: T must be positive");
    if (h.size() != signal.d + 1)
      throw InvalidParameter("config: h length must equal d+1");
    if (n <= 0) throw InvalidParameter("config: n must be positive");
    if (replications <= 0)
      throw InvalidParameter("config: replications must be positive");
    if (!(dt > 0.0)) throw InvalidParameter("config: dt must be positive");
    if (T_bracket_hi < T_bracket_lo || T_bracket_lo < 0.0)
      throw InvalidParameter("config: bad T_bracket");
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
      if (n_list[i] >= n_list[i + 1])
        throw InvalidParameter("config: n_list must be strictly increasing");
  }
};

namespace cfg_detail {

inline Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Vector vector_from_json(const Json& a) {
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

}  // namespace cfg_detail

inline Json signal_to_json(const SignalSpec& s) {
  Json j;
  j["family"] = s.family == SignalFamily::Fourier ? "fourier" : "linear_basis";
  j["d"] = s.d;
  Json terms = Json::array();
  for (const auto& t : s.terms) {
    Json jt;
    jt["k"] = t.k;
    jt["g0"] = t.g0;
    jt["g"] = cfg_detail::vector_to_json(t.g);
    jt["h0"] = t.h0;
    jt["h"] = cfg_detail::vector_to_json(t.h);
    terms.push_back(jt);
  }
  j["terms"] = terms;
  return j;
}

inline SignalSpec signal_from_json(const Json& j) {
  SignalSpec s;
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "fourier")
    s.family = SignalFamily::Fourier;
  else if (fam == "linear_basis")
    s.family = SignalFamily::LinearBasis;
  else
    throw InvalidParameter("config: unknown signal family '" + fam + "'");
  s.d = j.at("d").get<int>();
  if (j.contains("basis")) {
    // basis form: list of Fourier polynomials, one per theta component
    std::vector<FourierPolynomial> basis;
    for (const auto& jp : j.at("basis")) {
      FourierPolynomial p;
      for (const auto& jh : jp)
        p.harmonics.push_back({jh.at("k").get<int>(),
                               jh.value("sin", 0.0), jh.value("cos", 0.0)});
      basis.push_back(std::move(p));
    }
    SignalSpec lb = SignalSpec::linear_basis(basis);
    if (lb.d != s.d)
      throw InvalidParameter("config: basis size does not match d");
    return lb;
  }
  for (const auto& jt : j.at("terms")) {
    FourierTerm t;
    t.k = jt.at("k").get<int>();
    t.g0 = jt.value("g0", 0.0);
    t.h0 = jt.value("h0", 0.0);
    t.g = jt.contains("g") ? cfg_detail::vector_from_json(jt.at("g"))
                           : Vector::Zero(s.d);
    t.h = jt.contains("h") ? cfg_detail::vector_from_json(jt.at("h"))
                           : Vector::Zero(s.d);
    s.terms.push_back(std::move(t));
  }
  s.validate();
  return s;
}

inline Json model_to_json(const DiffusionSpec& m) {
  Json j;
  Json drift;
  switch (m.drift) {
    case DriftKind::Zero:
      drift["type"] = "zero";
      break;
    case DriftKind::MeanReverting:
      drift["type"] = "mean_reverting";
      drift["beta"] = m.beta;
      break;
    case DriftKind::Custom:
      drift["type"] = "custom";
      drift["breakpoints"] = m.table.breakpoints;
      drift["intercepts"] = m.table.intercepts;
      drift["slopes"] = m.table.slopes;
      break;
  }
  j["drift"] = drift;
  Json sig;
  if (m.sigma_kind == SigmaKind::Constant) {
    sig["type"] = "constant";
    sig["value"] = m.sigma_c;
  } else {
    sig["type"] = "bounded_perturbation";
    sig["c0"] = m.sigma_c;
    sig["amplitude"] = m.sigma_amp;
  }
  j["sigma"] = sig;
  j["x0"] = m.x0;
  return j;
}

inline DiffusionSpec model_from_json(const Json& j) {
  DiffusionSpec m;
  const Json& drift = j.at("drift");
  const std::string dk = drift.at("type").get<std::string>();
  if (dk == "zero") {
    m.drift = DriftKind::Zero;
  } else if (dk == "mean_reverting") {
    m.drift = DriftKind::MeanReverting;
    m.beta = drift.at("beta").get<double>();
  } else if (dk == "custom") {
    m.drift = DriftKind::Custom;
    m.table.breakpoints = drift.at("breakpoints").get<std::vector<double>>();
    m.table.intercepts = drift.at("intercepts").get<std::vector<double>>();
    m.table.slopes = drift.at("slopes").get<std::vector<double>>();
  } else {
    throw InvalidParameter("config: unknown drift type '" + dk + "'");
  }
  const Json& sig = j.at("sigma");
  const std::string sk = sig.at("type").get<std::string>();
  if (sk == "constant") {
    m.sigma_kind = SigmaKind::Constant;
    m.sigma_c = sig.at("value").get<double>();
  } else if (sk == "bounded_perturbation") {
    m.sigma_kind = SigmaKind::BoundedPerturbation;
    m.sigma_c = sig.at("c0").get<double>();
    m.sigma_amp = sig.at("amplitude").get<double>();
  } else {
    throw InvalidParameter("config: unknown sigma type '" + sk + "'");
  }
  m.x0 = j.value("x0", 0.0);
  m.validate();
  return m;
}

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["model"] = model_to_json(c.model);
  j["signal"] = signal_to_json(c.signal);
  j["theta"] = cfg_detail::vector_to_json(c.theta);
  j["T"] = c.T;
  j["h"] = cfg_detail::vector_to_json(c.h);
  j["n"] = c.n;
  j["n_list"] = c.n_list;
  j["replications"] = c.replications;
  j["dt"] = c.dt;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["T_bracket"] = {c.T_bracket_lo, c.T_bracket_hi};
  j["grid_points"] = c.grid_points;
  j["ergodic_k"] = c.ergodic_k;
  j["fisher_t"] = c.fisher_t;
  j["horizon"] = c.horizon;
  return j;
}

inline ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  c.model = model_from_json(j.at("model"));
  c.signal = signal_from_json(j.at("signal"));
  c.theta = cfg_detail::vector_from_json(j.at("theta"));
  c.T = j.at("T").get<double>();
  c.h = j.contains("h") ? cfg_detail::vector_from_json(j.at("h"))
                        : Vector::Ones(c.signal.d + 1);
  c.n = j.value("n", std::int64_t{100});
  if (j.contains("n_list"))
    c.n_list = j.at("n_list").get<std::vector<std::int64_t>>();
  c.replications = j.value("replications", 100);
  c.dt = j.value("dt", 1e-3);
  c.seed = j.value("seed", std::uint64_t{1});
  c.output_dir = j.value("output_dir", std::string("out"));
  if (j.contains("T_bracket")) {
    c.T_bracket_lo = j.at("T_bracket").at(0).get<double>();
    c.T_bracket_hi = j.at("T_bracket").at(1).get<double>();
  } else {
    c.T_bracket_lo = 0.9 * c.T;
    c.T_bracket_hi = 1.1 * c.T;
  }
  c.grid_points = j.value("grid_points", 64);
  c.ergodic_k = j.value("ergodic_k", 0);
  c.fisher_t = j.value("fisher_t", 1.0);
  c.horizon = j.value("horizon", 0.0);
  c.validate();
  return c;
}

}  // namespace lanlab

#endif  // LANLAB_CONFIG_HPP
