#include "fwguide/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fwguide/fw_oracle.hpp"

namespace fwguide {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw ConfigError(ConfigError::Kind::Schema, what);
}

[[noreturn]] void physics_error(const std::string& what) {
  throw ConfigError(ConfigError::Kind::Physics, what);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) schema_error("unknown key '" + key + "' in " + where);
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    schema_error("missing key '" + std::string(key) + "' in " + where);
  }
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) schema_error(what + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) schema_error(what + " must be finite");
  return x;
}

Vec vec_from(const json& j, int dim, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    schema_error(what + " must be an array of " + std::to_string(dim) + " numbers");
  }
  Vec v(dim);
  for (int k = 0; k < dim; ++k) v[k] = number(j[k], what);
  return v;
}

json vec_to(const Vec& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

MotionProfile parse_motion(const json& j, int dim) {
  reject_unknown_keys(j, {"kind", "velocity", "amplitude", "frequency", "phase", "eta"},
                      "beacons.motion");
  const std::string kind = require(j, "kind", "beacons.motion").get<std::string>();
  const double eta = j.contains("eta") ? number(j["eta"], "beacons.motion.eta") : 0.0;
  if (kind == "stationary") {
    MotionProfile m = MotionProfile::stationary(dim);
    m.eta = eta;
    return m;
  }
  if (kind == "constant") {
    return MotionProfile::constant(
        vec_from(require(j, "velocity", "beacons.motion"), dim, "beacons.motion.velocity"), eta);
  }
  if (kind == "sinusoid") {
    const Vec phase = j.contains("phase") ? vec_from(j["phase"], dim, "beacons.motion.phase")
                                          : Vec::Zero(dim);
    return MotionProfile::sinusoid(
        vec_from(require(j, "velocity", "beacons.motion"), dim, "beacons.motion.velocity"),
        vec_from(require(j, "amplitude", "beacons.motion"), dim, "beacons.motion.amplitude"),
        number(require(j, "frequency", "beacons.motion"), "beacons.motion.frequency"), phase, eta);
  }
  schema_error("beacons.motion.kind must be stationary, constant or sinusoid");
}

json dump_motion(const MotionProfile& m) {
  json j;
  j["kind"] = std::string(to_string(m.kind));
  j["eta"] = m.eta;
  if (m.kind != MotionProfile::Kind::Stationary) j["velocity"] = vec_to(m.velocity);
  if (m.kind == MotionProfile::Kind::SinusoidVel) {
    j["amplitude"] = vec_to(m.amplitude);
    j["frequency"] = m.frequency;
    j["phase"] = vec_to(m.phase);
  }
  return j;
}

Gains parse_gains(const json& j) {
  reject_unknown_keys(j, {"k", "a", "beta", "k_beta", "tau_beta", "k1", "k2", "phi"}, "law.gains");
  Gains g;
  auto get = [&](const char* key, double& out) {
    if (j.contains(key)) out = number(j[key], std::string("law.gains.") + key);
  };
  get("k", g.k);
  get("a", g.a);
  get("beta", g.beta);
  get("k_beta", g.k_beta);
  get("tau_beta", g.tau_beta);
  get("k1", g.k1);
  get("k2", g.k2);
  get("phi", g.phi);
  return g;
}

json dump_gains(const Gains& g) {
  return json{{"k", g.k},   {"a", g.a},   {"beta", g.beta}, {"k_beta", g.k_beta},
              {"tau_beta", g.tau_beta}, {"k1", g.k1}, {"k2", g.k2},     {"phi", g.phi}};
}

AngleSignal parse_angle(const json& j, std::size_t i) {
  const std::string where = "noise.angles[" + std::to_string(i) + "]";
  reject_unknown_keys(j, {"kind", "amplitude", "omega"}, where);
  AngleSignal a;
  const std::string kind = require(j, "kind", where).get<std::string>();
  if (kind == "zero") {
    a.kind = AngleSignal::Kind::Zero;
  } else if (kind == "constant") {
    a.kind = AngleSignal::Kind::Constant;
    a.amplitude = number(require(j, "amplitude", where), where + ".amplitude");
  } else if (kind == "sine") {
    a.kind = AngleSignal::Kind::Sine;
    a.amplitude = number(require(j, "amplitude", where), where + ".amplitude");
    a.omega = number(require(j, "omega", where), where + ".omega");
  } else {
    schema_error(where + ".kind must be zero, constant or sine");
  }
  return a;
}

json dump_angle(const AngleSignal& a) {
  switch (a.kind) {
    case AngleSignal::Kind::Zero:
      return json{{"kind", "zero"}};
    case AngleSignal::Kind::Constant:
      return json{{"kind", "constant"}, {"amplitude", a.amplitude}};
    case AngleSignal::Kind::Sine:
      return json{{"kind", "sine"}, {"amplitude", a.amplitude}, {"omega", a.omega}};
  }
  return json{};
}

InitialPosition parse_initial(const json& j, int dim) {
  reject_unknown_keys(j, {"kind", "point", "lower", "upper"}, "initial_position");
  InitialPosition ip;
  const std::string kind = require(j, "kind", "initial_position").get<std::string>();
  if (kind == "explicit") {
    ip.kind = InitialPosition::Kind::Explicit;
    ip.point = vec_from(require(j, "point", "initial_position"), dim, "initial_position.point");
  } else if (kind == "random_box") {
    ip.kind = InitialPosition::Kind::RandomBox;
    ip.lower = vec_from(require(j, "lower", "initial_position"), dim, "initial_position.lower");
    ip.upper = vec_from(require(j, "upper", "initial_position"), dim, "initial_position.upper");
  } else if (kind == "random_ball") {
    ip.kind = InitialPosition::Kind::RandomBall;
  } else {
    schema_error("initial_position.kind must be explicit, random_box or random_ball");
  }
  return ip;
}

json dump_initial(const InitialPosition& ip) {
  switch (ip.kind) {
    case InitialPosition::Kind::Explicit:
      return json{{"kind", "explicit"}, {"point", vec_to(ip.point)}};
    case InitialPosition::Kind::RandomBox:
      return json{{"kind", "random_box"}, {"lower", vec_to(ip.lower)}, {"upper", vec_to(ip.upper)}};
    case InitialPosition::Kind::RandomBall:
      return json{{"kind", "random_ball"}};
  }
  return json{};
}

CertificateOptions parse_certificate(const json& j) {
  reject_unknown_keys(j,
                      {"delta_tol", "after", "settle_tol", "mu", "monotone_slack",
                       "layer_slack_per_step", "envelope_slack"},
                      "certificate");
  CertificateOptions c;
  auto get = [&](const char* key, double& out) {
    if (j.contains(key)) out = number(j[key], std::string("certificate.") + key);
  };
  get("delta_tol", c.delta_tol);
  if (j.contains("after") && !j["after"].is_null()) c.after = number(j["after"], "certificate.after");
  get("settle_tol", c.settle_tol);
  get("mu", c.mu);
  get("monotone_slack", c.monotone_slack);
  get("layer_slack_per_step", c.layer_slack_per_step);
  get("envelope_slack", c.envelope_slack);
  return c;
}

json dump_certificate(const CertificateOptions& c) {
  json j{{"delta_tol", c.delta_tol},
         {"settle_tol", c.settle_tol},
         {"mu", c.mu},
         {"monotone_slack", c.monotone_slack},
         {"layer_slack_per_step", c.layer_slack_per_step},
         {"envelope_slack", c.envelope_slack}};
  j["after"] = c.after ? json(*c.after) : json(nullptr);
  return j;
}

Scenario from_json(const json& j) {
  if (!j.is_object()) schema_error("scenario document must be an object");
  reject_unknown_keys(j,
                      {"name", "dimension", "beacons", "model", "law", "noise",
                       "initial_position", "initial_velocity", "dt", "horizon", "record_stride",
                       "eps_guard", "seed", "certificate"},
                      "scenario");
  Scenario s;
  s.name = require(j, "name", "scenario").get<std::string>();
  const json& dim = require(j, "dimension", "scenario");
  if (!dim.is_number_integer()) schema_error("dimension must be an integer");
  s.dimension = dim.get<int>();
  if (s.dimension != 2 && s.dimension != 3) schema_error("dimension must be 2 or 3");
  const int d = s.dimension;

  const json& b = require(j, "beacons", "scenario");
  reject_unknown_keys(b, {"positions", "weights", "motion"}, "beacons");
  const json& pos = require(b, "positions", "beacons");
  if (!pos.is_array()) schema_error("beacons.positions must be an array");
  for (std::size_t i = 0; i < pos.size(); ++i) {
    s.field.initial_positions.push_back(
        vec_from(pos[i], d, "beacons.positions[" + std::to_string(i) + "]"));
  }
  if (b.contains("weights")) {
    const json& w = b["weights"];
    if (!w.is_array()) schema_error("beacons.weights must be an array");
    for (std::size_t i = 0; i < w.size(); ++i) {
      s.field.weights.push_back(number(w[i], "beacons.weights[" + std::to_string(i) + "]"));
    }
  } else {
    s.field.weights.assign(s.field.initial_positions.size(), 1.0);
  }
  s.field.motion =
      b.contains("motion") ? parse_motion(b["motion"], d) : MotionProfile::stationary(d);

  const std::string model = j.value("model", std::string("single"));
  if (model == "single") {
    s.model = AgentModel::SingleIntegrator;
  } else if (model == "double") {
    s.model = AgentModel::DoubleIntegrator;
  } else {
    schema_error("model must be single or double");
  }

  const json& law = require(j, "law", "scenario");
  reject_unknown_keys(law, {"kind", "gains"}, "law");
  try {
    s.law.kind = law_kind_from_string(require(law, "kind", "law").get<std::string>());
  } catch (const std::invalid_argument& e) {
    schema_error(e.what());
  }
  if (law.contains("gains")) s.law.gains = parse_gains(law["gains"]);

  if (j.contains("noise")) {
    const json& n = j["noise"];
    reject_unknown_keys(n, {"angles", "axis"}, "noise");
    if (n.contains("angles")) {
      if (!n["angles"].is_array()) schema_error("noise.angles must be an array");
      for (std::size_t i = 0; i < n["angles"].size(); ++i) {
        s.noise.angles.push_back(parse_angle(n["angles"][i], i));
      }
    }
    if (n.contains("axis")) s.noise.axis = vec_from(n["axis"], 3, "noise.axis");
  }

  s.initial = parse_initial(require(j, "initial_position", "scenario"), d);
  if (j.contains("initial_velocity") && !j["initial_velocity"].is_null()) {
    s.initial_velocity = vec_from(j["initial_velocity"], d, "initial_velocity");
  }
  if (j.contains("dt")) s.dt = number(j["dt"], "dt");
  if (j.contains("horizon")) s.horizon = number(j["horizon"], "horizon");
  if (j.contains("record_stride")) {
    if (!j["record_stride"].is_number_integer()) schema_error("record_stride must be an integer");
    s.record_stride = j["record_stride"].get<int>();
  }
  if (j.contains("eps_guard")) s.eps_guard = number(j["eps_guard"], "eps_guard");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) schema_error("seed must be a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("certificate")) s.certificate = parse_certificate(j["certificate"]);
  return s;
}

json to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["dimension"] = s.dimension;
  json pos = json::array();
  for (const auto& p : s.field.initial_positions) pos.push_back(vec_to(p));
  j["beacons"] = json{{"positions", pos}, {"weights", s.field.weights},
                      {"motion", dump_motion(s.field.motion)}};
  j["model"] = std::string(to_string(s.model));
  j["law"] = json{{"kind", std::string(to_string(s.law.kind))}, {"gains", dump_gains(s.law.gains)}};
  json angles = json::array();
  for (const auto& a : s.noise.angles) angles.push_back(dump_angle(a));
  j["noise"] = json{{"angles", angles}, {"axis", vec_to(s.noise.axis)}};
  j["initial_position"] = dump_initial(s.initial);
  j["initial_velocity"] = s.initial_velocity ? vec_to(*s.initial_velocity) : json(nullptr);
  j["dt"] = s.dt;
  j["horizon"] = s.horizon;
  j["record_stride"] = s.record_stride;
  j["eps_guard"] = s.eps_guard;
  j["seed"] = s.seed;
  j["certificate"] = dump_certificate(s.certificate);
  return j;
}

}  // namespace

std::string_view to_string(ConfigError::Kind kind) {
  switch (kind) {
    case ConfigError::Kind::Parse:
      return "parse error";
    case ConfigError::Kind::Schema:
      return "schema violation";
    case ConfigError::Kind::Physics:
      return "physics violation";
    case ConfigError::Kind::Io:
      return "i/o error";
  }
  return "error";
}

void validate(const Scenario& s) {
  const int d = s.dimension;
  if (d != 2 && d != 3) schema_error("dimension must be 2 or 3");
  if (s.field.weights.size() != s.field.initial_positions.size()) {
    schema_error("beacons.weights must have one entry per beacon");
  }
  try {
    s.law.validate();
  } catch (const std::invalid_argument& e) {
    schema_error(e.what());
  }
  if (s.law.needs_double_integrator() != (s.model == AgentModel::DoubleIntegrator)) {
    schema_error("law " + std::string(to_string(s.law.kind)) + " cannot drive a " +
                 std::string(to_string(s.model)) + "-integrator agent");
  }
  if (s.initial_velocity && s.model != AgentModel::DoubleIntegrator) {
    schema_error("initial_velocity is only meaningful for the double integrator");
  }
  if (!s.noise.angles.empty() && s.noise.angles.size() != s.field.size()) {
    schema_error("noise.angles needs one entry per beacon");
  }
  if (d == 3 && !(s.noise.axis.norm() > 0.0)) schema_error("noise.axis must be non-zero");
  if (!(s.dt > 0.0)) schema_error("dt must be positive");
  if (!(s.horizon > 0.0)) schema_error("horizon must be positive");
  if (s.record_stride < 1) schema_error("record_stride must be >= 1");
  if (!(s.eps_guard > 0.0)) schema_error("eps_guard must be positive");
  if (s.initial.kind == InitialPosition::Kind::RandomBox &&
      !(s.initial.lower.array() < s.initial.upper.array()).all()) {
    schema_error("initial_position.lower must be below upper in every coordinate");
  }

  try {
    validate_field(s.field);
  } catch (const PhysicsViolation& e) {
    physics_error(e.what());
  }
  const MotionProfile& m = s.field.motion;
  if (s.law.kind == LawKind::SmcKnownBoundSI && !(s.law.gains.beta > m.eta)) {
    physics_error("smc_si needs beta > eta (beta = " + std::to_string(s.law.gains.beta) +
                  ", eta = " + std::to_string(m.eta) + ")");
  }
  if (s.law.kind == LawKind::SmcDI && !(s.law.gains.beta > m.acceleration_bound())) {
    physics_error("smc_di needs beta above the bound on |dv*/dt|_inf (" +
                  std::to_string(m.acceleration_bound()) + ")");
  }
  if (s.initial.kind == InitialPosition::Kind::Explicit &&
      min_distance(s.initial.point, s.field.snapshot(0.0)) < s.eps_guard) {
    physics_error("initial position is within eps_guard of a beacon");
  }
}

Scenario parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::Parse, e.what());
  }
  Scenario s;
  try {
    s = from_json(j);
  } catch (const json::exception& e) {
    schema_error(e.what());
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigError::Kind::Io, "cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string dump_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

SeededRng::SeededRng(std::uint64_t seed) : engine_(seed) {}

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Vec resolve_initial_position(const Scenario& s) {
  const int d = s.dimension;
  const BeaconSnapshot snap = s.field.snapshot(0.0);
  if (s.initial.kind == InitialPosition::Kind::Explicit) return s.initial.point;

  SeededRng rng(s.seed);
  Vec lower(d), upper(d), centre;
  double radius = 0.0;
  if (s.initial.kind == InitialPosition::Kind::RandomBox) {
    lower = s.initial.lower;
    upper = s.initial.upper;
  } else {
    centre = weiszfeld(snap).point;
    radius = min_distance(centre, snap) - s.eps_guard;
    if (!(radius > 0.0)) physics_error("eps_guard leaves an empty ball around the optimum");
    lower = centre.array() - radius;
    upper = centre.array() + radius;
  }
  constexpr int kMaxDraws = 1000000;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    Vec p(d);
    for (int k = 0; k < d; ++k) p[k] = rng.uniform(lower[k], upper[k]);
    if (s.initial.kind == InitialPosition::Kind::RandomBall && !((p - centre).norm() < radius)) {
      continue;
    }
    if (min_distance(p, snap) >= s.eps_guard) return p;
  }
  physics_error("could not draw a collision-free initial position");
}

SimConfig to_sim_config(const Scenario& s) {
  SimConfig c;
  c.field = s.field;
  c.model = s.model;
  c.law = s.law;
  c.noise = s.noise;
  c.p0 = resolve_initial_position(s);
  if (s.model == AgentModel::DoubleIntegrator) {
    c.v0 = s.initial_velocity ? *s.initial_velocity : Vec::Zero(s.dimension);
  }
  c.dt = s.dt;
  c.horizon = s.horizon;
  c.record_stride = s.record_stride;
  c.eps_guard = s.eps_guard;
  return c;
}

}  // namespace fwguide
