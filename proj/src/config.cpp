#include "spde1d/config.hpp"

#include <cmath>
#include <fstream>

namespace spde1d {

GridFunction build_initial(const InitSpec& spec, BC bc, int n, std::uint64_t seed) {
  if (spec.kind == "zero") return GridFunction::zeros(bc, n);
  if (spec.kind == "constant") return GridFunction::constant(bc, n, spec.value);
  if (spec.kind == "ramp")
    return GridFunction::sample(bc, n, [](double x) { return x; });
  if (spec.kind == "sine") {
    if (spec.terms.empty()) throw ConfigError("init: sine needs at least one term");
    const double freq_base = bc == BC::Periodic ? 2.0 * M_PI : M_PI;
    return GridFunction::sample(bc, n, [&](double x) {
      double s = 0.0;
      for (const auto& t : spec.terms) s += t.amplitude * std::sin(freq_base * t.k * x);
      return s;
    });
  }
  if (spec.kind == "rademacher") {
    GridFunction v = GridFunction::zeros(bc, n);
    for (int i = 0; i < n; ++i) {
      const std::uint64_t key = mix64(mix64(seed ^ spec.salt) + static_cast<std::uint64_t>(i));
      v.values[i] = (key & 1u) ? 1.0 : -1.0;
    }
    return v;
  }
  throw ConfigError("init: unknown kind '" + spec.kind + "'");
}

namespace {

json flux_to_json(const FluxModel& m) {
  return json{{"kind", m.name},
              {"coef", m.coef},
              {"eps_reg", m.eps_reg},
              {"p", m.p},
              {"growth_c", m.growth_c},
              {"growth_C", m.growth_C}};
}

FluxModel flux_from_json(const json& j) {
  FluxModel m = FluxModel::from_name(j.value("kind", std::string("mean_curvature")));
  m.coef = j.value("coef", m.coef);
  m.eps_reg = j.value("eps_reg", m.eps_reg);
  m.p = j.value("p", m.p);
  m.growth_c = j.value("growth_c", m.growth_c);
  m.growth_C = j.value("growth_C", m.growth_C);
  return m;
}

json profile_to_json(const Profile& p) {
  switch (p.kind) {
    case Profile::Kind::Sine:
      return json{{"kind", "sine"}, {"k", p.k}};
    case Profile::Kind::Polynomial:
      return json{{"kind", "polynomial"}, {"coeffs", p.coeffs}};
    case Profile::Kind::Bump:
      return json{{"kind", "bump"}, {"center", p.center}, {"width", p.width}};
  }
  throw ConfigError("profile: unknown kind");
}

Profile profile_from_json(const json& j) {
  const std::string kind = j.value("kind", std::string("sine"));
  if (kind == "sine") return Profile::sine(j.value("k", 1));
  if (kind == "polynomial")
    return Profile::polynomial(j.value("coeffs", std::vector<double>{}));
  if (kind == "bump") return Profile::bump(j.value("center", 0.5), j.value("width", 0.25));
  throw ConfigError("profile: unknown kind '" + kind + "'");
}

json noise_to_json(const VerticalNoiseSpec& s) {
  json modes = json::array();
  for (const auto& m : s.modes) {
    modes.push_back(json{{"form", m.form == ModeForm::Additive ? "additive" : "multiplicative"},
                         {"profile", profile_to_json(m.profile)},
                         {"amplitude", m.amplitude}});
  }
  json env;
  switch (s.envelope.type) {
    case EnvelopeType::None:
      env = json{{"type", "none"}};
      break;
    case EnvelopeType::Geometric:
      env = json{{"type", "geometric"}, {"parameter", s.envelope.parameter},
                 {"scale", s.envelope.scale}};
      break;
    case EnvelopeType::Power:
      env = json{{"type", "power"}, {"parameter", s.envelope.parameter},
                 {"scale", s.envelope.scale}};
      break;
  }
  return json{{"modes", modes}, {"envelope", env}};
}

VerticalNoiseSpec noise_from_json(const json& j) {
  VerticalNoiseSpec s;
  for (const auto& jm : j.value("modes", json::array())) {
    ModeSpec m;
    const std::string form = jm.value("form", std::string("multiplicative"));
    if (form == "additive")
      m.form = ModeForm::Additive;
    else if (form == "multiplicative")
      m.form = ModeForm::Multiplicative;
    else
      throw ConfigError("noise: unknown mode form '" + form + "'");
    if (jm.contains("profile")) m.profile = profile_from_json(jm.at("profile"));
    m.amplitude = jm.value("amplitude", 1.0);
    s.modes.push_back(m);
  }
  if (j.contains("envelope")) {
    const json& je = j.at("envelope");
    const std::string type = je.value("type", std::string("none"));
    if (type == "none")
      s.envelope.type = EnvelopeType::None;
    else if (type == "geometric")
      s.envelope.type = EnvelopeType::Geometric;
    else if (type == "power")
      s.envelope.type = EnvelopeType::Power;
    else
      throw ConfigError("noise: unknown envelope type '" + type + "'");
    s.envelope.parameter = je.value("parameter", 0.0);
    s.envelope.scale = je.value("scale", 1.0);
  }
  return s;
}

json init_to_json(const InitSpec& s) {
  json terms = json::array();
  for (const auto& t : s.terms) terms.push_back(json{{"k", t.k}, {"amplitude", t.amplitude}});
  return json{{"kind", s.kind}, {"value", s.value}, {"terms", terms}, {"salt", s.salt}};
}

InitSpec init_from_json(const json& j) {
  InitSpec s;
  s.kind = j.value("kind", std::string("zero"));
  s.value = j.value("value", 0.0);
  for (const auto& jt : j.value("terms", json::array())) {
    SineTerm t;
    t.k = jt.value("k", 1);
    t.amplitude = jt.value("amplitude", 1.0);
    s.terms.push_back(t);
  }
  s.salt = j.value("salt", std::uint64_t{1});
  return s;
}

}  // namespace

json ExperimentConfig::to_json() const {
  json jp{{"n", sim.n}, {"epsilon", sim.epsilon}};
  if (sim.problem == ProblemKind::DirichletVertical) {
    jp["type"] = "dirichlet_vertical";
    jp["flux"] = flux_to_json(sim.flux);
    jp["noise"] = noise_to_json(sim.vertical);
  } else {
    jp["type"] = "periodic_normal";
    jp["alpha"] = sim.normal.alpha;
  }
  const char* scheme_name = sim.scheme == Scheme::SemiImplicit ? "semi_implicit"
                            : sim.scheme == Scheme::Implicit   ? "implicit"
                                                               : "explicit";
  json jr{{"dt", sim.dt},
          {"T", sim.T},
          {"scheme", scheme_name},
          {"record_stride", sim.record_stride}};
  json je{{"statistic", est.statistic},
          {"M", est.M},
          {"x0", init_to_json(est.x0)},
          {"t_list", est.t_list},
          {"j_list", est.j_list},
          {"tau", est.tau},
          {"t", est.t},
          {"jump_weight", est.jump_weight},
          {"relax_tol", est.relax_tol},
          {"relax_n", est.relax_n},
          {"u_spec", est.u_spec},
          {"parallel", est.parallel}};
  json pairs = json::array();
  for (const auto& [a, b] : est.eps_pairs) pairs.push_back(json::array({a, b}));
  je["eps_pairs"] = pairs;
  if (est.y0) je["y0"] = init_to_json(*est.y0);
  je["z_spec"] = json{{"z0", est.z_spec.z0},
                      {"g", est.z_spec.g == ZSpec::GKind::Zero ? "zero" : "laplacian"},
                      {"literal_zdw", est.z_spec.literal_zdw}};
  if (est.reference) je["reference"] = *est.reference;
  return json{{"schema_version", 1}, {"seed", seed},       {"output", output},
              {"problem", jp},       {"run", jr},          {"estimator", je}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  try {
    ExperimentConfig c;
    if (j.value("schema_version", 1) != 1) throw ConfigError("config: unknown schema version");
    c.seed = j.value("seed", std::uint64_t{0});
    c.output = j.value("output", std::string("out"));

    const json& jp = j.at("problem");
    const std::string type = jp.value("type", std::string("periodic_normal"));
    const int n = jp.value("n", 128);
    const double eps = jp.value("epsilon", 0.0);
    const json jr = j.value("run", json::object());
    const double dt = jr.value("dt", 1e-4);
    const double T = jr.value("T", 0.1);

    if (type == "dirichlet_vertical") {
      c.sim = SimConfig::dirichlet_vertical(
          jp.contains("flux") ? flux_from_json(jp.at("flux")) : FluxModel::mean_curvature(),
          jp.contains("noise") ? noise_from_json(jp.at("noise")) : VerticalNoiseSpec{}, n,
          eps, dt, T);
    } else if (type == "periodic_normal") {
      c.sim = SimConfig::periodic_normal(jp.value("alpha", 1.0), n, eps, dt, T);
    } else {
      throw ConfigError("config: unknown problem type '" + type + "'");
    }
    const std::string scheme = jr.value("scheme", std::string("semi_implicit"));
    if (scheme == "semi_implicit")
      c.sim.scheme = Scheme::SemiImplicit;
    else if (scheme == "implicit")
      c.sim.scheme = Scheme::Implicit;
    else if (scheme == "explicit")
      c.sim.scheme = Scheme::Explicit;
    else
      throw ConfigError("config: unknown scheme '" + scheme + "'");
    c.sim.record_stride = jr.value("record_stride", 1);

    const json je = j.value("estimator", json::object());
    c.est.statistic = je.value("statistic", std::string("l2_sq_final"));
    c.est.M = je.value("M", 100);
    if (je.contains("x0")) c.est.x0 = init_from_json(je.at("x0"));
    if (je.contains("y0")) c.est.y0 = init_from_json(je.at("y0"));
    c.est.t_list = je.value("t_list", std::vector<double>{});
    for (const auto& jp2 : je.value("eps_pairs", json::array())) {
      if (!jp2.is_array() || jp2.size() != 2)
        throw ConfigError("config: eps_pairs entries must be [eps1, eps2]");
      c.est.eps_pairs.emplace_back(jp2[0].get<double>(), jp2[1].get<double>());
    }
    c.est.j_list = je.value("j_list", std::vector<int>{});
    c.est.tau = je.value("tau", 0.0);
    c.est.t = je.value("t", 0.0);
    if (je.contains("z_spec")) {
      const json& jz = je.at("z_spec");
      c.est.z_spec.z0 = jz.value("z0", 0.0);
      const std::string g = jz.value("g", std::string("zero"));
      if (g == "zero")
        c.est.z_spec.g = ZSpec::GKind::Zero;
      else if (g == "laplacian")
        c.est.z_spec.g = ZSpec::GKind::Laplacian;
      else
        throw ConfigError("config: unknown z_spec.g '" + g + "'");
      c.est.z_spec.literal_zdw = jz.value("literal_zdw", false);
    }
    c.est.jump_weight = je.value("jump_weight", 1.0);
    c.est.relax_tol = je.value("relax_tol", 0.01);
    c.est.relax_n = je.value("relax_n", 4096);
    c.est.u_spec = je.value("u_spec", std::string("ramp"));
    if (je.contains("reference")) c.est.reference = je.at("reference").get<std::string>();
    c.est.parallel = je.value("parallel", true);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::load(const std::string& path,
                                        const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse failure: ") + e.what());
  }
  for (const auto& ov : overrides) apply_override(j, ov);
  return from_json(j);
}

GridFunction ExperimentConfig::make_x0() const {
  return build_initial(est.x0, sim.bc, sim.n, seed);
}

GridFunction ExperimentConfig::make_y0() const {
  if (!est.y0) throw ConfigError("config: estimator.y0 is required here");
  return build_initial(*est.y0, sim.bc, sim.n, seed);
}

std::uint64_t ExperimentConfig::config_hash() const {
  const std::string dump = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like dotted.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json* node = &j;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError("override has an empty path segment: " + assignment);
    if (dot == std::string::npos) {
      json value;
      try {
        value = json::parse(raw);
      } catch (const json::exception&) {
        value = raw;  // bare strings are allowed
      }
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::function<double(double)> make_u_spec(const std::string& name) {
  if (name == "ramp") return [](double x) { return x; };
  if (name == "sine") return [](double x) { return std::sin(2.0 * M_PI * x); };
  if (name == "step")
    return [](double x) { return x < 0.5 ? 0.0 : 1.0; };
  throw ConfigError("config: unknown u_spec '" + name + "'");
}

}  // namespace spde1d
