#include <fstream>
#include <sstream>

#include "hjm/cli.hpp"
#include "hjm/dynamics.hpp"

namespace hjm {

using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::ostrogradsky: return "ostrogradsky";
    case Method::schmidt2: return "schmidt2";
    case Method::schmidt3: return "schmidt3";
    case Method::schmidt2deg: return "schmidt2deg";
  }
  return "ostrogradsky";
}

Method method_from_name(const std::string& s) {
  for (Method m : {Method::ostrogradsky, Method::schmidt2, Method::schmidt3, Method::schmidt2deg})
    if (method_name(m) == s) return m;
  throw ConfigError("unknown method '" + s + "'");
}

namespace {

template <class T>
T field(const json& j, const char* key, const T& fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return field<T>(j, key, T{});
}

std::map<std::string, double> number_map(const json& j, const char* key) {
  std::map<std::string, double> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_object()) throw ConfigError(std::string("field '") + key + "' must be an object");
  for (auto& [k, v] : it->items()) {
    if (!v.is_number()) throw ConfigError(std::string("field '") + key + "." + k + "' must be a number");
    out[k] = v.get<double>();
  }
  return out;
}

}  // namespace

Symbol symbol_named(const std::string& name) {
  Expr e = parse(name);
  if (e.op() != Op::Sym) throw ConfigError("'" + name + "' is not a single symbol");
  return e.node().sym;
}

JobConfig JobConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("top level must be an object");
  JobConfig c;
  c.problem = field<std::string>(j, "problem", "");
  c.n = field<int>(j, "n", 1);
  c.k = field<int>(j, "k", 2);
  if (c.n < 1 || c.k < 1) throw ConfigError("n and k must be positive");
  c.lagrangian = required<std::string>(j, "lagrangian");
  c.method = method_from_name(field<std::string>(j, "method", "ostrogradsky"));
  if (j.contains("gauge") && !j["gauge"].is_null()) c.gauge = field<std::string>(j, "gauge", "");
  if (j.contains("W") && !j["W"].is_null()) c.W = field<std::string>(j, "W", "");
  c.gamma = field<std::vector<std::string>>(j, "gamma", {});
  if (c.W && !c.gamma.empty()) throw ConfigError("give either W or gamma, not both");
  c.params = number_map(j, "params");
  c.perturb = number_map(j, "perturb");
  c.seed = field<std::uint64_t>(j, "seed", c.seed);

  if ((c.method == Method::schmidt3 || c.method == Method::schmidt2deg) && !c.gauge)
    throw ConfigError(method_name(c.method) + " requires a gauge function over (q0, q1, a0, m0)");
  if (c.method == Method::schmidt3 && c.k != 3) throw ConfigError("schmidt3 needs k = 3");
  if ((c.method == Method::schmidt2 || c.method == Method::schmidt2deg) && c.k != 2)
    throw ConfigError(method_name(c.method) + " needs k = 2");

  if (j.contains("simulation") && !j["simulation"].is_null()) {
    const json& s = j["simulation"];
    if (!s.is_object()) throw ConfigError("field 'simulation' must be an object");
    SimulationBlock b;
    b.t0 = field<double>(s, "t0", b.t0);
    b.t1 = field<double>(s, "t1", b.t1);
    b.h = field<double>(s, "h", b.h);
    b.initial = number_map(s, "initial");
    b.lift = field<bool>(s, "lift", false);
    if (!(b.h > 0)) throw ConfigError("simulation step h must be positive");
    if (!(b.t1 > b.t0)) throw ConfigError("simulation needs t1 > t0");
    c.simulation = b;
  }
  if (j.contains("sample") && !j["sample"].is_null()) {
    const json& s = j["sample"];
    c.sample.points = field<int>(s, "points", c.sample.points);
    c.sample.lo = field<double>(s, "lo", c.sample.lo);
    c.sample.hi = field<double>(s, "hi", c.sample.hi);
    c.sample.domain = field<std::vector<std::string>>(s, "domain", {});
    if (s.contains("box"))
      for (auto& [k, v] : s["box"].items()) {
        if (!v.is_array() || v.size() != 2) throw ConfigError("box entry '" + k + "' must be [lo, hi]");
        c.sample.box[k] = {v[0].get<double>(), v[1].get<double>()};
      }
    if (c.sample.points < 1) throw ConfigError("sample.points must be positive");
  }
  if (j.contains("tolerances") && !j["tolerances"].is_null()) {
    const json& t = j["tolerances"];
    c.tolerances.hj = field<double>(t, "hj", c.tolerances.hj);
    c.tolerances.relatedness = field<double>(t, "relatedness", c.tolerances.relatedness);
    c.tolerances.drift = field<double>(t, "drift", c.tolerances.drift);
  }
  return c;
}

json JobConfig::to_json() const {
  json j;
  j["problem"] = problem;
  j["n"] = n;
  j["k"] = k;
  j["lagrangian"] = lagrangian;
  j["method"] = method_name(method);
  if (gauge) j["gauge"] = *gauge;
  if (W) j["W"] = *W;
  if (!gamma.empty()) j["gamma"] = gamma;
  if (!params.empty()) j["params"] = params;
  if (!perturb.empty()) j["perturb"] = perturb;
  if (simulation) {
    j["simulation"] = {{"t0", simulation->t0}, {"t1", simulation->t1}, {"h", simulation->h},
                       {"initial", simulation->initial}, {"lift", simulation->lift}};
  }
  json s{{"points", sample.points}, {"lo", sample.lo}, {"hi", sample.hi}};
  if (!sample.domain.empty()) s["domain"] = sample.domain;
  for (const auto& [k, v] : sample.box) s["box"][k] = {v.first, v.second};
  j["sample"] = s;
  j["tolerances"] = {{"hj", tolerances.hj}, {"relatedness", tolerances.relatedness}, {"drift", tolerances.drift}};
  j["seed"] = seed;
  return j;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return JobConfig::from_json(j);
}

Job build_job(const JobConfig& cfg) {
  Job job;
  job.config = cfg;
  job.L = LagrangianSpec::make(cfg.n, cfg.k, parse(cfg.lagrangian));
  for (const auto& [k, v] : cfg.params) job.params[Symbol::param(k)] = v;
  if (cfg.gauge) job.gauge = to_acceleration_chart(parse(*cfg.gauge), cfg.n);
  switch (cfg.method) {
    case Method::ostrogradsky: {
      job.family = ostro_energy(job.L);
      job.equations = "ostrogradsky-hj";
      try {
        job.hamiltonian = explicit_hamiltonian(job.L);
      } catch (const NotSolvableError&) {
      } catch (const DegeneracyError&) {
      }
      break;
    }
    case Method::schmidt2: {
      if (!job.gauge) job.gauge = solve_F_quadratic(job.L);
      auto s = schmidt_second(job.L, *job.gauge);
      job.family = s.energy;
      job.hamiltonian = s.hamiltonian;
      job.equations = "schmidt-hj";
      break;
    }
    case Method::schmidt3: {
      auto s = third_order_extend(job.L, *job.gauge);
      job.family = s.energy;
      job.equations = "schmidt-third-order-hj";
      break;
    }
    case Method::schmidt2deg: {
      auto s = degenerate_second_extend(job.L, *job.gauge);
      job.family = s.energy;
      job.equations = "schmidt-degenerate-hj";
      break;
    }
  }
  return job;
}

Expr job_expr(const Job& job, const std::string& text) {
  Expr e = parse(text);
  return job.config.method == Method::ostrogradsky ? e : to_acceleration_chart(e, job.config.n);
}

std::optional<ClosedOneForm> job_gamma(const Job& job, const std::map<std::string, double>& overrides) {
  std::map<Symbol, Expr> subs;
  for (const auto& [k, v] : overrides) subs[Symbol::param(k)] = Expr::real(v);
  auto prep = [&](const std::string& s) { return substitute(job_expr(job, s), subs); };
  const ChartSpec& base = job.family.base;
  if (job.config.W) return ClosedOneForm::from_potential(base, prep(*job.config.W));
  if (job.config.gamma.empty()) return std::nullopt;
  std::vector<Expr> comps;
  for (const auto& g : job.config.gamma) comps.push_back(prep(g));
  return ClosedOneForm::from_components(base, std::move(comps), job.config.seed);
}

SampleOptions job_sampling(const Job& job) {
  SampleOptions o;
  o.points = job.config.sample.points;
  o.lo = job.config.sample.lo;
  o.hi = job.config.sample.hi;
  for (const auto& [k, v] : job.config.sample.box) o.box[symbol_named(k)] = v;
  for (const auto& d : job.config.sample.domain) o.domain.push_back(job_expr(job, d));
  o.fixed = job.params;
  o.seed = job.config.seed;
  o.tol = job.config.tolerances.hj;
  return o;
}

}  // namespace hjm
