#pragma once

// Strict JSON experiment configs.
//
// Everything an experiment consumes is described by closed, serializable
// value types: an operator spec (named kinds + parameters, not code), a
// domain spec, trigonometric data, cell-grid parameters, sweep parameters,
// tolerance overrides, and a seed.  Parsing is strict: unknown fields are
// rejected with the full path of the offending key, and each spec kind
// accepts exactly its own parameter set.  Serialization is canonical (sorted
// keys, all applicable fields explicit), so parse -> dump is idempotent:
// dumping a parsed config and re-parsing it reproduces the same bytes.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "homog/bdata.hpp"
#include "homog/cell.hpp"
#include "homog/common.hpp"
#include "homog/domains.hpp"
#include "homog/matrix.hpp"
#include "homog/operators.hpp"
#include "homog/sweep.hpp"

namespace homog {

using json = nlohmann::json;

namespace config_detail {

// Wrapper enforcing "every field read once, nothing left over".
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& require(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError(path_ + ": missing required field '" + key + "'");
    seen_.insert(key);
    return *it;
  }
  const json* optional(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  double number(const std::string& key) { return as_number(require(key), key); }
  double number_or(const std::string& key, double dflt) {
    const json* v = optional(key);
    return v ? as_number(*v, key) : dflt;
  }
  long long integer(const std::string& key) { return as_integer(require(key), key); }
  long long integer_or(const std::string& key, long long dflt) {
    const json* v = optional(key);
    return v ? as_integer(*v, key) : dflt;
  }
  bool boolean_or(const std::string& key, bool dflt) {
    const json* v = optional(key);
    if (!v) return dflt;
    if (!v->is_boolean()) throw ConfigError(path_ + "." + key + ": expected a boolean");
    return v->get<bool>();
  }
  std::string text(const std::string& key) { return as_text(require(key), key); }
  std::string text_or(const std::string& key, const std::string& dflt) {
    const json* v = optional(key);
    return v ? as_text(*v, key) : dflt;
  }
  std::vector<double> numbers(const std::string& key) {
    return as_numbers(require(key), key);
  }
  std::vector<double> numbers_or(const std::string& key, std::vector<double> dflt) {
    const json* v = optional(key);
    return v ? as_numbers(*v, key) : std::move(dflt);
  }

  // Call last: every key of the object must have been consumed.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError(path_ + ": unknown field '" + it.key() + "'");
  }

 private:
  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ConfigError(path_ + "." + key + ": expected a number");
    return v.get<double>();
  }
  long long as_integer(const json& v, const std::string& key) const {
    if (!v.is_number_integer()) throw ConfigError(path_ + "." + key + ": expected an integer");
    return v.get<long long>();
  }
  std::string as_text(const json& v, const std::string& key) const {
    if (!v.is_string()) throw ConfigError(path_ + "." + key + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> as_numbers(const json& v, const std::string& key) const {
    if (!v.is_array()) throw ConfigError(path_ + "." + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(path_ + "." + key + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Vec vec_from(const std::vector<double>& v, const std::string& path) {
  if (v.size() == 1) return Vec::d1(v[0]);
  if (v.size() == 2) return Vec::d2(v[0], v[1]);
  throw ConfigError(path + ": expected 1 or 2 components");
}
inline json vec_to(const Vec& v) {
  json a = json::array();
  a.push_back(v.x);
  if (v.dim == 2) a.push_back(v.y);
  return a;
}

inline SymMatrix sym_from(const std::vector<double>& v, const std::string& path) {
  if (v.size() == 1) return SymMatrix::d1(v[0]);
  if (v.size() == 3) return SymMatrix(2, v[0], v[1], v[2]);
  throw ConfigError(path + ": expected [xx] or [xx, xy, yy]");
}
inline json sym_to(const SymMatrix& m) {
  json a = json::array();
  a.push_back(m.xx());
  if (m.dim() == 2) {
    a.push_back(m.xy());
    a.push_back(m.yy());
  }
  return a;
}

}  // namespace config_detail

// ---------------------------------------------------------------------------
// Trigonometric data <-> JSON.
//   {"constant": c, "terms": [{"amp": a, "factors":
//       [{"trig": "sin"|"cos", "kx": ., "ky": ., "ks": ., "phase": .}]}]}
// ---------------------------------------------------------------------------

inline TrigPoly trig_from_json(const json& j, const std::string& path) {
  using config_detail::StrictObject;
  StrictObject o(j, path);
  TrigPoly p;
  p.constant = o.number_or("constant", 0.0);
  if (const json* terms = o.optional("terms")) {
    if (!terms->is_array()) throw ConfigError(path + ".terms: expected an array");
    for (std::size_t ti = 0; ti < terms->size(); ++ti) {
      const std::string tpath = path + ".terms[" + std::to_string(ti) + "]";
      StrictObject to((*terms)[ti], tpath);
      TrigTerm term;
      term.amp = to.number_or("amp", 1.0);
      const json& factors = to.require("factors");
      if (!factors.is_array()) throw ConfigError(tpath + ".factors: expected an array");
      for (std::size_t fi = 0; fi < factors.size(); ++fi) {
        const std::string fpath = tpath + ".factors[" + std::to_string(fi) + "]";
        StrictObject fo(factors[fi], fpath);
        TrigFactor f;
        const std::string trig = fo.text("trig");
        if (trig == "sin") f.is_sin = true;
        else if (trig == "cos") f.is_sin = false;
        else throw ConfigError(fpath + ".trig: expected \"sin\" or \"cos\"");
        f.kx = fo.number_or("kx", 0.0);
        f.ky = fo.number_or("ky", 0.0);
        f.ks = fo.number_or("ks", 0.0);
        f.phase = fo.number_or("phase", 0.0);
        fo.finish();
        term.factors.push_back(f);
      }
      if (term.factors.empty())
        throw ConfigError(tpath + ".factors: a term needs at least one factor");
      to.finish();
      p.terms.push_back(std::move(term));
    }
  }
  o.finish();
  return p;
}

inline json trig_to_json(const TrigPoly& p) {
  json j;
  j["constant"] = p.constant;
  json terms = json::array();
  for (const auto& t : p.terms) {
    json jt;
    jt["amp"] = t.amp;
    json factors = json::array();
    for (const auto& f : t.factors) {
      json jf;
      jf["trig"] = f.is_sin ? "sin" : "cos";
      jf["kx"] = f.kx;
      jf["ky"] = f.ky;
      jf["ks"] = f.ks;
      jf["phase"] = f.phase;
      factors.push_back(std::move(jf));
    }
    jt["factors"] = std::move(factors);
    terms.push_back(std::move(jt));
  }
  j["terms"] = std::move(terms);
  return j;
}

// ---------------------------------------------------------------------------
// Operator spec: a named kind plus exactly its own parameters.
// ---------------------------------------------------------------------------

struct MemberSpec {
  SymMatrix A{SymMatrix::identity(2)};
  TrigPoly scale = constant_data(1.0);
  TrigPoly source = constant_data(0.0);
};

struct OperatorSpec {
  std::string kind;  // pucci_plus | pucci_minus | max_trace | heat |
                     // linear_trace | bellman_max | bellman_min | cone_sup
  int dim{2};
  double lambda{1.0};
  double Lambda{1.0};
  SymMatrix A{SymMatrix::identity(2)};  // linear_trace
  TrigPoly scale = constant_data(1.0);  // linear_trace
  TrigPoly source = constant_data(0.0); // linear_trace
  std::vector<MemberSpec> members;      // bellman kinds
  double delta{0.05};                   // cone_sup
  int K{9};                             // cone_sup
  double axis_angle{0.0};               // cone_sup

  EllipticOperator build() const {
    if (kind == "pucci_plus") return EllipticOperator::pucci_plus(dim, lambda, Lambda);
    if (kind == "pucci_minus") return EllipticOperator::pucci_minus(dim, lambda, Lambda);
    if (kind == "max_trace") return EllipticOperator::max_trace_operator(dim, Lambda);
    if (kind == "heat") return EllipticOperator::heat(dim);
    if (kind == "linear_trace") return EllipticOperator::linear_trace(A, scale, source);
    if (kind == "bellman_max" || kind == "bellman_min") {
      std::vector<OperatorMember> ms;
      for (const auto& m : members) ms.push_back(OperatorMember{m.A, m.scale, m.source});
      return EllipticOperator::bellman(
          kind == "bellman_max" ? OpKind::bellman_max : OpKind::bellman_min, dim, std::move(ms),
          kind);
    }
    if (kind == "cone_sup") return EllipticOperator::cone_sup_operator(delta, K, axis_angle);
    throw ConfigError("operator.kind: unknown kind '" + kind + "'");
  }
};

inline OperatorSpec operator_from_json(const json& j, const std::string& path) {
  using config_detail::StrictObject;
  using config_detail::sym_from;
  StrictObject o(j, path);
  OperatorSpec spec;
  spec.kind = o.text("kind");
  if (spec.kind == "pucci_plus" || spec.kind == "pucci_minus") {
    spec.dim = int(o.integer("dim"));
    spec.lambda = o.number("lambda");
    spec.Lambda = o.number("Lambda");
  } else if (spec.kind == "max_trace") {
    spec.dim = int(o.integer("dim"));
    spec.Lambda = o.number("Lambda");
  } else if (spec.kind == "heat") {
    spec.dim = int(o.integer("dim"));
  } else if (spec.kind == "linear_trace") {
    spec.A = sym_from(o.numbers("A"), path + ".A");
    spec.dim = spec.A.dim();
    if (const json* s = o.optional("scale")) spec.scale = trig_from_json(*s, path + ".scale");
    if (const json* s = o.optional("source")) spec.source = trig_from_json(*s, path + ".source");
  } else if (spec.kind == "bellman_max" || spec.kind == "bellman_min") {
    spec.dim = int(o.integer("dim"));
    const json& members = o.require("members");
    if (!members.is_array() || members.empty())
      throw ConfigError(path + ".members: expected a nonempty array");
    for (std::size_t mi = 0; mi < members.size(); ++mi) {
      const std::string mpath = path + ".members[" + std::to_string(mi) + "]";
      StrictObject mo(members[mi], mpath);
      MemberSpec m;
      m.A = sym_from(mo.numbers("A"), mpath + ".A");
      if (const json* s = mo.optional("scale")) m.scale = trig_from_json(*s, mpath + ".scale");
      if (const json* s = mo.optional("source")) m.source = trig_from_json(*s, mpath + ".source");
      mo.finish();
      spec.members.push_back(std::move(m));
    }
  } else if (spec.kind == "cone_sup") {
    spec.dim = 2;
    spec.delta = o.number("delta");
    spec.K = int(o.integer("K"));
    spec.axis_angle = o.number_or("axis_angle", 0.0);
  } else {
    throw ConfigError(path + ".kind: unknown kind '" + spec.kind + "'");
  }
  o.finish();
  spec.build();  // surface parameter errors at parse time with this path
  return spec;
}

inline json operator_to_json(const OperatorSpec& spec) {
  using config_detail::sym_to;
  json j;
  j["kind"] = spec.kind;
  if (spec.kind == "pucci_plus" || spec.kind == "pucci_minus") {
    j["dim"] = spec.dim;
    j["lambda"] = spec.lambda;
    j["Lambda"] = spec.Lambda;
  } else if (spec.kind == "max_trace") {
    j["dim"] = spec.dim;
    j["Lambda"] = spec.Lambda;
  } else if (spec.kind == "heat") {
    j["dim"] = spec.dim;
  } else if (spec.kind == "linear_trace") {
    j["A"] = sym_to(spec.A);
    j["scale"] = trig_to_json(spec.scale);
    j["source"] = trig_to_json(spec.source);
  } else if (spec.kind == "bellman_max" || spec.kind == "bellman_min") {
    j["dim"] = spec.dim;
    json members = json::array();
    for (const auto& m : spec.members) {
      json jm;
      jm["A"] = sym_to(m.A);
      jm["scale"] = trig_to_json(m.scale);
      jm["source"] = trig_to_json(m.source);
      members.push_back(std::move(jm));
    }
    j["members"] = std::move(members);
  } else if (spec.kind == "cone_sup") {
    j["delta"] = spec.delta;
    j["K"] = spec.K;
    j["axis_angle"] = spec.axis_angle;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Domain spec.
// ---------------------------------------------------------------------------

struct DomainSpec {
  std::string kind{"flat"};  // flat | stationary | rotating
  int dim{1};
  Vec nu = Vec::d1(1.0);
  double offset{0.0};
  double speed{0.0};
  double span{1.0};

  MovingDomain build() const {
    if (kind == "rotating") return MovingDomain::rotating();
    const Direction d = make_direction(nu);
    if (kind == "flat") return MovingDomain::flat(dim, d, offset, speed, span);
    if (kind == "stationary") return MovingDomain::stationary(dim, d, offset, span);
    throw ConfigError("domain.kind: unknown kind '" + kind + "'");
  }
};

inline DomainSpec domain_from_json(const json& j, const std::string& path) {
  using config_detail::StrictObject;
  using config_detail::vec_from;
  StrictObject o(j, path);
  DomainSpec spec;
  spec.kind = o.text("kind");
  if (spec.kind == "rotating") {
    spec.dim = 2;
  } else if (spec.kind == "flat" || spec.kind == "stationary") {
    spec.nu = vec_from(o.numbers("nu"), path + ".nu");
    spec.dim = spec.nu.dim;
    spec.offset = o.number_or("offset", 0.0);
    spec.span = o.number_or("span", 1.0);
    if (spec.kind == "flat") spec.speed = o.number_or("speed", 0.0);
  } else {
    throw ConfigError(path + ".kind: unknown kind '" + spec.kind + "'");
  }
  o.finish();
  spec.build();
  return spec;
}

inline json domain_to_json(const DomainSpec& spec) {
  using config_detail::vec_to;
  json j;
  j["kind"] = spec.kind;
  if (spec.kind != "rotating") {
    j["nu"] = vec_to(spec.nu);
    j["offset"] = spec.offset;
    j["span"] = spec.span;
    if (spec.kind == "flat") j["speed"] = spec.speed;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Cell-grid parameters ("grid" section) <-> CellConfig.
// ---------------------------------------------------------------------------

inline CellConfig grid_from_json(const json& j, const std::string& path) {
  using config_detail::StrictObject;
  using config_detail::vec_from;
  StrictObject o(j, path);
  CellConfig cfg;
  cfg.h_target = o.number_or("h", cfg.h_target);
  cfg.probe_depths = o.numbers_or("probe_depths", cfg.probe_depths);
  cfg.depth_L = o.number_or("depth", cfg.depth_L);
  cfg.relax_time = o.number_or("relax_time", cfg.relax_time);
  cfg.window = o.number_or("window", cfg.window);
  cfg.stop_tol = o.number_or("stop_tol", cfg.stop_tol);
  cfg.min_time = o.number_or("min_time", cfg.min_time);
  cfg.cf_order = int(o.integer_or("cf_order", cfg.cf_order));
  cfg.s_samples = int(o.integer_or("s_samples", cfg.s_samples));
  if (const json* z = o.optional("shift_z")) {
    if (!z->is_array()) throw ConfigError(path + ".shift_z: expected an array of numbers");
    std::vector<double> v;
    for (const auto& e : *z) {
      if (!e.is_number()) throw ConfigError(path + ".shift_z: expected an array of numbers");
      v.push_back(e.get<double>());
    }
    cfg.z = vec_from(v, path + ".shift_z");
  }
  cfg.tau = o.number_or("shift_tau", cfg.tau);
  cfg.use_aitken = o.boolean_or("use_aitken", cfg.use_aitken);
  cfg.y_period = o.number_or("y_period", cfg.y_period);
  cfg.s_period = o.number_or("s_period", cfg.s_period);
  cfg.cfl_safety = o.number_or("cfl_safety", cfg.cfl_safety);
  cfg.interp_tol = o.number_or("interp_tol", cfg.interp_tol);
  cfg.time_probes = o.numbers_or("time_probes", cfg.time_probes);
  o.finish();
  return cfg;
}

inline json grid_to_json(const CellConfig& cfg) {
  using config_detail::vec_to;
  json j;
  j["h"] = cfg.h_target;
  j["probe_depths"] = cfg.probe_depths;
  j["depth"] = cfg.depth_L;
  j["relax_time"] = cfg.relax_time;
  j["window"] = cfg.window;
  j["stop_tol"] = cfg.stop_tol;
  j["min_time"] = cfg.min_time;
  j["cf_order"] = cfg.cf_order;
  j["s_samples"] = cfg.s_samples;
  j["shift_z"] = vec_to(cfg.z);
  j["shift_tau"] = cfg.tau;
  j["use_aitken"] = cfg.use_aitken;
  j["y_period"] = cfg.y_period;
  j["s_period"] = cfg.s_period;
  j["cfl_safety"] = cfg.cfl_safety;
  j["interp_tol"] = cfg.interp_tol;
  j["time_probes"] = cfg.time_probes;
  return j;
}

// ---------------------------------------------------------------------------
// Sweep parameters ("sweep" section).
// ---------------------------------------------------------------------------

struct SweepSettings {
  std::vector<double> eps_ladder;  // empty => dimension default
  std::vector<ProbeSpec> probes;
  int phase_samples{4};
  double phase_period{1.0};
  double lateral_period{1.0};
  double collar_width_factor{4.0};
  double cfl_safety{0.9};
  SweepBudget budget;
};

inline SweepSettings sweep_from_json(const json& j, const std::string& path) {
  using config_detail::StrictObject;
  using config_detail::vec_from;
  StrictObject o(j, path);
  SweepSettings s;
  s.eps_ladder = o.numbers_or("eps_ladder", {});
  if (const json* probes = o.optional("probes")) {
    if (!probes->is_array()) throw ConfigError(path + ".probes: expected an array");
    for (std::size_t pi = 0; pi < probes->size(); ++pi) {
      const std::string ppath = path + ".probes[" + std::to_string(pi) + "]";
      StrictObject po((*probes)[pi], ppath);
      ProbeSpec p;
      p.id = po.text("id");
      p.x0 = vec_from(po.numbers("x"), ppath + ".x");
      p.t0 = po.number_or("t0", 0.0);
      p.R = po.number_or("R", 1.0);
      const std::string sc = po.text("scaling");
      if (sc == "eps_R") p.scaling = DepthScaling::eps_R;
      else if (sc == "sqrt_eps_R") p.scaling = DepthScaling::sqrt_eps_R;
      else if (sc == "bottom") p.scaling = DepthScaling::bottom;
      else throw ConfigError(ppath + ".scaling: expected eps_R, sqrt_eps_R, or bottom");
      if (const json* r = po.optional("reference")) {
        if (!r->is_number()) throw ConfigError(ppath + ".reference: expected a number");
        p.reference = r->get<double>();
      }
      po.finish();
      s.probes.push_back(std::move(p));
    }
  }
  s.phase_samples = int(o.integer_or("phase_samples", s.phase_samples));
  s.phase_period = o.number_or("phase_period", s.phase_period);
  s.lateral_period = o.number_or("lateral_period", s.lateral_period);
  s.collar_width_factor = o.number_or("collar_width_factor", s.collar_width_factor);
  s.cfl_safety = o.number_or("cfl_safety", s.cfl_safety);
  s.budget.max_node_steps = o.number_or("budget_node_steps", s.budget.max_node_steps);
  s.budget.max_nodes = o.integer_or("budget_nodes", s.budget.max_nodes);
  o.finish();
  return s;
}

inline json sweep_to_json(const SweepSettings& s) {
  using config_detail::vec_to;
  json j;
  j["eps_ladder"] = s.eps_ladder;
  json probes = json::array();
  for (const auto& p : s.probes) {
    json jp;
    jp["id"] = p.id;
    jp["x"] = vec_to(p.x0);
    jp["t0"] = p.t0;
    jp["R"] = p.R;
    jp["scaling"] = to_string(p.scaling);
    if (p.reference) jp["reference"] = *p.reference;
    probes.push_back(std::move(jp));
  }
  j["probes"] = std::move(probes);
  j["phase_samples"] = s.phase_samples;
  j["phase_period"] = s.phase_period;
  j["lateral_period"] = s.lateral_period;
  j["collar_width_factor"] = s.collar_width_factor;
  j["cfl_safety"] = s.cfl_safety;
  j["budget_node_steps"] = s.budget.max_node_steps;
  j["budget_nodes"] = s.budget.max_nodes;
  return j;
}

// ---------------------------------------------------------------------------
// Top-level experiment config.
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::string experiment;  // registry id (required)
  std::string name;        // defaults to the experiment id
  std::uint64_t seed{0};
  std::optional<OperatorSpec> op;
  std::optional<DomainSpec> domain;
  std::optional<TrigPoly> data;
  std::optional<CellConfig> grid;
  std::optional<SweepSettings> sweep;
  std::map<std::string, double> tolerances;

  // Section accessors with experiment-supplied defaults.
  EllipticOperator op_or(const EllipticOperator& dflt) const {
    return op ? op->build() : dflt;
  }
  MovingDomain domain_or(const MovingDomain& dflt) const {
    return domain ? domain->build() : dflt;
  }
  TrigPoly data_or(const TrigPoly& dflt) const { return data ? *data : dflt; }
  CellConfig grid_or(const CellConfig& dflt) const { return grid ? *grid : dflt; }
  SweepSettings sweep_or(const SweepSettings& dflt) const { return sweep ? *sweep : dflt; }
  double tol_or(const std::string& key, double dflt) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? dflt : it->second;
  }
};

inline ExperimentConfig config_from_json(const json& j, const std::string& path = "config") {
  using config_detail::StrictObject;
  StrictObject o(j, path);
  ExperimentConfig cfg;
  cfg.experiment = o.text("experiment");
  cfg.name = o.text_or("name", cfg.experiment);
  const long long seed = o.integer_or("seed", 0);
  if (seed < 0) throw ConfigError(path + ".seed: expected a nonnegative integer");
  cfg.seed = std::uint64_t(seed);
  if (const json* v = o.optional("operator")) cfg.op = operator_from_json(*v, path + ".operator");
  if (const json* v = o.optional("domain")) cfg.domain = domain_from_json(*v, path + ".domain");
  if (const json* v = o.optional("data")) cfg.data = trig_from_json(*v, path + ".data");
  if (const json* v = o.optional("grid")) cfg.grid = grid_from_json(*v, path + ".grid");
  if (const json* v = o.optional("sweep")) cfg.sweep = sweep_from_json(*v, path + ".sweep");
  if (const json* v = o.optional("tolerances")) {
    if (!v->is_object()) throw ConfigError(path + ".tolerances: expected an object");
    for (auto it = v->begin(); it != v->end(); ++it) {
      if (!it.value().is_number())
        throw ConfigError(path + ".tolerances." + it.key() + ": expected a number");
      cfg.tolerances[it.key()] = it.value().get<double>();
    }
  }
  o.finish();
  return cfg;
}

inline json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  if (cfg.op) j["operator"] = operator_to_json(*cfg.op);
  if (cfg.domain) j["domain"] = domain_to_json(*cfg.domain);
  if (cfg.data) j["data"] = trig_to_json(*cfg.data);
  if (cfg.grid) j["grid"] = grid_to_json(*cfg.grid);
  if (cfg.sweep) j["sweep"] = sweep_to_json(*cfg.sweep);
  if (!cfg.tolerances.empty()) {
    json t;
    for (const auto& [k, v] : cfg.tolerances) t[k] = v;
    j["tolerances"] = std::move(t);
  }
  return j;
}

// Canonical text form: sorted keys (nlohmann objects are ordered maps),
// two-space indentation, trailing newline.  parse -> dump is idempotent.
inline std::string canonical_dump(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

inline ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace homog
