#include "model/scenario.hpp"

#include "st/parser.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace plcnet::model {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ScenarioError(msg); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) fail("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Rational rational_of(const json& j, const std::string& what) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_number()) return parse_rational(j.dump());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument&) {
  }
  fail(what + ": expected a number, got " + j.dump());
}

Value value_of(const json& j, const std::string& what) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return Poly(rational_of(j, what));
  if (j.is_string()) return j.get<std::string>();
  fail(what + ": expected a number, boolean or string, got " + j.dump());
}

std::vector<st::PouDecl> parse_file(const std::string& text, const std::string& origin) {
  try {
    return st::parse_source(text);
  } catch (const st::SourceError& e) {
    fail(origin + ":" + e.what());
  }
}

void add_sources(const json& j, const fs::path& base, std::vector<st::PouDecl>& out) {
  if (j.contains("sources")) {
    for (const auto& p : j.at("sources")) {
      fs::path path = base / p.get<std::string>();
      auto d = parse_file(slurp(path), path.string());
      out.insert(out.end(), d.begin(), d.end());
    }
  }
  if (j.contains("source")) {
    auto d = parse_file(j.at("source").get<std::string>(), "<inline>");
    out.insert(out.end(), d.begin(), d.end());
  }
}

int resolve_loc(const exec::Layout& L, const std::string& path, const std::string& machine) {
  auto loc = L.loc_by_path(path);
  if (!loc) fail("machine " + machine + ": no variable " + path);
  return *loc;
}

bool known(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }) == keys.end())
      fail(where + ": unknown key '" + it.key() + "'");
  return true;
}

MachineDef load_machine(const json& j, const fs::path& base, const std::vector<st::PouDecl>& global) {
  known(j, {"id", "programs", "cycleTime", "timer", "preloaded", "state", "flow", "inputs", "bindings", "sources", "source"},
        "machine");
  MachineDef d;
  d.id = j.at("id").get<std::string>();
  std::vector<st::PouDecl> decls = global;
  add_sources(j, base, decls);
  st::PouTable pous;
  try {
    pous = st::elaborate_with_builtins(decls);
  } catch (const st::SourceError& e) {
    fail("machine " + d.id + ": " + e.what());
  }
  std::vector<std::string> programs = j.at("programs").get<std::vector<std::string>>();
  d.cycle_time = rational_of(j.at("cycleTime"), "cycleTime");
  if (d.cycle_time <= 0) fail("machine " + d.id + ": cycleTime must be positive");
  try {
    d.idle = exec::idle_config(pous, programs, d.cycle_time);
  } catch (const std::invalid_argument& e) {
    fail("machine " + d.id + ": " + e.what());
  }
  if (j.contains("timer")) d.init_timer = rational_of(j.at("timer"), "timer");
  if (d.init_timer < 0 || d.init_timer > d.cycle_time) fail("machine " + d.id + ": timer outside [0, cycleTime]");
  d.preloaded = j.value("preloaded", false);
  const exec::Layout& L = *d.idle.layout;

  if (j.contains("state")) {
    // json objects iterate in key order, which fixes the state key order
    for (auto it = j.at("state").begin(); it != j.at("state").end(); ++it) {
      d.state_keys.push_back(it.key());
      d.init_state.push_back(value_of(it.value(), "state." + it.key()));
    }
  }
  if (j.contains("flow")) {
    for (auto it = j.at("flow").begin(); it != j.at("flow").end(); ++it) {
      int k = d.key_index(it.key());
      if (k < 0) fail("machine " + d.id + ": flow for unknown state key " + it.key());
      if (!std::holds_alternative<Poly>(d.init_state[static_cast<std::size_t>(k)]))
        fail("machine " + d.id + ": flowed key " + it.key() + " is not numeric");
      std::string text = it.value().get<std::string>();
      try {
        d.flow.per_key[k] = flow_poly(*st::parse_expression(text), d.state_keys);
      } catch (const std::exception& e) {
        fail("machine " + d.id + ": flow " + it.key() + ": " + e.what());
      }
      d.flow.text.push_back(it.key() + "(t) = " + text);
    }
  }

  std::map<std::string, std::string> sense_bind, act_bind;
  if (j.contains("bindings")) {
    const json& b = j.at("bindings");
    known(b, {"sense", "actuate"}, "bindings");
    if (b.contains("sense")) sense_bind = b.at("sense").get<std::map<std::string, std::string>>();
    if (b.contains("actuate")) act_bind = b.at("actuate").get<std::map<std::string, std::string>>();
  }
  for (std::size_t k = 0; k < d.state_keys.size(); ++k) {
    const std::string& key = d.state_keys[k];
    int ki = static_cast<int>(k);
    if (auto it = sense_bind.find(key); it != sense_bind.end()) {
      d.sense.emplace_back(ki, resolve_loc(L, it->second, d.id));
    } else {
      for (int loc : L.program_locs(key, st::VarSection::Input)) d.sense.emplace_back(ki, loc);
    }
    if (auto it = act_bind.find(key); it != act_bind.end()) {
      d.actuate.emplace_back(resolve_loc(L, it->second, d.id), ki);
    } else {
      for (int loc : L.program_locs(key, st::VarSection::Output)) d.actuate.emplace_back(loc, ki);
    }
  }
  for (const auto& [key, path] : sense_bind)
    if (d.key_index(key) < 0) fail("machine " + d.id + ": binding for unknown state key " + key);
  for (const auto& [key, path] : act_bind)
    if (d.key_index(key) < 0) fail("machine " + d.id + ": binding for unknown state key " + key);

  if (j.contains("inputs")) {
    for (auto it = j.at("inputs").begin(); it != j.at("inputs").end(); ++it) {
      InputSpec in;
      in.name = it.key();
      if (in.name.find('.') != std::string::npos) {
        in.locs.push_back(resolve_loc(L, in.name, d.id));
      } else {
        in.locs = L.program_locs_any(in.name);
      }
      if (in.locs.empty()) fail("machine " + d.id + ": input " + in.name + " matches no program variable");
      const json& spec = it.value();
      if (spec.is_array()) {
        for (const auto& v : spec) in.values.push_back(value_of(v, "input " + in.name));
      } else {
        known(spec, {"values", "free"}, "input " + in.name);
        if (spec.contains("free")) {
          in.free = true;
          for (const auto& v : spec.at("free")) in.values.push_back(value_of(v, "input " + in.name));
        } else {
          for (const auto& v : spec.at("values")) in.values.push_back(value_of(v, "input " + in.name));
        }
      }
      if (in.values.empty()) fail("machine " + d.id + ": input " + in.name + " has no values");
      d.inputs.push_back(std::move(in));
    }
  }
  return d;
}

}  // namespace

Poly flow_poly(const st::Expr& e, const std::vector<std::string>& keys) {
  switch (e.kind) {
    case st::Expr::Kind::Num: return Poly(e.num);
    case st::Expr::Kind::Var: {
      if (e.name == "t") return Poly::var(static_cast<sym::VarId>(keys.size()));
      for (std::size_t i = 0; i < keys.size(); ++i)
        if (keys[i] == e.name) return Poly::var(static_cast<sym::VarId>(i));
      throw std::invalid_argument("unknown state key '" + e.name + "'");
    }
    case st::Expr::Kind::Unary:
      if (e.name == "-") return -flow_poly(*e.args[0], keys);
      break;
    case st::Expr::Kind::Binary: {
      Poly a = flow_poly(*e.args[0], keys), b = flow_poly(*e.args[1], keys);
      if (e.name == "+") return a + b;
      if (e.name == "-") return a - b;
      if (e.name == "*") return a * b;
      if (e.name == "/" && b.is_constant() && !b.is_zero()) return a.scaled(1 / b.constant_value());
      break;
    }
    default: break;
  }
  throw std::invalid_argument("flows are polynomials over state keys and t");
}

namespace {

void check_predicate(const Model& m, const st::Expr& e) {
  switch (e.kind) {
    case st::Expr::Kind::Field: {
      int mi = m.machine_index(e.name);
      if (mi < 0) throw ScenarioError("predicate: unknown machine " + e.name);
      if (m.machines[static_cast<std::size_t>(mi)].key_index(e.field) < 0)
        throw ScenarioError("predicate: machine " + e.name + " has no state key " + e.field);
      return;
    }
    case st::Expr::Kind::Var:
      if (e.name != "clock") throw ScenarioError("predicate: write Machine.key, not " + e.name);
      return;
    case st::Expr::Kind::Intrinsic: throw ScenarioError("predicate: intrinsics are not allowed");
    default:
      for (const auto& a : e.args) check_predicate(m, *a);
  }
}

}  // namespace

Property parse_property(const Model& m, const std::string& text, Property::Kind kind) {
  Property p;
  p.kind = kind;
  p.text = text;
  try {
    p.expr = st::parse_expression(text);
  } catch (const st::SourceError& e) {
    throw ScenarioError(std::string("predicate: ") + e.what());
  }
  check_predicate(m, *p.expr);
  return p;
}

Model load_scenario_text(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    known(j, {"sources", "source", "machines", "connections", "numbering", "flags", "analysis", "name", "description"},
          "scenario");
    fs::path base(base_dir);
    std::vector<st::PouDecl> global;
    add_sources(j, base, global);

    Model m;
    for (const auto& mj : j.at("machines")) m.machines.push_back(load_machine(mj, base, global));
    std::sort(m.machines.begin(), m.machines.end(), [](const MachineDef& a, const MachineDef& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < m.machines.size(); ++i)
      if (m.machines[i].id == m.machines[i - 1].id) fail("duplicate machine id " + m.machines[i].id);

    if (j.contains("connections")) {
      for (const auto& cj : j.at("connections")) {
        known(cj, {"a", "b", "delay", "validity"}, "connection");
        int a = m.machine_index(cj.at("a").get<std::string>()), b = m.machine_index(cj.at("b").get<std::string>());
        if (a < 0 || b < 0) fail("connection names an unknown machine: " + cj.dump());
        if (a == b) fail("connection from a machine to itself: " + cj.dump());
        if (m.conn_index(a, b) >= 0) fail("duplicate connection: " + cj.dump());
        ConnDef c;
        c.a = std::min(a, b);
        c.b = std::max(a, b);
        if (cj.contains("delay")) {
          c.dmin = rational_of(cj.at("delay").at(0), "delay");
          c.dmax = rational_of(cj.at("delay").at(1), "delay");
          if (c.dmin < 0 || c.dmin > c.dmax) fail("connection delay must satisfy 0 <= min <= max: " + cj.dump());
        }
        c.validity = cj.value("validity", false);
        m.conns.push_back(c);
      }
      std::sort(m.conns.begin(), m.conns.end(), [](const ConnDef& x, const ConnDef& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    }

    m.iota.resize(m.machines.size());
    for (std::size_t i = 0; i < m.iota.size(); ++i) m.iota[i] = static_cast<int>(i);
    if (j.contains("numbering")) {
      auto order = j.at("numbering").get<std::vector<std::string>>();
      if (order.size() != m.machines.size()) fail("numbering must list every machine exactly once");
      std::set<int> seen;
      for (std::size_t n = 0; n < order.size(); ++n) {
        int mi = m.machine_index(order[n]);
        if (mi < 0) fail("numbering names an unknown machine " + order[n]);
        if (!seen.insert(mi).second) fail("numbering lists " + order[n] + " twice");
        m.iota[static_cast<std::size_t>(mi)] = static_cast<int>(n);
      }
    }

    if (j.contains("flags")) {
      const json& f = j.at("flags");
      known(f, {"reliableConnect", "delaySetInternal", "rcvNoIfUndeliverable"}, "flags");
      m.flags.reliable_connect = f.value("reliableConnect", false);
      m.flags.delay_set_internal = f.value("delaySetInternal", false);
      m.flags.rcv_no_if_undeliverable = f.value("rcvNoIfUndeliverable", false);
    }

    if (j.contains("analysis")) {
      const json& a = j.at("analysis");
      known(a, {"bound", "mode", "por", "clockSep", "property"}, "analysis");
      if (a.contains("bound")) m.analysis.bound = rational_of(a.at("bound"), "bound");
      std::string mode = a.value("mode", "concrete");
      if (mode == "concrete") {
        m.analysis.mode = Mode::Concrete;
      } else if (mode == "symbolic") {
        m.analysis.mode = Mode::Symbolic;
      } else {
        fail("analysis.mode must be concrete or symbolic");
      }
      m.analysis.por = a.value("por", true);
      m.analysis.clock_sep = a.value("clockSep", false);
      if (a.contains("property")) {
        const json& p = a.at("property");
        if (p.is_string()) {
          m.analysis.property = parse_property(m, p.get<std::string>(), Property::Kind::Reach);
        } else {
          known(p, {"kind", "predicate"}, "property");
          std::string kind = p.value("kind", "reach");
          if (kind != "reach" && kind != "safety") fail("property.kind must be reach or safety");
          m.analysis.property = parse_property(m, p.at("predicate").get<std::string>(),
                                               kind == "reach" ? Property::Kind::Reach : Property::Kind::Safety);
        }
      }
    }
    return m;
  } catch (const json::exception& e) {
    fail(std::string("scenario: ") + e.what());
  }
}

Model load_scenario(const std::string& path) {
  fs::path p(path);
  return load_scenario_text(slurp(p), p.parent_path().empty() ? "." : p.parent_path().string());
}

}  // namespace plcnet::model
