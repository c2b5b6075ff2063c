#pragma once

#include "exec/kconfig.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace plcnet::model {

using sym::Formula;
using sym::Poly;
using exec::Value;

/// Per-variable polynomial in `t` whose other variables are state keys.
/// Variable ids: state key i is VarId i, `t` is VarId state_keys.size().
struct FlowSpec {
  std::map<int, Poly> per_key;  // state key index -> polynomial
  std::vector<std::string> text;  // original expressions, for printing
};

struct InputSpec {
  std::string name;
  std::vector<int> locs;       // store locations written at cycle start
  bool free = false;
  std::vector<Value> values;   // per-cycle sequence (last value repeats) or the free domain
};

struct MachineDef {
  std::string id;
  exec::KConfig idle;  // layout, default store, cycle time
  Rational cycle_time;
  std::vector<std::string> state_keys;
  std::vector<Value> init_state;
  FlowSpec flow;
  std::vector<InputSpec> inputs;
  std::vector<std::pair<int, int>> sense;    // (state key, store loc)
  std::vector<std::pair<int, int>> actuate;  // (store loc, state key)
  Rational init_timer = 0;
  bool preloaded = false;  // programs already loaded at time 0 with timer = cycle time

  int key_index(const std::string& k) const;
  bool is_actuated(int key) const;
};

struct ConnDef {
  int a = 0, b = 0;  // machine indices, a < b
  Rational dmin = 10, dmax = 20;
  bool validity = false;
};

struct Flags {
  bool reliable_connect = false;     // no conFail outcome
  bool delay_set_internal = false;   // classify delaySet as Internal instead of Comm
  bool rcv_no_if_undeliverable = false;  // rcvNo also when matching messages exist but none is deliverable
};

enum class Mode { Concrete, Symbolic };

struct Property {
  enum class Kind { Reach, Safety };
  Kind kind = Kind::Reach;
  std::string text;
  std::shared_ptr<const st::Expr> expr;
};

struct Analysis {
  std::optional<Rational> bound;
  Mode mode = Mode::Concrete;
  bool por = true;
  bool clock_sep = false;
  std::optional<Property> property;
};

/// Static part of a scenario: machine definitions (sorted by id), connections,
/// numbering and options.
struct Model {
  std::vector<MachineDef> machines;
  std::vector<ConnDef> conns;
  std::vector<int> iota;  // iota[machine index] = number; injective
  Flags flags;
  Analysis analysis;

  int machine_index(const std::string& id) const;  // -1 when absent
  /// Index into conns for the unordered pair, or -1.
  int conn_index(int m1, int m2) const;
  /// Machine indices sorted by iota.
  std::vector<int> by_iota() const;
};

struct Msg {
  int sender = 0, receiver = 0;
  std::string send_fb, recv_fb;
  Value data;
  Poly min_timer, max_timer;
};

struct Conn {
  bool valid = false;
  std::vector<Msg> buffer;  // multiset, kept in canonical order
  Rational dmin, dmax;
};

struct Machine {
  exec::KConfig proc;
  Poly timer;
  Rational env_timer;
  Poly clock;
  Poly env_elapsed;               // environment time since the current cycle started
  std::vector<Value> state;       // parallel to MachineDef::state_keys
  std::vector<Value> cycle_state; // state at the last actuation; flow coefficients are read from here
  std::size_t cycle = 0;          // completed starts, indexes per-cycle input sequences
};

/// One global configuration. Concrete mode keeps every Poly constant and the
/// constraint true.
struct SystemState {
  std::vector<Machine> machines;  // parallel to Model::machines
  std::vector<Conn> conns;        // parallel to Model::conns
  Formula constraint;
  std::uint32_t next_var = 0;
  bool last_tick = false;  // symbolic mode: no two consecutive ticks
  bool bound_reached = false;
};

/// Canonical text of a state: the visited-set key.
struct CanonicalState {
  SystemState state;
  std::string key;
  std::size_t hash = 0;
};

SystemState initial_state(const Model& m);

/// Cycle start for one machine: actuate and sense (both from the old
/// values), write inputs, reset timers, reload programs. `choice` gives the
/// value of each free input, in declaration order.
void begin_cycle(const MachineDef& def, Machine& mc, const std::vector<Value>& choice);

/// Copies physical values into input-bound store locations.
void sense(const MachineDef& def, const std::vector<Value>& state, std::vector<Value>& store);
/// Copies output-bound store values into the physical state.
void actuate(const MachineDef& def, const std::vector<Value>& store, std::vector<Value>& state);
/// State after `elapsed` time units of flow from `start`.
std::vector<Value> eval_flow(const MachineDef& def, const std::vector<Value>& start, const Poly& elapsed);

/// Alpha-normalizes fresh variables, substitutes equalities, projects dead
/// variables out of the constraint and serializes the result.
CanonicalState canonicalize(const Model& m, const SystemState& s);

/// Human-readable dump (used by traces and the simulate command).
std::string describe(const Model& m, const SystemState& s);

/// Variables occurring anywhere in the state term (not the constraint).
std::set<sym::VarId> term_vars(const SystemState& s);

std::string msg_str(const Model& m, const Msg& msg, const std::function<std::string(sym::VarId)>& name = {});

}  // namespace plcnet::model
