#pragma once

#include "model/system.hpp"
#include "sym/solver.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace plcnet::sem {

using model::Model;
using model::SystemState;
using sym::Formula;
using sym::Poly;

/// Model-level failure while generating successors (e.g. a communication
/// intrinsic naming a pair without a connection object).
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TransitionClass { Start, Tick, Internal, Comm };
const char* class_name(TransitionClass c);

/// Names one enabled rewrite: rule label, focus machine, and whatever else
/// is needed to tell apart two enabled instances of the same rule.
struct TransitionId {
  std::string label;
  int machine = -1;    // machine index, -1 for global rules
  std::string detail;  // input choice, tick duration, message, ...

  friend bool operator==(const TransitionId& a, const TransitionId& b) {
    return a.label == b.label && a.machine == b.machine && a.detail == b.detail;
  }
  friend bool operator<(const TransitionId& a, const TransitionId& b) {
    return std::tie(a.label, a.machine, a.detail) < std::tie(b.label, b.machine, b.detail);
  }
  std::string str(const Model& m) const;
};

struct Transition {
  TransitionId id;
  TransitionClass cls = TransitionClass::Internal;
  SystemState next;
  std::string delta;  // elapsed time, empty for untimed rules
  Formula added;      // constraint conjoined by this step
  std::optional<sym::VarId> fresh;  // duration variable of a symbolic tick
  bool back_edge = false;           // a while body was (re-)entered
};

struct Expansion {
  std::vector<Transition> transitions;
  std::vector<std::string> diagnostics;  // runtime errors, missed assertion windows
  bool tick_suppressed = false;           // symbolic tick withheld right after a tick
};

struct EngineOptions {
  model::Mode mode = model::Mode::Concrete;
  bool clock_sep = false;
  std::optional<Rational> bound;

  static EngineOptions from(const Model& m) { return {m.analysis.mode, m.analysis.clock_sep, m.analysis.bound}; }
};

/// Successor generation for the timed, communication and symbolic rules.
class Engine {
 public:
  Engine(const Model& m, sym::Solver& solver, EngineOptions opts);

  const Model& model() const { return m_; }
  const EngineOptions& options() const { return opts_; }
  sym::Solver& solver() { return solver_; }

  /// Every enabled transition of `s` (raw successors, not canonicalized).
  Expansion expand(const SystemState& s);
  /// Start, internal and communication transitions only.
  Expansion expand_untimed(const SystemState& s);
  /// Appends the time-elapse transitions of `s` to `x`.
  void add_timed(const SystemState& s, Expansion& x);

  /// Maximal time elapse of a concrete state; infinity without timers or messages.
  TimeBound mte(const SystemState& s) const;
  /// Concrete tick menu: event boundaries in (0, mte].
  std::vector<Rational> tick_menu(const SystemState& s) const;
  /// Advances every object by `T` (timers, message timers, flows, clocks).
  /// Concrete mode rejects T > mte with std::invalid_argument.
  SystemState tick(const SystemState& s, const Poly& T) const;
  /// Replaces `s` by boundReached when its clock exceeds the bound (symbolic:
  /// when clock <= bound is infeasible; otherwise that constraint is added).
  SystemState apply_bound(const SystemState& s);
  /// Conjoins `g` into s.constraint if the result may be satisfiable.
  bool assume(SystemState& s, const Formula& g, sym::QueryClass qc);
  /// Evaluates a query predicate over a state (Formula over machine states and clock).
  Formula predicate(const SystemState& s, const st::Expr& e) const;

 private:
  void internal_steps(const SystemState& s, int i, Expansion& out);
  void comm_steps(const SystemState& s, int i, const exec::CommRequest& req, Expansion& out);
  void start_steps(const SystemState& s, Expansion& out);
  void tick_steps(const SystemState& s, Expansion& out);
  void env_tick_steps(const SystemState& s, Expansion& out);
  bool symbolic() const { return opts_.mode == model::Mode::Symbolic; }
  sym::QueryClass classify_guard(const SystemState& s, const Formula& g, sym::QueryClass qc) const;

  const Model& m_;
  sym::Solver& solver_;
  EngineOptions opts_;
};

/// Program-time elapsed in the current cycle (cycleTime - timer).
Poly elapsed_in_cycle(const model::MachineDef& def, const model::Machine& mc);

}  // namespace plcnet::sem
