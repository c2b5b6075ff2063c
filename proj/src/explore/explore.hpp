#pragma once

#include "por/por.hpp"
#include "sem/engine.hpp"

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace plcnet::explore {

using model::Model;
using model::SystemState;
using sem::Engine;
using sem::TransitionId;
using sym::Poly;

struct Query {
  model::Property property;
  std::size_t max_solutions = 1;
};

struct SearchOptions {
  bool por = true;
  std::size_t max_states = 0;       // 0: unlimited
  bool check_invisibility = false;  // count non-tick steps that touch state or clock
  bool collect_endpoints = false;   // per-machine environment valuations where a cycle ends
};

struct TraceStep {
  TransitionId id;
  sem::TransitionClass cls = sem::TransitionClass::Internal;
  std::string delta;
  std::optional<sym::VarId> fresh;
  sym::Formula added;
  SystemState state;  // after the step
};

struct Trace {
  SystemState initial;
  std::vector<TraceStep> steps;
  std::optional<sym::Model> witness;  // symbolic: values of the fresh variables
};

enum class Verdict { SolutionFound, NoSolution, BoundExhausted };
const char* verdict_name(Verdict v);

/// The scenario's own property as a query, if it has one.
std::optional<Query> scenario_query(const Model& m);

struct Solution {
  Trace trace;
  std::map<std::string, std::string> valuation;  // "T1.waterLevel" -> value at the solution state
  std::size_t state_index = 0;
};

struct SearchStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t deadlocks = 0;
  std::size_t bound_hits = 0;
  std::size_t reduced = 0;          // expansions where the ample set was a proper subset
  std::size_t full_expansions = 0;  // ample sets widened by the cycle proviso
  std::size_t invisibility_violations = 0;
  std::size_t reduced_visible = 0;  // of those, taken from a proper ample subset
  std::size_t env_ticks = 0;        // environment jumps fired (clock separation)
  sym::SolverStats solver;
  std::uint64_t unknowns = 0;  // solver unknowns during this search
  double seconds = 0;
};

struct SearchResult {
  Verdict verdict = Verdict::NoSolution;
  std::vector<Solution> solutions;
  SearchStats stats;
  std::vector<std::string> diagnostics;  // deduplicated
  std::set<std::string> endpoints;
};

/// Breadth-first bounded search. Without a query the whole bounded state
/// space is explored and the verdict is NoSolution (or BoundExhausted when
/// max_states cut it short).
SearchResult search(Engine& e, const SystemState& init, const std::optional<Query>& q, const SearchOptions& opts);

class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Re-executes transition ids from `init` on raw (non-canonical) states.
Trace replay(Engine& e, const SystemState& init, const std::vector<TransitionId>& ids);
/// Replay that resolves each step by label, machine and the canonical key of
/// the successor, so ids recorded on canonical states replay from raw ones.
Trace replay(Engine& e, const SystemState& init, const std::vector<TransitionId>& ids,
             const std::vector<std::string>& keys);

/// Solution states of a property: the predicate (reach) or its negation (safety).
sym::Formula query_formula(const Engine& e, const SystemState& s, const model::Property& p);

struct GridRow {
  bool por = false, clock_sep = false;
  SearchResult result;
};

struct Grid {
  std::vector<GridRow> rows;
  bool verdicts_agree = true;
};

/// The por x clockSep grid for one model and query.
Grid stats_compare(const Model& m, sym::Solver& solver, const std::optional<Query>& q, const SearchOptions& base = {});

struct SimOptions {
  std::optional<Rational> until;  // stop once the clock reaches this time and nothing untimed is enabled
  std::size_t max_steps = 10000;
};

/// Deterministic concrete run: start first, then the least-numbered machine's
/// internal step, then communication (success outcomes first), then the
/// shortest tick (clipped to `until`).
Trace simulate(Engine& e, const SystemState& init, const SimOptions& opts);

/// Uniformly random concrete run of at most `steps` transitions.
Trace random_walk(Engine& e, const SystemState& init, std::size_t steps, std::mt19937_64& rng);

/// Replays a concrete trace in the symbolic engine, merging consecutive ticks
/// into one symbolic tick fixed to their total. Returns an error message at
/// the first step where the instantiated symbolic state differs.
std::optional<std::string> embed(Engine& symbolic, const SystemState& init, const Trace& concrete);

/// Substitutes values for fresh variables throughout a state.
SystemState instantiate(const SystemState& s, const std::map<sym::VarId, Poly>& sub);

/// Text trace: `step#  rule-label(focus)  dt  clock  constraint-added`.
std::string trace_text(const Model& m, const Trace& t);
/// JSON mirror of trace_text.
std::string trace_json(const Model& m, const Trace& t);

/// State values and clock of machine i, used as its environment valuation.
std::string environment_key(const Model& m, const SystemState& s, std::size_t i);

}  // namespace plcnet::explore
