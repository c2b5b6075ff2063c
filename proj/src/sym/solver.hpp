#pragma once

#include "sym/formula.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>

namespace plcnet::sym {

enum class SatResult { Sat, Unsat, Unknown };

/// What a query was asked for. Counted separately so clock separation can be
/// measured by the number of environment queries.
enum class QueryClass { Path = 0, Env = 1, Property = 2, Bound = 3 };
inline constexpr std::size_t kQueryClasses = 4;
const char* query_class_name(QueryClass c);

struct SolverStats {
  std::array<std::uint64_t, kQueryClasses> queries{};
  std::uint64_t trivial = 0;  // decided by constant folding, no solver call
  std::uint64_t external_calls = 0;
  std::uint64_t unknown = 0;
  std::uint64_t total() const;
};

enum class Backend { Internal, External, Auto };

struct SolverOptions {
  Backend backend = Backend::Auto;
  /// Command for the SMT-LIB v2 subprocess; the script path is appended.
  /// Empty means: $PLCNET_SOLVER, else "z3" if found on PATH.
  std::string external_cmd;
};

/// Satisfiability of quantifier-free real arithmetic. Linear problems go to
/// the built-in Fourier-Motzkin procedure; nonlinear ones to an external
/// SMT-LIB v2 solver when one is configured, otherwise Unknown.
class Solver {
 public:
  explicit Solver(SolverOptions opts = {});

  /// `model`, if given, receives an assignment covering every variable in
  /// `f` and in `vars` when the result is Sat.
  SatResult check(const Formula& f, QueryClass qc, Model* model = nullptr, const std::set<VarId>& vars = {});

  const SolverStats& stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }
  bool has_external() const { return !external_.empty(); }
  const std::string& external_command() const { return external_; }
  Backend backend() const { return opts_.backend; }

  /// Resolves the external solver command, or empty if none is available.
  static std::string locate_external(const std::string& requested);

 private:
  SatResult check_internal(const Formula& f, Model* model, const std::set<VarId>& vars);
  SatResult check_external(const Formula& f, Model* model, const std::set<VarId>& vars);

  SolverOptions opts_;
  std::string external_;
  SolverStats stats_;
};

}  // namespace plcnet::sym
