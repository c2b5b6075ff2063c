#pragma once

#include "exec/value.hpp"
#include "st/elaborate.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace plcnet::exec {

/// Instance of a POU: a program or a function-block variable inside another frame.
struct Frame {
  const st::PouInfo* pou = nullptr;
  std::string path;      // "T1", "T1.comm"
  std::string instance;  // declared instance variable name ("comm"); program name for programs
  std::vector<int> slot; // per PouInfo var index: store location, or child frame id for FB vars
};

/// Static memory layout of one machine: frames for every program in pList and
/// every nested function-block instance. Shared between all configurations
/// of that machine.
struct Layout {
  st::PouTable pous;
  std::vector<std::string> programs;
  std::vector<Frame> frames;
  std::vector<int> program_frames;     // parallel to programs
  std::vector<std::string> loc_names;  // store location -> "T1.comm.VALID"
  std::vector<st::BaseType> loc_types;
  std::map<const st::Stmt*, int> stmt_ids;  // stable numbering for hashing
  std::vector<const st::Stmt*> stmts;       // inverse of stmt_ids
  std::vector<int> stmt_pou;                // stmt id -> index in pou_names
  std::vector<std::string> pou_names;

  /// Store locations of program-level variables named `name` in the given section.
  std::vector<int> program_locs(const std::string& name, st::VarSection sec) const;
  /// Store locations of program-level variables named `name` in any section.
  std::vector<int> program_locs_any(const std::string& name) const;
  std::optional<int> loc_by_path(const std::string& path) const;
};

struct KItem {
  enum class Kind { Stmt, EnterProgram, ProgramEnd, FbExit };
  Kind kind = Kind::Stmt;
  const st::Stmt* stmt = nullptr;
  int arg = -1;  // program index (EnterProgram/ProgramEnd) or frame id (FbExit)
};

/// Per-machine program configuration (k, env via the frame stack, store,
/// pList/done, cycle time).
struct KConfig {
  std::shared_ptr<const Layout> layout;
  std::vector<KItem> k;       // top of the continuation is k.back()
  std::vector<Value> store;
  std::vector<int> stack;     // frame ids; back() is the current environment
  std::vector<std::string> done;
  Rational cycle_time;
  std::optional<Value> pending;  // result of the intrinsic awaited by the head statement

  const std::vector<std::string>& plist() const { return layout->programs; }
  int current_frame() const;
  /// Serialization of k, stack, done and pending (the store is hashed separately).
  std::string control_key() const;
};

/// Builds the layout for `programs` and an idle configuration: empty k,
/// default store, done = programs. Throws std::invalid_argument on unknown or
/// non-PROGRAM pids.
KConfig idle_config(const st::PouTable& pous, const std::vector<std::string>& programs, const Rational& cycle_time);

/// Loads program bodies into k (callP). Requires is_cycle_complete.
KConfig load_programs(const KConfig& cfg);
bool is_cycle_complete(const KConfig& cfg);

/// A communication intrinsic the configuration is blocked on.
struct CommRequest {
  st::Intrinsic op = st::Intrinsic::IsConnected;
  std::vector<Value> args;  // evaluated arguments
  std::string block;        // path of the frame issuing it ("T1.send")
};

struct StepResult {
  enum class Kind { Internal, NeedsComm, Branch, AssertTime, Delay, Done, Error };
  Kind kind = Kind::Done;
  std::string label;  // assign, if-true, if-false, if, while-true, while-false, while, fbCall, return
  const st::Stmt* stmt = nullptr;
  KConfig next;       // Internal / AssertTime / Delay (annotation popped) / Branch then-side
  KConfig other;      // Branch else-side
  sym::Formula cond;  // Branch
  CommRequest comm;   // NeedsComm
  st::Annotation annot;
  bool back_edge = false;  // a while body was entered
  std::string error;
};

/// One small step of the head of k. Intrinsics and annotations are surfaced,
/// never executed here.
StepResult step(const KConfig& cfg);

/// Completes the intrinsic the head statement is blocked on with `result`.
KConfig resume(const KConfig& cfg, Value result);

/// Eagerly discards administrative items (program/FB entry and exit markers,
/// empty statements). Applied by every operation above.
void normalize(KConfig& cfg);

/// Renames / substitutes symbolic variables in every store value and pending result.
KConfig rename_vars(const KConfig& cfg, const std::map<sym::VarId, sym::VarId>& ren);
KConfig substitute_vars(const KConfig& cfg, const std::map<sym::VarId, sym::Poly>& sub);
void collect_vars(const KConfig& cfg, std::set<sym::VarId>& out);

/// Evaluates an expression in the current frame of `cfg` (no intrinsics).
Value eval_in(const KConfig& cfg, int frame, const st::Expr& e);
Value default_value(st::BaseType t);

}  // namespace plcnet::exec
