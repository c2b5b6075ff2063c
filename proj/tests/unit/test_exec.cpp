#include "doctest.h"

#include "exec/kconfig.hpp"
#include "st/parser.hpp"

#include <functional>
#include <random>
#include <sstream>

using namespace plcnet;
using namespace plcnet::exec;

namespace {

KConfig make(const std::string& src, std::vector<std::string> programs, bool builtins = false) {
  auto decls = st::parse_source(src);
  auto pous = builtins ? st::elaborate_with_builtins(decls) : st::elaborate(decls);
  return load_programs(idle_config(pous, programs, 10));
}

Value at(const KConfig& c, const std::string& path) { return c.store.at(static_cast<std::size_t>(*c.layout->loc_by_path(path))); }

void set(KConfig& c, const std::string& path, Value v) { c.store.at(static_cast<std::size_t>(*c.layout->loc_by_path(path))) = std::move(v); }

Rational num(const Value& v) { return as_poly(v).constant_value(); }

using CommFn = std::function<Value(const CommRequest&)>;

// Runs to completion; concrete branching only.
KConfig run(KConfig c, const CommFn& comm = {}, std::vector<std::string>* labels = nullptr, int limit = 10000) {
  for (int i = 0; i < limit; ++i) {
    StepResult r = step(c);
    if (labels && !r.label.empty()) labels->push_back(r.label);
    switch (r.kind) {
      case StepResult::Kind::Done: return c;
      case StepResult::Kind::NeedsComm:
        REQUIRE(comm);
        if (labels) labels->push_back(st::intrinsic_name(r.comm.op));
        c = resume(c, comm(r.comm));
        break;
      case StepResult::Kind::Error: FAIL(r.error); return c;
      case StepResult::Kind::Branch: FAIL("unexpected symbolic branch"); return c;
      default: c = r.next;
    }
  }
  FAIL("step limit");
  return c;
}

}  // namespace

TEST_CASE("assignment and conditional steps") {
  KConfig c = make(R"(PROGRAM P
VAR x : INT := 3; y : INT; END_VAR
  x := x + 1;
  IF x > 3 THEN y := x * 2; ELSE y := 0; END_IF;
END_PROGRAM)",
                   {"P"});
  std::vector<std::string> labels;
  KConfig e = run(c, {}, &labels);
  CHECK(num(at(e, "P.x")) == 4);
  CHECK(num(at(e, "P.y")) == 8);
  CHECK(labels == std::vector<std::string>{"assign", "if-true", "assign"});
  CHECK(is_cycle_complete(e));
  CHECK(e.stack.empty());
}

TEST_CASE("programs run in pList order and fill done") {
  KConfig c = make(R"(PROGRAM A VAR_OUTPUT o : INT; END_VAR o := 1; END_PROGRAM
PROGRAM B VAR_OUTPUT o : INT; END_VAR o := 2; END_PROGRAM)",
                   {"B", "A"});
  CHECK(c.done.empty());
  StepResult r = step(c);
  REQUIRE(r.kind == StepResult::Kind::Internal);
  CHECK(num(at(r.next, "B.o")) == 2);
  CHECK(num(at(r.next, "A.o")) == 0);
  CHECK(r.next.done == std::vector<std::string>{"B"});
  KConfig e = run(c);
  CHECK(e.done == std::vector<std::string>{"B", "A"});
  CHECK_THROWS_AS(load_programs(c), std::logic_error);
  CHECK_NOTHROW(load_programs(e));
}

TEST_CASE("idle configuration errors") {
  auto pous = st::elaborate(st::parse_source("PROGRAM P END_PROGRAM FUNCTION_BLOCK F END_FUNCTION_BLOCK"));
  CHECK_THROWS_AS(idle_config(pous, {"Q"}, 10), std::invalid_argument);
  CHECK_THROWS_AS(idle_config(pous, {"F"}, 10), std::invalid_argument);
  KConfig idle = idle_config(pous, {"P"}, 10);
  CHECK(is_cycle_complete(idle));
  CHECK(step(idle).kind == StepResult::Kind::Done);
}

TEST_CASE("tank controller") {
  KConfig c = make(R"(PROGRAM T1
VAR_INPUT waterLevel : REAL; input : BOOL; END_VAR
VAR_OUTPUT pumpSwitch : INT; END_VAR
  IF input THEN pumpSwitch := 1; ELSE pumpSwitch := 0; END_IF;
END_PROGRAM)",
                   {"T1"});
  set(c, "T1.input", true);
  CHECK(num(at(run(c), "T1.pumpSwitch")) == 1);
  set(c, "T1.input", false);
  CHECK(num(at(run(c), "T1.pumpSwitch")) == 0);
}

TEST_CASE("symbolic condition branches") {
  KConfig c = make(R"(PROGRAM P
VAR x : REAL; y : INT; END_VAR
  IF x > 5 THEN y := 1; ELSE y := 2; END_IF;
END_PROGRAM)",
                   {"P"});
  set(c, "P.x", sym::Poly::var(0));
  StepResult r = step(c);
  REQUIRE(r.kind == StepResult::Kind::Branch);
  CHECK(r.cond == sym::Formula::gt(sym::Poly::var(0), sym::Poly(5)));
  CHECK(num(at(run(r.next), "P.y")) == 1);
  CHECK(num(at(run(r.other), "P.y")) == 2);
}

TEST_CASE("while loop marks back edges") {
  KConfig c = make(R"(PROGRAM P
VAR i : INT; s : INT; END_VAR
  WHILE i < 3 DO s := s + i; i := i + 1; END_WHILE;
END_PROGRAM)",
                   {"P"});
  int back = 0;
  KConfig cur = c;
  for (;;) {
    StepResult r = step(cur);
    if (r.kind == StepResult::Kind::Done) break;
    REQUIRE(r.kind == StepResult::Kind::Internal);
    if (r.back_edge) ++back;
    cur = r.next;
  }
  CHECK(back == 3);
  CHECK(num(at(cur, "P.s")) == 3);
}

TEST_CASE("arithmetic errors are reported, not thrown") {
  KConfig c = make("PROGRAM P VAR x : INT; y : INT; END_VAR y := 1 / x; END_PROGRAM", {"P"});
  StepResult r = step(c);
  CHECK(r.kind == StepResult::Kind::Error);
  CHECK(r.error.find("division by zero") != std::string::npos);
  KConfig m = make("PROGRAM P VAR x : INT := 7; y : INT; END_VAR y := x MOD 3; END_PROGRAM", {"P"});
  CHECK(num(at(run(m), "P.y")) == 1);
}

TEST_CASE("function blocks and communication intrinsics") {
  KConfig c = make(R"(PROGRAM T1
VAR comm : CONNECT; rcv : URCV; got : INT; END_VAR
  comm(TRUE, "T2");
  IF NOT comm.VALID THEN RETURN; END_IF;
  rcv(TRUE, "T2", "send");
  got := rcv.DATA;
END_PROGRAM)",
                   {"T1"}, true);
  std::vector<CommRequest> seen;
  bool connected = false;
  auto oracle = [&](const CommRequest& q) -> Value {
    seen.push_back(q);
    if (q.op == st::Intrinsic::IsConnected) return connected;
    if (q.op == st::Intrinsic::RcvData) return sym::Poly(42);
    return true;
  };
  std::vector<std::string> labels;
  KConfig e = run(c, oracle, &labels);
  // not connected: CONNECT reports an error and the program returns early
  CHECK_FALSE(std::get<bool>(at(e, "T1.comm.VALID")));
  CHECK(std::get<bool>(at(e, "T1.comm.ERROR")));
  CHECK(num(at(e, "T1.comm.STATUS")) == 1);
  CHECK(num(at(e, "T1.got")) == 0);
  REQUIRE(seen.size() == 2);
  CHECK(seen[0].op == st::Intrinsic::ConnectRequest);
  CHECK(seen[0].block == "T1.comm");
  CHECK(std::get<std::string>(seen[0].args[0]) == "T2");
  CHECK(seen[1].op == st::Intrinsic::IsConnected);
  CHECK(e.stack.empty());

  connected = true;
  seen.clear();
  e = run(load_programs(e), oracle);
  CHECK(std::get<bool>(at(e, "T1.comm.VALID")));
  CHECK(num(at(e, "T1.got")) == 42);
  CHECK(std::get<bool>(at(e, "T1.rcv.NDR")));
  REQUIRE(seen.size() == 4);  // connectRequest, isConnected twice, rcvData
  CHECK(seen[3].op == st::Intrinsic::RcvData);
  CHECK(std::get<std::string>(seen[3].args[2]) == "rcv");

  // NDR was left set: the next cycle resets it and returns before receiving
  seen.clear();
  e = run(load_programs(e), oracle);
  CHECK_FALSE(std::get<bool>(at(e, "T1.rcv.NDR")));
  CHECK(seen.size() == 2);

  // a failed receive
  e = run(load_programs(e), [&](const CommRequest& q) -> Value {
    if (q.op == st::Intrinsic::RcvData) return RcvError{};
    return true;
  });
  CHECK(std::get<bool>(at(e, "T1.rcv.ERROR")));
  CHECK(num(at(e, "T1.rcv.STATUS")) == 1);
}

TEST_CASE("assignment from an intrinsic takes two steps") {
  KConfig c = make(R"(PROGRAM P VAR s : USEND; END_VAR s(TRUE, "T2", "rcv", 5); END_PROGRAM)", {"P"}, true);
  std::vector<std::string> labels;
  run(c, [](const CommRequest&) -> Value { return true; }, &labels);
  auto it = std::find(labels.begin(), labels.end(), "sendData");
  REQUIRE(it != labels.end());
  CHECK(*(it + 1) == "assign");
}

TEST_CASE("step is deterministic and pure") {
  KConfig c = make(R"(PROGRAM P VAR x : INT; END_VAR x := x + 1; IF x = 1 THEN x := 10; END_IF; END_PROGRAM)", {"P"});
  std::string before = c.control_key();
  StepResult a = step(c), b = step(c);
  CHECK(c.control_key() == before);
  CHECK(a.next.control_key() == b.next.control_key());
  CHECK(value_equal(at(a.next, "P.x"), at(b.next, "P.x")));
}

// Random straight-line / branching programs over two integer inputs. Running
// symbolically and following the branch whose condition holds must agree
// with the concrete run; the oracle is a direct interpreter over the same AST.
namespace {

struct Gen {
  std::mt19937 rng;
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  std::string var() { return std::string(1, "abcd"[pick(4)]); }
  std::string term() {
    switch (pick(3)) {
      case 0: return std::to_string(pick(7) - 3);
      default: return var();
    }
  }
  std::string expr(int d) {
    if (d == 0 || pick(3) == 0) return term();
    const char* ops[] = {"+", "-", "*"};
    return "(" + expr(d - 1) + " " + ops[pick(3)] + " " + expr(d - 1) + ")";
  }
  std::string cond() {
    const char* rel[] = {"<", "<=", ">", ">=", "=", "<>"};
    return expr(1) + " " + rel[pick(6)] + " " + expr(1);
  }
  std::string block(int d, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) {
      if (d > 0 && pick(3) == 0)
        s += "IF " + cond() + " THEN " + block(d - 1, 1 + pick(2)) + " ELSE " + block(d - 1, 1 + pick(2)) + " END_IF;\n";
      else
        s += std::string(1, "cd"[pick(2)]) + " := " + expr(2) + ";\n";
    }
    return s;
  }
};

long oracle_eval(const st::Expr& e, std::map<std::string, long>& env) {
  switch (e.kind) {
    case st::Expr::Kind::Num: return e.num.get_num().get_si();
    case st::Expr::Kind::Var: return env[e.name];
    case st::Expr::Kind::Unary: return -oracle_eval(*e.args[0], env);
    case st::Expr::Kind::Binary: {
      long a = oracle_eval(*e.args[0], env), b = oracle_eval(*e.args[1], env);
      if (e.name == "+") return a + b;
      if (e.name == "-") return a - b;
      if (e.name == "*") return a * b;
      if (e.name == "<") return a < b;
      if (e.name == "<=") return a <= b;
      if (e.name == ">") return a > b;
      if (e.name == ">=") return a >= b;
      if (e.name == "=") return a == b;
      if (e.name == "<>") return a != b;
      break;
    }
    default: break;
  }
  throw std::logic_error("oracle: unsupported expression");
}

void oracle_run(const st::Block& b, std::map<std::string, long>& env) {
  for (const auto& s : b) {
    if (s->kind == st::Stmt::Kind::Assign) env[s->target] = oracle_eval(*s->expr, env);
    if (s->kind == st::Stmt::Kind::If) oracle_run(oracle_eval(*s->expr, env) ? s->then_body : s->else_body, env);
  }
}

}  // namespace

TEST_CASE("property: symbolic execution follows the concrete run") {
  Gen g{std::mt19937(7)};
  for (int iter = 0; iter < 150; ++iter) {
    std::string src = "PROGRAM P VAR a : INT; b : INT; c : INT; d : INT; END_VAR\n" + g.block(2, 3 + g.pick(3)) + "END_PROGRAM";
    auto decls = st::parse_source(src);
    KConfig base = load_programs(idle_config(st::elaborate(decls), {"P"}, 10));
    long av = g.pick(9) - 4, bv = g.pick(9) - 4;
    std::map<std::string, long> env{{"a", av}, {"b", bv}, {"c", 0}, {"d", 0}};
    oracle_run(decls[0].body, env);

    KConfig conc = base;
    set(conc, "P.a", sym::Poly(av));
    set(conc, "P.b", sym::Poly(bv));
    conc = run(conc);

    KConfig s = base;
    set(s, "P.a", sym::Poly::var(0));
    set(s, "P.b", sym::Poly::var(1));
    sym::Model m{{0, av}, {1, bv}};
    for (;;) {
      StepResult r = step(s);
      if (r.kind == StepResult::Kind::Done) break;
      REQUIRE(r.kind != StepResult::Kind::Error);
      if (r.kind == StepResult::Kind::Branch) {
        s = r.cond.evaluate(m) ? r.next : r.other;
      } else {
        s = r.next;
      }
    }
    INFO(src);
    for (const char* v : {"c", "d"}) {
      std::string p = std::string("P.") + v;
      CHECK(num(at(conc, p)) == env[v]);
      CHECK(as_poly(at(s, p)).evaluate(m) == env[v]);
    }
    CHECK(s.control_key() == conc.control_key());
  }
}
