#include "doctest.h"

#include "model/scenario.hpp"
#include "por/por.hpp"

#include <algorithm>

using namespace plcnet;
using model::Model;
using model::SystemState;
using sem::Engine;
using sem::Expansion;
using sem::Transition;
using sem::TransitionClass;

namespace {

const char* kTwo = R"({
  "source": "PROGRAM P1\nVAR_OUTPUT go : INT; END_VAR\n  go := 1;\n  go := 2;\nEND_PROGRAM\nPROGRAM P2\nVAR_OUTPUT go : INT; END_VAR\n  go := 1;\nEND_PROGRAM",
  "machines": [{"id": "B", "programs": ["P2"], "cycleTime": 10, "preloaded": true,
                "state": {"x": 0}, "flow": {"x": "x + t"}},
               {"id": "A", "programs": ["P1"], "cycleTime": 10, "timer": 0,
                "state": {"x": 0}, "flow": {"x": "x + t"}}]
})";

const char* kMsg = R"({
  "source": "PROGRAM A\nVAR r : BOOL; END_VAR\n  connectRequest(\"B\");\n  r := sendData(\"B\", \"s\", \"r\", 7);\nEND_PROGRAM\nPROGRAM B\nVAR got : ANY; END_VAR\n  got := rcvData(\"A\", \"s\", \"r\");\nEND_PROGRAM",
  "machines": [{"id": "A", "programs": ["A"], "cycleTime": 10, "preloaded": true},
               {"id": "B", "programs": ["B"], "cycleTime": 10, "preloaded": true}],
  "connections": [{"a": "A", "b": "B", "delay": [0, 5], "validity": true}],
  "flags": {"reliableConnect": true}
})";

std::vector<TransitionClass> classes(const Expansion& x, const std::vector<std::size_t>& amp) {
  std::vector<TransitionClass> out;
  for (auto k : amp) out.push_back(x.transitions[k].cls);
  return out;
}

const Transition* first(const Expansion& x, TransitionClass c, int machine = -2) {
  for (const auto& t : x.transitions)
    if (t.cls == c && (machine == -2 || t.id.machine == machine)) return &t;
  return nullptr;
}

}  // namespace

TEST_CASE("numbering is lexicographic unless overridden") {
  Model m = model::load_scenario_text(kTwo);
  CHECK(m.iota[static_cast<std::size_t>(m.machine_index("A"))] == 0);
  CHECK(m.iota[static_cast<std::size_t>(m.machine_index("B"))] == 1);
  std::string src = kTwo;
  src.insert(src.rfind('}'), R"(, "numbering": ["B", "A"])");
  Model o = model::load_scenario_text(src);
  CHECK(o.iota[static_cast<std::size_t>(o.machine_index("B"))] == 0);
}

TEST_CASE("ample: start first, then the least-numbered machine's internal steps") {
  Model m = model::load_scenario_text(kTwo);
  sym::Solver solver;
  Engine e(m, solver, sem::EngineOptions::from(m));
  SystemState s = model::initial_state(m);
  Expansion x = e.expand(s);
  REQUIRE(first(x, TransitionClass::Start));
  REQUIRE(first(x, TransitionClass::Internal));
  auto amp = por::ample(m, x);
  CHECK(classes(x, amp) == std::vector<TransitionClass>{TransitionClass::Start});

  SystemState started = first(x, TransitionClass::Start)->next;
  Expansion y = e.expand(started);
  auto amp2 = por::ample(m, y);
  REQUIRE(amp2.size() == 1);
  CHECK(y.transitions[amp2[0]].id.machine == m.machine_index("A"));
  CHECK(amp2.size() < y.transitions.size());
}

TEST_CASE("ample: only ticks enabled means full expansion") {
  Model m = model::load_scenario_text(kTwo);
  sym::Solver solver;
  Engine e(m, solver, sem::EngineOptions::from(m));
  SystemState s = model::initial_state(m);
  for (int n = 0; n < 20; ++n) {
    Expansion x = e.expand(s);
    const Transition* t = first(x, TransitionClass::Start);
    if (!t) t = first(x, TransitionClass::Internal);
    if (!t) break;
    s = t->next;
  }
  Expansion x = e.expand(s);
  REQUIRE_FALSE(x.transitions.empty());
  auto amp = por::ample(m, x);
  CHECK(amp.size() == x.transitions.size());
  for (auto k : amp) CHECK(x.transitions[k].cls == TransitionClass::Tick);
  std::vector<bool> on_path(x.transitions.size(), true);
  CHECK_FALSE(por::needs_full_expansion(x, amp, on_path));
}

TEST_CASE("ample: communication steps of every machine together") {
  Model m = model::load_scenario_text(kMsg);
  sym::Solver solver;
  Engine e(m, solver, sem::EngineOptions::from(m));
  SystemState s = model::initial_state(m);
  Expansion x = e.expand(s);
  auto amp = por::ample(m, x);
  // A's connectRequest and B's rcvNo are both communication steps
  REQUIRE(amp.size() == 2);
  for (auto k : amp) CHECK(x.transitions[k].cls == TransitionClass::Comm);
  CHECK(x.transitions[amp[0]].id.machine != x.transitions[amp[1]].id.machine);
}

TEST_CASE("cycle condition widens a proper ample subset") {
  Model m = model::load_scenario_text(kTwo);
  sym::Solver solver;
  Engine e(m, solver, sem::EngineOptions::from(m));
  Expansion x = e.expand(model::initial_state(m));
  auto amp = por::ample(m, x);
  REQUIRE(amp.size() < x.transitions.size());
  std::vector<bool> none(x.transitions.size(), false), hit = none;
  CHECK_FALSE(por::needs_full_expansion(x, amp, none));
  hit[amp[0]] = true;
  CHECK(por::needs_full_expansion(x, amp, hit));
  x.transitions[amp[0]].back_edge = true;
  CHECK(por::needs_full_expansion(x, amp, none));
}

TEST_CASE("independence: internal steps of different machines, tick and internal") {
  Model m = model::load_scenario_text(kTwo);
  for (auto mode : {model::Mode::Concrete, model::Mode::Symbolic}) {
    CAPTURE(static_cast<int>(mode));
    sym::Solver solver;
    sem::EngineOptions o = sem::EngineOptions::from(m);
    o.mode = mode;
    Engine e(m, solver, o);
    Expansion x0 = e.expand(model::initial_state(m));
    SystemState s = first(x0, TransitionClass::Start)->next;
    Expansion x = e.expand(s);
    const Transition* a = first(x, TransitionClass::Internal, m.machine_index("A"));
    const Transition* b = first(x, TransitionClass::Internal, m.machine_index("B"));
    const Transition* t = first(x, TransitionClass::Tick);
    REQUIRE(a);
    REQUIRE(b);
    REQUIRE(t);
    CHECK(por::check_independence(e, s, a->id, b->id).verdict == por::Independence::Independent);
    CHECK(por::claimed_independent(*a, *b));
    auto r = por::check_independence(e, s, t->id, a->id);
    CHECK_MESSAGE(r.verdict == por::Independence::Independent, r.reason);
  }
}

TEST_CASE("independence: a receive does not commute with itself") {
  Model m = model::load_scenario_text(kMsg);
  sym::Solver solver;
  Engine e(m, solver, sem::EngineOptions::from(m));
  SystemState s = model::initial_state(m);
  // connect and send, then deliver the message
  for (int n = 0; n < 40; ++n) {
    Expansion x = e.expand(s);
    if (std::any_of(x.transitions.begin(), x.transitions.end(),
                    [](const Transition& t) { return t.id.label == "rcvData"; }))
      break;
    const Transition* t = nullptr;
    for (const auto& c : x.transitions)
      if (c.id.machine == m.machine_index("A") && c.cls != TransitionClass::Tick) t = &c;
    if (!t) t = &x.transitions.front();
    s = t->next;
  }
  Expansion x = e.expand(s);
  auto it = std::find_if(x.transitions.begin(), x.transitions.end(),
                         [](const Transition& t) { return t.id.label == "rcvData"; });
  REQUIRE(it != x.transitions.end());
  auto r = por::check_independence(e, s, it->id, it->id);
  CHECK(r.verdict == por::Independence::Dependent);
  CHECK(r.reason.find("disables") != std::string::npos);
  CHECK_FALSE(por::claimed_independent(*it, *it));
}

TEST_CASE("independence: a pair that is not co-enabled") {
  Model m = model::load_scenario_text(kTwo);
  sym::Solver solver;
  Engine e(m, solver, sem::EngineOptions::from(m));
  SystemState s = model::initial_state(m);
  auto r = por::check_independence(e, s, sem::TransitionId{"assign", 0, ""}, sem::TransitionId{"nothing", 1, ""});
  CHECK(r.verdict == por::Independence::NotCoenabled);
}
