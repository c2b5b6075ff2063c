#include "doctest.h"

#include "explore/explore.hpp"
#include "model/scenario.hpp"

using namespace plcnet;
using namespace plcnet::explore;

namespace {

// Two machines, one assignment each, and one tick to the bound: the three
// events commute, so the full graph is a cube.
const char* kDiamond = R"({
  "source": "PROGRAM P1\nVAR_OUTPUT go : INT; END_VAR\n  go := 1;\nEND_PROGRAM\nPROGRAM P2\nVAR_OUTPUT go : INT; END_VAR\n  go := 1;\nEND_PROGRAM",
  "machines": [{"id": "PLC1", "programs": ["P1"], "cycleTime": 10, "preloaded": true,
                "state": {"x": 0, "y": 0}, "flow": {"x": "x + t"}, "bindings": {"actuate": {}}},
               {"id": "PLC2", "programs": ["P2"], "cycleTime": 10, "preloaded": true,
                "state": {"x": 0, "y": 10}, "flow": {"x": "x + t"}}],
  "analysis": {"bound": 3}
})";

const char* kTank = R"({
  "source": "PROGRAM T1\nVAR_INPUT waterLevel : REAL; END_VAR\nVAR_OUTPUT pumpSwitch : INT; END_VAR\nVAR input : BOOL; END_VAR\n  IF input THEN pumpSwitch := 1; ELSE pumpSwitch := 0; END_IF;\nEND_PROGRAM",
  "machines": [{"id": "T1", "programs": ["T1"], "cycleTime": 10, "preloaded": true,
                "state": {"waterLevel": 10, "pumpSwitch": 0},
                "flow": {"waterLevel": "waterLevel - pumpSwitch * t"},
                "inputs": {"input": {"free": [false, true]}}}],
  "analysis": {"bound": 30}
})";

SearchResult run(const Model& m, bool por, std::optional<Query> q = {}, SearchOptions o = {}) {
  static sym::Solver solver;
  sem::Engine e(m, solver, sem::EngineOptions::from(m));
  o.por = por;
  return search(e, model::initial_state(m), q, o);
}

Query reach(const Model& m, const std::string& text) { return Query{model::parse_property(m, text, model::Property::Kind::Reach)}; }

}  // namespace

TEST_CASE("diamond: 8 states without reduction, 4 with") {
  Model m = model::load_scenario_text(kDiamond);
  SearchResult full = run(m, false);
  SearchResult red = run(m, true);
  CHECK(full.stats.states == 8);
  CHECK(red.stats.states == 4);
  CHECK(full.verdict == Verdict::NoSolution);
  CHECK(red.stats.reduced > 0);
}

TEST_CASE("bound 0 examines only the initial state") {
  Model m = model::load_scenario_text(kDiamond);
  m.analysis.bound = Rational(0);
  SearchResult r = run(m, false);
  CHECK(r.stats.states == 4);  // the two assignments interleave at time 0
  m.analysis.bound.reset();
  Query q = reach(m, "PLC1.x = 0");
  SearchResult hit = run(m, true, q);
  CHECK(hit.verdict == Verdict::SolutionFound);
  REQUIRE(hit.solutions.size() == 1);
  CHECK(hit.solutions[0].trace.steps.empty());
}

TEST_CASE("reach query finds a witness whose trace replays") {
  Model m = model::load_scenario_text(kTank);
  Query q = reach(m, "T1.waterLevel < 1");
  for (bool por : {false, true}) {
    SearchResult r = run(m, por, q);
    REQUIRE(r.verdict == Verdict::SolutionFound);
    const Solution& s = r.solutions[0];
    CHECK(s.valuation.at("T1.waterLevel") == "0");
    CHECK(s.valuation.at("clock") == "30");  // pump actuated at 20, one cycle after the input
    sym::Solver solver;
    sem::Engine e(m, solver, sem::EngineOptions::from(m));
    std::vector<sem::TransitionId> ids;
    for (const auto& st : s.trace.steps) ids.push_back(st.id);
    Trace again = replay(e, model::initial_state(m), ids);
    CHECK(model::canonicalize(m, again.steps.back().state).key == model::canonicalize(m, s.trace.steps.back().state).key);
    ids.insert(ids.begin(), sem::TransitionId{"conSucc", 0, ""});
    CHECK_THROWS_AS(replay(e, model::initial_state(m), ids), ReplayError);
  }
}

TEST_CASE("safety verdicts and endpoints agree with and without reduction, concrete and symbolic") {
  Model m = model::load_scenario_text(kTank);
  Query q{model::parse_property(m, "T1.waterLevel >= 0", model::Property::Kind::Safety)};
  SearchOptions o;
  o.collect_endpoints = true;
  o.check_invisibility = true;
  SearchResult a = run(m, false, q, o), b = run(m, true, q, o);
  CHECK(a.verdict == Verdict::NoSolution);
  CHECK(b.verdict == Verdict::NoSolution);
  CHECK(a.endpoints == b.endpoints);
  CHECK(a.endpoints.size() > 1);
  CHECK(b.stats.states < a.stats.states);
  // only actuation at cycle start writes physical state outside a tick
  CHECK(b.stats.reduced_visible == 0);
  for (const auto& d : b.diagnostics)
    if (d.rfind("visible non-time step: ", 0) == 0) CHECK(d.find("start") != std::string::npos);

  Model ms = m;
  ms.analysis.mode = model::Mode::Symbolic;
  SearchResult s = run(ms, true, q);
  CHECK(s.verdict == Verdict::NoSolution);
  CHECK(s.stats.unknowns == 0);
  Query bad{model::parse_property(m, "T1.waterLevel >= 1", model::Property::Kind::Safety)};
  SearchResult sv = run(ms, true, bad);
  CHECK(sv.verdict == Verdict::SolutionFound);
}

TEST_CASE("simulation follows the deterministic policy and stops at the requested time") {
  std::string src = kTank;
  src.replace(src.find("{\"free\": [false, true]}"), std::string("{\"free\": [false, true]}").size(), "[true]");
  Model m = model::load_scenario_text(src);
  sym::Solver solver;
  sem::Engine e(m, solver, sem::EngineOptions::from(m));
  Trace t = simulate(e, model::initial_state(m), SimOptions{Rational(16)});
  const auto& last = t.steps.back().state.machines[0];
  CHECK(last.clock == sym::Poly(16));
  CHECK(last.timer == sym::Poly(4));
  CHECK(exec::as_poly(last.state[static_cast<std::size_t>(m.machines[0].key_index("waterLevel"))]) == sym::Poly(4));
  std::string text = trace_text(m, t);
  CHECK(text.find("start") != std::string::npos);
  CHECK(text.rfind("tick[6]  6  16") != std::string::npos);
  CHECK(trace_json(m, t).find("\"rule\"") != std::string::npos);
}

TEST_CASE("random concrete runs embed into symbolic runs") {
  Model m = model::load_scenario_text(kTank);
  Model ms = m;
  ms.analysis.mode = model::Mode::Symbolic;
  sym::Solver solver;
  sem::Engine ce(m, solver, sem::EngineOptions::from(m));
  sem::Engine se(ms, solver, sem::EngineOptions::from(ms));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    Trace t = random_walk(ce, model::initial_state(m), 40, rng);
    auto err = embed(se, model::initial_state(ms), t);
    CHECK_MESSAGE(!err, (err ? *err : ""));
  }
}

TEST_CASE("the por x clockSep grid agrees") {
  Model m = model::load_scenario_text(kTank);
  Query q{model::parse_property(m, "T1.waterLevel >= 0", model::Property::Kind::Safety)};
  sym::Solver solver;
  Grid g = stats_compare(m, solver, q);
  CHECK(g.rows.size() == 4);
  CHECK(g.verdicts_agree);
}
