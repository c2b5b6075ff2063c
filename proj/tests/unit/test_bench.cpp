// Benchmark corpus: every scenario loads and runs, verdicts match the pinned
// fixtures, and two concrete cycles match values worked out by hand.

#include "doctest.h"

#include "explore/explore.hpp"
#include "model/scenario.hpp"

#include "json.hpp"

#include <chrono>
#include <fstream>

using namespace plcnet;
using namespace plcnet::explore;

namespace {

std::string bench(const std::string& rel) { return std::string(PLCNET_SOURCE_DIR) + "/bench/" + rel; }

const std::vector<std::string> kCorpus = {"ptp/ptp.json",     "ptpc/q1.json",     "ther/ther.json",
                                          "therc/therc.json", "rv/rv.json",       "rvc/rvc.json",
                                          "swat1/swat1.json", "swat2/swat2.json", "diamond/diamond.json"};

void script(Model& m, const std::string& machine, const std::string& input, std::vector<exec::Value> values) {
  auto& def = m.machines[static_cast<std::size_t>(m.machine_index(machine))];
  for (auto& in : def.inputs)
    if (in.name == input) {
      in.free = false;
      in.values = std::move(values);
      return;
    }
  FAIL("no input " << input << " on " << machine);
}

// Concrete run to t = 20: the start at 20 has actuated the second cycle's outputs.
SystemState two_cycles(Model m) {
  m.analysis.mode = model::Mode::Concrete;
  m.analysis.bound.reset();
  sym::Solver solver;
  sem::Engine e(m, solver, sem::EngineOptions::from(m));
  SimOptions o;
  o.until = Rational(20);
  Trace t = simulate(e, model::initial_state(m), o);
  REQUIRE_FALSE(t.steps.empty());
  return t.steps.back().state;
}

std::string at(const Model& m, const SystemState& s, const std::string& machine, const std::string& key) {
  int i = m.machine_index(machine);
  const auto& def = m.machines[static_cast<std::size_t>(i)];
  return exec::value_str(s.machines[static_cast<std::size_t>(i)].state[static_cast<std::size_t>(def.key_index(key))]);
}

exec::Value num(int v) { return sym::Poly(Rational(v)); }

}  // namespace

TEST_CASE("every corpus scenario loads, simulates three cycles and answers a trivial reach query") {
  for (const auto& rel : kCorpus) {
    CAPTURE(rel);
    auto t0 = std::chrono::steady_clock::now();
    Model m = model::load_scenario(bench(rel));
    {
      Model c = m;
      c.analysis.mode = model::Mode::Concrete;
      c.analysis.bound.reset();
      sym::Solver solver;
      sem::Engine e(c, solver, sem::EngineOptions::from(c));
      SimOptions o;
      o.until = 3 * c.machines.front().cycle_time;
      Trace t = simulate(e, model::initial_state(c), o);
      CHECK(t.steps.back().state.machines.front().clock == sym::Poly(*o.until));
    }
    sym::Solver solver;
    sem::Engine e(m, solver, sem::EngineOptions::from(m));
    Query q{model::parse_property(m, "clock >= 0", model::Property::Kind::Reach)};
    SearchResult r = search(e, model::initial_state(m), q, {});
    CHECK(r.verdict == Verdict::SolutionFound);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 60);
  }
}

TEST_CASE("corpus verdicts match the pinned fixtures") {
  std::ifstream in(bench("expected.json"));
  nlohmann::json expected = nlohmann::json::parse(in);
  for (auto it = expected.begin(); it != expected.end(); ++it) {
    // the two-tank queries are long runs covered by the acceptance suite
    if (it.key().rfind("ptpc/", 0) == 0) continue;
    CAPTURE(it.key());
    Model m = model::load_scenario(bench(it.key()));
    sym::Solver solver;
    sem::Engine e(m, solver, sem::EngineOptions::from(m));
    SearchResult r = search(e, model::initial_state(m), scenario_query(m), {});
    CHECK(verdict_name(r.verdict) == it.value().get<std::string>());
    CHECK(r.stats.unknowns == 0);
  }
}

TEST_CASE("ptp: two cycles with inA = 1, inB = 0") {
  Model m = model::load_scenario(bench("ptp/ptp.json"));
  script(m, "PTP", "inA", {num(1)});
  script(m, "PTP", "inB", {num(0)});
  SystemState s = two_cycles(m);
  // pumps are off in cycle 1, then (1, -1) for 10 units
  CHECK(at(m, s, "PTP", "level1") == "10");
  CHECK(at(m, s, "PTP", "level2") == "30");
  CHECK(at(m, s, "PTP", "pump1") == "1");
  CHECK(at(m, s, "PTP", "pump2") == "-1");
}

TEST_CASE("ptpc: two cycles with inputs 1 and 0") {
  Model m = model::load_scenario(bench("ptpc/q1.json"));
  script(m, "T1", "input", {num(1)});
  script(m, "T2", "input", {num(0)});
  SystemState s = two_cycles(m);
  // each side computes own input minus the partner's: T1 drains, T2 fills
  CHECK(at(m, s, "T1", "waterLevel") == "10");
  CHECK(at(m, s, "T2", "waterLevel") == "30");
  CHECK(at(m, s, "T1", "pumpSwitch") == "1");
  CHECK(at(m, s, "T2", "pumpSwitch") == "-1");
}

TEST_CASE("ther and therc: two cycles from 20 and 18 degrees") {
  // cycle 1 sees 20 + 18 = 38, not below the threshold: only room 2 heats.
  // At t = 10 the rooms are 19 and 17; cycle 2 sees 36 and turns both on.
  // Room 1 then loses 1, room 2 gains 3 - 1.
  Model ther = model::load_scenario(bench("ther/ther.json"));
  SystemState s = two_cycles(ther);
  CHECK(at(ther, s, "TH", "temp1") == "18");
  CHECK(at(ther, s, "TH", "temp2") == "19");
  CHECK(at(ther, s, "TH", "heat1") == "1");
  CHECK(at(ther, s, "TH", "heat2") == "1");

  Model therc = model::load_scenario(bench("therc/therc.json"));
  SystemState c = two_cycles(therc);
  CHECK(at(therc, c, "R1", "temp1") == "18");
  CHECK(at(therc, c, "R2", "temp2") == "19");
  CHECK(at(therc, c, "R1", "heat1") == "1");
  CHECK(at(therc, c, "R2", "heat2") == "1");
}

TEST_CASE("rv and rvc: vehicle 1 has precedence") {
  Model rv = model::load_scenario(bench("rv/rv.json"));
  script(rv, "RV", "go1", {true});
  script(rv, "RV", "go2", {true});
  SystemState s = two_cycles(rv);
  // vehicle 1 moves at 0.5 for the 10 units after the first actuation
  CHECK(at(rv, s, "RV", "x1") == "5");
  CHECK(at(rv, s, "RV", "y2") == "0");

  Model rvc = model::load_scenario(bench("rvc/rvc.json"));
  script(rvc, "V1", "go1", {true});
  script(rvc, "V2", "go2", {true});
  SystemState c = two_cycles(rvc);
  CHECK(at(rvc, c, "V1", "x1") == "5");
  CHECK(at(rvc, c, "V2", "y2") == "0");

  script(rvc, "V1", "go1", {false});
  SystemState d = two_cycles(rvc);
  CHECK(at(rvc, d, "V1", "x1") == "0");
  CHECK(at(rvc, d, "V2", "y2") == "5");
}

TEST_CASE("swat1: the tank drains one unit per cycle inside the band") {
  Model m = model::load_scenario(bench("swat1/swat1.json"));
  SystemState s = two_cycles(m);
  CHECK(at(m, s, "SW", "level") == "40");
  CHECK(at(m, s, "SW", "mv") == "0");
  CHECK(at(m, s, "SW", "bw") == "0");
}

TEST_CASE("swat2: demand without hold runs the pump") {
  Model m = model::load_scenario(bench("swat2/swat2.json"));
  script(m, "P2", "demand", {num(1)});
  SystemState s = two_cycles(m);
  // pump on from t = 10 drains 0.15 per unit; the valve stays shut at 45
  CHECK(at(m, s, "P1", "level") == "87/2");
  CHECK(at(m, s, "P1", "pump") == "1");
  CHECK(at(m, s, "P1", "mv") == "0");
}
