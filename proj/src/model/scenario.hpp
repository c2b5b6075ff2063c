#pragma once

#include "model/system.hpp"

#include <stdexcept>
#include <string>

namespace plcnet::model {

/// Malformed scenario (schema violation, unknown names, ST errors).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loads a scenario file; relative source paths resolve against its directory.
Model load_scenario(const std::string& path);
/// Loads a scenario from JSON text.
Model load_scenario_text(const std::string& json_text, const std::string& base_dir = ".");

/// Parses a query predicate (`T1.waterLevel < 2 OR clock > 5`) and checks its
/// references against the model.
Property parse_property(const Model& m, const std::string& text, Property::Kind kind);

/// Converts a flow expression over state keys and `t` into a polynomial.
Poly flow_poly(const st::Expr& e, const std::vector<std::string>& keys);

}  // namespace plcnet::model
