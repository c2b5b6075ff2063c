#pragma once

#include "sem/engine.hpp"

#include <string>
#include <vector>

namespace plcnet::por {

using sem::Expansion;
using sem::Transition;
using sem::TransitionClass;

/// Indices into `x.transitions` forming the ample set: every start if one is
/// enabled; else the internal steps of the least-numbered machine that has
/// any; else every communication step; else everything (ticks).
std::vector<std::size_t> ample(const model::Model& m, const Expansion& x);

/// True when the ample set must be widened to the full expansion: it is a
/// proper subset and either closes a cycle (one of its successors is on the
/// current path) or re-enters a loop body.
bool needs_full_expansion(const Expansion& x, const std::vector<std::size_t>& amp,
                          const std::vector<bool>& successor_on_path);

enum class Independence { Independent, Dependent, NotCoenabled };

struct IndependenceReport {
  Independence verdict = Independence::NotCoenabled;
  std::string reason;  // why the pair is dependent
};

/// Executes a·b and b·a from `s` and compares the canonical results. Both
/// transitions must be enabled in `s`; each must stay enabled after the other.
IndependenceReport check_independence(sem::Engine& e, const model::SystemState& s, const sem::TransitionId& a,
                                      const sem::TransitionId& b);

/// Labels the pair kinds that the reduction treats as independent.
bool claimed_independent(const Transition& a, const Transition& b);

}  // namespace plcnet::por
