#pragma once

#include "sym/formula.hpp"

#include <optional>
#include <set>
#include <vector>

namespace plcnet::sym {

/// Decides a conjunction of linear atoms over the reals by equality
/// substitution followed by Fourier-Motzkin elimination. Ne atoms must have
/// been split by the caller. When sat, `model` assigns every variable of the
/// input (and every variable in `extra`).
struct LinearResult {
  bool sat = false;
  Model model;
};

LinearResult check_linear(const std::vector<Atom>& atoms, const std::set<VarId>& extra = {});

/// Existentially eliminates `elim` from a conjunction of linear atoms.
/// Returns nullopt when the conjunction is unsatisfiable. Ne atoms that mention
/// an eliminated variable are rejected with std::invalid_argument.
std::optional<std::vector<Atom>> project_linear(const std::vector<Atom>& atoms, const std::set<VarId>& elim);

}  // namespace plcnet::sym
