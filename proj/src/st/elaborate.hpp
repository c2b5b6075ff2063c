#pragma once

#include "st/ast.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace plcnet::st {

enum class VarSection { Input, Output, Local };
enum class BaseType { Bool, Int, Real, String, Any, Fb };

struct VarInfo {
  std::string name;
  VarSection section;
  BaseType type;
  std::string fb_type;  // Fb only
  ExprPtr init;
  int index;  // position in PouInfo::vars
};

struct PouInfo {
  PouDecl decl;
  std::vector<VarInfo> vars;  // inputs, then outputs, then locals
  std::map<std::string, int> index;
  std::vector<int> inputs, outputs;  // indices in declaration order
  bool has_while = false;

  const VarInfo* find(const std::string& name) const;
};

using PouTable = std::map<std::string, std::shared_ptr<const PouInfo>>;

/// Resolves and checks a set of POUs. Throws SourceError (duplicate names,
/// unknown types, unresolved references, type mismatches, recursion).
PouTable elaborate(const std::vector<PouDecl>& decls);

/// Builtin communication blocks followed by `decls`.
PouTable elaborate_with_builtins(const std::vector<PouDecl>& decls);

BaseType base_type_of(const std::string& type_name);  // Fb for non-elementary names
bool is_elementary(const std::string& type_name);

}  // namespace plcnet::st
