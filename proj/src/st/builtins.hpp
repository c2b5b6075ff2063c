#pragma once

#include "st/ast.hpp"

#include <vector>

namespace plcnet::st {

/// ST source of the CONNECT, USEND and URCV function blocks.
const char* builtin_source();
const std::vector<PouDecl>& builtin_pous();

}  // namespace plcnet::st
