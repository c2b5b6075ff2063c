#pragma once

#include "st/ast.hpp"
#include "st/lexer.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace plcnet::st {

std::vector<PouDecl> parse(const std::vector<Token>& tokens);
std::vector<PouDecl> parse_source(std::string_view source);

/// Parses a standalone expression (used for query predicates and flows).
ExprPtr parse_expression(std::string_view source);

std::string print(const PouDecl& pou);
std::string print(const Expr& e);

}  // namespace plcnet::st
