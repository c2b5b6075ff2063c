#pragma once

#include "st/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace plcnet::st {

struct Token {
  enum class Kind { Keyword, Ident, Int, Real, String, Op, Annotation, Eof };
  Kind kind = Kind::Eof;
  std::string text;  // exact source slice (keywords are matched case-insensitively; see `upper`)
  std::string upper; // keyword text in upper case
  Pos pos;
  std::size_t offset = 0;
  Annotation annot;  // Annotation tokens only
};

const char* token_kind_name(Token::Kind k);

/// Splits ST source into tokens. `//assertTime(..)` and `//delay(..)` become
/// annotation tokens; other comments and whitespace are skipped. The final
/// token is always Eof.
std::vector<Token> tokenize(std::string_view source);

}  // namespace plcnet::st
