#pragma once

#include "core/rational.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plcnet::st {

struct Pos {
  int line = 0;
  int col = 0;
};

/// Error with a source position; message already includes "line:col".
class SourceError : public std::runtime_error {
 public:
  SourceError(Pos pos, const std::string& what);
  Pos pos;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Bool, Num, Str, Var, Field, Unary, Binary, Intrinsic };
  Kind kind = Kind::Bool;
  Pos pos;
  bool b = false;
  Rational num;
  bool is_real = false;  // literal written with a decimal point
  std::string name;      // Var: variable; Field: instance; Str: literal; Intrinsic: name; Unary/Binary: operator
  std::string field;     // Field: output name
  std::vector<ExprPtr> args;
};

enum class Intrinsic { ConnectRequest, IsConnected, SendData, RcvData, Disconnect, ThisBlock, RcvError };
std::optional<Intrinsic> intrinsic_by_name(const std::string& name);
const char* intrinsic_name(Intrinsic i);
int intrinsic_arity(Intrinsic i);  // -1 for constants written without parentheses
/// Intrinsics that need a communication rule (everything but thisBlock / rcvError).
bool intrinsic_is_comm(Intrinsic i);

struct Annotation {
  enum class Kind { AssertTime, Delay };
  Kind kind = Kind::AssertTime;
  std::string src, dst;  // Delay only
  Rational min, max;
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

struct Arg {
  std::string name;  // empty for positional
  ExprPtr value;
};

struct Stmt {
  enum class Kind { Assign, If, While, Return, FbCall, Call, Annot, Empty };
  Kind kind = Kind::Empty;
  Pos pos;
  int id = -1;         // unique within its POU, set by the parser in source order
  std::string target;  // Assign: lhs variable; FbCall: instance
  ExprPtr expr;        // Assign: rhs; If/While: condition; Call: intrinsic expression
  Block then_body;     // If: then; While: body
  Block else_body;     // If: else (ELSIF desugars to a nested IF here)
  std::vector<Arg> args;
  Annotation annot;
};

struct VarDecl {
  std::string name;
  std::string type;  // BOOL, INT, DINT, REAL, STRING, ANY or a function block name
  ExprPtr init;      // may be null
  Pos pos;
};

struct PouDecl {
  enum class Kind { Program, FunctionBlock };
  Kind kind = Kind::Program;
  std::string name;
  std::vector<VarDecl> inputs, outputs, locals;
  Block body;
  Pos pos;
  int stmt_count = 0;
};

/// Structural equality ignoring positions and statement ids.
bool equal(const Expr& a, const Expr& b);
bool equal(const Stmt& a, const Stmt& b);
bool equal(const Block& a, const Block& b);
bool equal(const PouDecl& a, const PouDecl& b);

}  // namespace plcnet::st
