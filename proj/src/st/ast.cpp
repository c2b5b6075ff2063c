#include "st/ast.hpp"

namespace plcnet::st {

std::optional<Intrinsic> intrinsic_by_name(const std::string& name) {
  if (name == "connectRequest") return Intrinsic::ConnectRequest;
  if (name == "isConnected") return Intrinsic::IsConnected;
  if (name == "sendData") return Intrinsic::SendData;
  if (name == "rcvData") return Intrinsic::RcvData;
  if (name == "disconnect") return Intrinsic::Disconnect;
  if (name == "thisBlock") return Intrinsic::ThisBlock;
  if (name == "rcvError") return Intrinsic::RcvError;
  return std::nullopt;
}

const char* intrinsic_name(Intrinsic i) {
  switch (i) {
    case Intrinsic::ConnectRequest: return "connectRequest";
    case Intrinsic::IsConnected: return "isConnected";
    case Intrinsic::SendData: return "sendData";
    case Intrinsic::RcvData: return "rcvData";
    case Intrinsic::Disconnect: return "disconnect";
    case Intrinsic::ThisBlock: return "thisBlock";
    case Intrinsic::RcvError: return "rcvError";
  }
  return "?";
}

int intrinsic_arity(Intrinsic i) {
  switch (i) {
    case Intrinsic::ConnectRequest:
    case Intrinsic::IsConnected:
    case Intrinsic::Disconnect: return 1;
    case Intrinsic::SendData: return 4;
    case Intrinsic::RcvData: return 3;
    case Intrinsic::ThisBlock:
    case Intrinsic::RcvError: return -1;
  }
  return -1;
}

bool intrinsic_is_comm(Intrinsic i) { return intrinsic_arity(i) >= 0; }

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.field != b.field || a.args.size() != b.args.size()) return false;
  if (a.kind == Expr::Kind::Bool && a.b != b.b) return false;
  if (a.kind == Expr::Kind::Num && a.num != b.num) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal(*a.args[i], *b.args[i])) return false;
  return true;
}

static bool equal_opt(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

bool equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.target != b.target || !equal_opt(a.expr, b.expr)) return false;
  if (!equal(a.then_body, b.then_body) || !equal(a.else_body, b.else_body)) return false;
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (a.args[i].name != b.args[i].name || !equal(*a.args[i].value, *b.args[i].value)) return false;
  if (a.kind == Stmt::Kind::Annot) {
    const auto &x = a.annot, &y = b.annot;
    if (x.kind != y.kind || x.src != y.src || x.dst != y.dst || x.min != y.min || x.max != y.max) return false;
  }
  return true;
}

bool equal(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(*a[i], *b[i])) return false;
  return true;
}

static bool equal_vars(const std::vector<VarDecl>& a, const std::vector<VarDecl>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || a[i].type != b[i].type || !equal_opt(a[i].init, b[i].init)) return false;
  return true;
}

bool equal(const PouDecl& a, const PouDecl& b) {
  return a.kind == b.kind && a.name == b.name && equal_vars(a.inputs, b.inputs) && equal_vars(a.outputs, b.outputs) &&
         equal_vars(a.locals, b.locals) && equal(a.body, b.body);
}

}  // namespace plcnet::st
