#include "st/elaborate.hpp"

#include "st/builtins.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace plcnet::st {

const VarInfo* PouInfo::find(const std::string& name) const {
  auto it = index.find(name);
  return it == index.end() ? nullptr : &vars[static_cast<std::size_t>(it->second)];
}

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

// static types used for checking only
enum class Ty { Bool, Num, Str, Any, Void };

const char* ty_name(Ty t) {
  switch (t) {
    case Ty::Bool: return "BOOL";
    case Ty::Num: return "numeric";
    case Ty::Str: return "STRING";
    case Ty::Any: return "ANY";
    case Ty::Void: return "no value";
  }
  return "?";
}

Ty ty_of(BaseType b) {
  switch (b) {
    case BaseType::Bool: return Ty::Bool;
    case BaseType::Int:
    case BaseType::Real: return Ty::Num;
    case BaseType::String: return Ty::Str;
    case BaseType::Any: return Ty::Any;
    case BaseType::Fb: return Ty::Void;
  }
  return Ty::Any;
}

bool compatible(Ty target, Ty value) {
  if (value == Ty::Void) return false;
  return target == Ty::Any || value == Ty::Any || target == value;
}

class Checker {
 public:
  Checker(const std::map<std::string, PouInfo*>& table, PouInfo& pou) : table_(table), pou_(pou) {}

  void run() {
    for (const auto& v : pou_.vars) {
      if (!v.init) continue;
      if (v.type == BaseType::Fb) throw SourceError(v.init->pos, "function block instance '" + v.name + "' cannot have an initializer");
      constant_only(*v.init);
      Ty t = expr(*v.init, nullptr);
      if (!compatible(ty_of(v.type), t))
        throw SourceError(v.init->pos, "initializer of '" + v.name + "' has type " + ty_name(t));
    }
    block(pou_.decl.body);
  }

 private:
  void constant_only(const Expr& e) {
    if (e.kind == Expr::Kind::Var || e.kind == Expr::Kind::Field || e.kind == Expr::Kind::Intrinsic)
      throw SourceError(e.pos, "initializers must be constant");
    for (const auto& a : e.args) constant_only(*a);
  }

  void block(const Block& b) {
    for (const auto& s : b) stmt(*s);
  }

  void stmt(const Stmt& s) {
    int comm = 0;
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        const VarInfo* v = pou_.find(s.target);
        if (!v) throw SourceError(s.pos, "undeclared variable '" + s.target + "'");
        if (v->type == BaseType::Fb) throw SourceError(s.pos, "cannot assign to function block instance '" + s.target + "'");
        Ty t = expr(*s.expr, &comm);
        if (!compatible(ty_of(v->type), t))
          throw SourceError(s.pos, "cannot assign " + std::string(ty_name(t)) + " to '" + s.target + "'");
        break;
      }
      case Stmt::Kind::If:
      case Stmt::Kind::While: {
        Ty t = expr(*s.expr, &comm);
        if (!compatible(Ty::Bool, t)) throw SourceError(s.expr->pos, "condition must be BOOL");
        if (s.kind == Stmt::Kind::While) pou_.has_while = true;
        block(s.then_body);
        block(s.else_body);
        break;
      }
      case Stmt::Kind::Call: expr(*s.expr, &comm, true); break;
      case Stmt::Kind::FbCall: {
        const VarInfo* v = pou_.find(s.target);
        if (!v) throw SourceError(s.pos, "undeclared function block instance '" + s.target + "'");
        if (v->type != BaseType::Fb) throw SourceError(s.pos, "'" + s.target + "' is not a function block instance");
        const PouInfo& fb = *table_.at(v->fb_type);
        std::set<std::string> bound;
        bool named = false;
        for (std::size_t i = 0; i < s.args.size(); ++i) {
          const Arg& a = s.args[i];
          const VarInfo* in = nullptr;
          if (a.name.empty()) {
            if (named) throw SourceError(a.value->pos, "positional argument after named argument");
            if (i >= fb.inputs.size()) throw SourceError(a.value->pos, "too many arguments for " + fb.decl.name);
            in = &fb.vars[static_cast<std::size_t>(fb.inputs[i])];
          } else {
            named = true;
            in = fb.find(a.name);
            if (!in || in->section != VarSection::Input)
              throw SourceError(a.value->pos, fb.decl.name + " has no input '" + a.name + "'");
          }
          if (!bound.insert(in->name).second) throw SourceError(a.value->pos, "input '" + in->name + "' bound twice");
          int no_comm = 0;
          Ty t = expr(*a.value, &no_comm);
          if (no_comm) throw SourceError(a.value->pos, "communication operations are not allowed in call arguments");
          if (!compatible(ty_of(in->type), t))
            throw SourceError(a.value->pos, "argument for '" + in->name + "' has type " + ty_name(t));
        }
        break;
      }
      case Stmt::Kind::Return:
      case Stmt::Kind::Annot:
      case Stmt::Kind::Empty: break;
    }
    if (comm > 1) throw SourceError(s.pos, "at most one communication operation per statement");
  }

  Ty expr(const Expr& e, int* comm, bool statement_position = false) {
    switch (e.kind) {
      case Expr::Kind::Bool: return Ty::Bool;
      case Expr::Kind::Num: return Ty::Num;
      case Expr::Kind::Str: return Ty::Str;
      case Expr::Kind::Var: {
        const VarInfo* v = pou_.find(e.name);
        if (!v) throw SourceError(e.pos, "undeclared variable '" + e.name + "'");
        if (v->type == BaseType::Fb) throw SourceError(e.pos, "function block instance '" + e.name + "' used as a value");
        return ty_of(v->type);
      }
      case Expr::Kind::Field: {
        const VarInfo* v = pou_.find(e.name);
        if (!v || v->type != BaseType::Fb)
          throw SourceError(e.pos, "'" + e.name + "' is not a function block instance");
        const PouInfo& fb = *table_.at(v->fb_type);
        const VarInfo* out = fb.find(e.field);
        if (!out || out->section != VarSection::Output)
          throw SourceError(e.pos, fb.decl.name + " has no output '" + e.field + "'");
        return ty_of(out->type);
      }
      case Expr::Kind::Unary: {
        Ty t = expr(*e.args[0], comm);
        if (e.name == "NOT") {
          if (!compatible(Ty::Bool, t)) throw SourceError(e.pos, "NOT expects BOOL");
          return Ty::Bool;
        }
        if (!compatible(Ty::Num, t)) throw SourceError(e.pos, "unary minus expects a number");
        return Ty::Num;
      }
      case Expr::Kind::Binary: {
        Ty l = expr(*e.args[0], comm);
        Ty r = expr(*e.args[1], comm);
        const std::string& op = e.name;
        if (op == "AND" || op == "OR" || op == "XOR") {
          if (!compatible(Ty::Bool, l) || !compatible(Ty::Bool, r)) throw SourceError(e.pos, op + " expects BOOL operands");
          return Ty::Bool;
        }
        if (op == "=" || op == "<>") {
          if (!compatible(l, r)) throw SourceError(e.pos, "cannot compare " + std::string(ty_name(l)) + " with " + ty_name(r));
          return Ty::Bool;
        }
        if (!compatible(Ty::Num, l) || !compatible(Ty::Num, r)) throw SourceError(e.pos, "'" + op + "' expects numbers");
        if (op == "<" || op == "<=" || op == ">" || op == ">=") return Ty::Bool;
        return Ty::Num;
      }
      case Expr::Kind::Intrinsic: {
        Intrinsic in = *intrinsic_by_name(e.name);
        int arity = intrinsic_arity(in);
        if (arity >= 0 && static_cast<int>(e.args.size()) != arity)
          throw SourceError(e.pos, e.name + " takes " + std::to_string(arity) + " arguments");
        if (in == Intrinsic::ThisBlock && pou_.decl.kind != PouDecl::Kind::FunctionBlock)
          throw SourceError(e.pos, "thisBlock is only meaningful inside a function block");
        if (intrinsic_is_comm(in)) {
          if (!comm) throw SourceError(e.pos, e.name + " is not allowed here");
          ++*comm;
        }
        for (std::size_t i = 0; i < e.args.size(); ++i) {
          int nested = 0;
          Ty t = expr(*e.args[i], &nested);
          if (nested) throw SourceError(e.args[i]->pos, "nested communication operation");
          bool is_data = in == Intrinsic::SendData && i == 3;
          if (!is_data && !compatible(Ty::Str, t)) throw SourceError(e.args[i]->pos, e.name + " expects STRING arguments");
        }
        bool needs_statement = in == Intrinsic::ConnectRequest || in == Intrinsic::Disconnect;
        if (needs_statement && !statement_position) throw SourceError(e.pos, e.name + " has no value");
        switch (in) {
          case Intrinsic::IsConnected:
          case Intrinsic::SendData: return Ty::Bool;
          case Intrinsic::RcvData:
          case Intrinsic::RcvError: return Ty::Any;
          case Intrinsic::ThisBlock: return Ty::Str;
          default: return Ty::Void;
        }
      }
    }
    return Ty::Any;
  }

  const std::map<std::string, PouInfo*>& table_;
  PouInfo& pou_;
};

}  // namespace

bool is_elementary(const std::string& type_name) {
  static const std::set<std::string> names{"BOOL", "INT", "DINT", "SINT", "LINT", "UINT", "UDINT", "REAL", "LREAL", "STRING", "ANY"};
  return names.count(upper(type_name)) > 0;
}

BaseType base_type_of(const std::string& type_name) {
  std::string u = upper(type_name);
  if (u == "BOOL") return BaseType::Bool;
  if (u == "REAL" || u == "LREAL") return BaseType::Real;
  if (u == "STRING") return BaseType::String;
  if (u == "ANY") return BaseType::Any;
  if (is_elementary(u)) return BaseType::Int;
  return BaseType::Fb;
}

PouTable elaborate(const std::vector<PouDecl>& decls) {
  std::map<std::string, std::unique_ptr<PouInfo>> owned;
  std::map<std::string, PouInfo*> table;
  for (const auto& d : decls) {
    if (table.count(d.name)) throw SourceError(d.pos, "duplicate POU name '" + d.name + "'");
    if (is_elementary(d.name)) throw SourceError(d.pos, "POU name '" + d.name + "' clashes with a type");
    auto info = std::make_unique<PouInfo>();
    info->decl = d;
    table[d.name] = info.get();
    owned[d.name] = std::move(info);
  }
  for (auto& [name, info] : table) {
    auto add = [&](const std::vector<VarDecl>& vs, VarSection sec) {
      for (const auto& v : vs) {
        if (info->index.count(v.name)) throw SourceError(v.pos, "duplicate variable '" + v.name + "' in " + name);
        VarInfo vi{v.name, sec, base_type_of(v.type), "", v.init, static_cast<int>(info->vars.size())};
        if (vi.type == BaseType::Fb) {
          auto it = table.find(v.type);
          if (it == table.end()) throw SourceError(v.pos, "unknown type '" + v.type + "'");
          if (it->second->decl.kind != PouDecl::Kind::FunctionBlock)
            throw SourceError(v.pos, "'" + v.type + "' is a program, not a function block");
          if (sec != VarSection::Local) throw SourceError(v.pos, "function block instances must be local variables");
          vi.fb_type = v.type;
        }
        info->index[v.name] = vi.index;
        if (sec == VarSection::Input) info->inputs.push_back(vi.index);
        if (sec == VarSection::Output) info->outputs.push_back(vi.index);
        info->vars.push_back(std::move(vi));
      }
    };
    add(info->decl.inputs, VarSection::Input);
    add(info->decl.outputs, VarSection::Output);
    add(info->decl.locals, VarSection::Local);
  }
  // instance graph must be acyclic
  std::map<std::string, int> mark;
  std::function<void(const PouInfo&)> visit = [&](const PouInfo& p) {
    mark[p.decl.name] = 1;
    for (const auto& v : p.vars) {
      if (v.type != BaseType::Fb) continue;
      int m = mark[v.fb_type];
      if (m == 1) throw SourceError(p.decl.pos, "recursive function block instantiation through '" + v.fb_type + "'");
      if (m == 0) visit(*table.at(v.fb_type));
    }
    mark[p.decl.name] = 2;
  };
  for (auto& [name, info] : table)
    if (mark[name] == 0) visit(*info);
  for (auto& [name, info] : table) Checker(table, *info).run();
  PouTable out;
  for (auto& [name, info] : owned) out[name] = std::shared_ptr<const PouInfo>(std::move(info));
  return out;
}

PouTable elaborate_with_builtins(const std::vector<PouDecl>& decls) {
  std::vector<PouDecl> all = builtin_pous();
  all.insert(all.end(), decls.begin(), decls.end());
  return elaborate(all);
}

}  // namespace plcnet::st
