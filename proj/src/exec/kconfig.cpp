#include "exec/kconfig.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace plcnet::exec {

using st::BaseType;
using st::Expr;
using st::Stmt;

std::vector<int> Layout::program_locs(const std::string& name, st::VarSection sec) const {
  std::vector<int> out;
  for (int f : program_frames) {
    const Frame& fr = frames[static_cast<std::size_t>(f)];
    const st::VarInfo* v = fr.pou->find(name);
    if (v && v->section == sec && v->type != BaseType::Fb) out.push_back(fr.slot[static_cast<std::size_t>(v->index)]);
  }
  return out;
}

std::vector<int> Layout::program_locs_any(const std::string& name) const {
  std::vector<int> out;
  for (int f : program_frames) {
    const Frame& fr = frames[static_cast<std::size_t>(f)];
    const st::VarInfo* v = fr.pou->find(name);
    if (v && v->type != BaseType::Fb) out.push_back(fr.slot[static_cast<std::size_t>(v->index)]);
  }
  return out;
}

std::optional<int> Layout::loc_by_path(const std::string& path) const {
  for (std::size_t i = 0; i < loc_names.size(); ++i)
    if (loc_names[i] == path) return static_cast<int>(i);
  return std::nullopt;
}

int KConfig::current_frame() const {
  if (stack.empty()) throw std::logic_error("no active frame");
  return stack.back();
}

std::string KConfig::control_key() const {
  std::ostringstream o;
  o << "k[";
  for (const auto& it : k) {
    switch (it.kind) {
      case KItem::Kind::Stmt: o << 'S' << layout->stmt_ids.at(it.stmt); break;
      case KItem::Kind::EnterProgram: o << 'E' << it.arg; break;
      case KItem::Kind::ProgramEnd: o << 'P' << it.arg; break;
      case KItem::Kind::FbExit: o << 'X' << it.arg; break;
    }
    o << ' ';
  }
  o << "]s[";
  for (int f : stack) o << f << ' ';
  o << "]d[";
  for (const auto& d : done) o << d << ' ';
  o << "]";
  if (pending) o << "p(" << value_str(*pending) << ")";
  return o.str();
}

Value default_value(BaseType t) {
  switch (t) {
    case BaseType::Bool: return false;
    case BaseType::String: return std::string();
    default: return sym::Poly();
  }
}

namespace {

void number_stmts(Layout& L, const st::Block& b, int pou) {
  for (const auto& s : b) {
    int id = static_cast<int>(L.stmts.size());
    L.stmt_ids[s.get()] = id;
    L.stmts.push_back(s.get());
    L.stmt_pou.push_back(pou);
    number_stmts(L, s->then_body, pou);
    number_stmts(L, s->else_body, pou);
  }
}

Value eval_const(const Expr& e);

int make_frame(Layout& L, std::vector<Value>& init, const st::PouInfo& pou, const std::string& path,
               const std::string& instance) {
  int id = static_cast<int>(L.frames.size());
  L.frames.push_back(Frame{&pou, path, instance, {}});
  std::vector<int> slots(pou.vars.size(), -1);
  for (const auto& v : pou.vars) {
    std::string p = path + "." + v.name;
    if (v.type == BaseType::Fb) {
      slots[static_cast<std::size_t>(v.index)] = make_frame(L, init, *L.pous.at(v.fb_type), p, v.name);
    } else {
      slots[static_cast<std::size_t>(v.index)] = static_cast<int>(L.loc_names.size());
      L.loc_names.push_back(p);
      L.loc_types.push_back(v.type);
      init.push_back(v.init ? eval_const(*v.init) : default_value(v.type));
    }
  }
  L.frames[static_cast<std::size_t>(id)].slot = std::move(slots);
  return id;
}

// --- expression evaluation --------------------------------------------------

Value bool_value(const sym::Formula& f) { return normalize(Value(f)); }

sym::Formula iff(const sym::Formula& a, const sym::Formula& b) { return (a && b) || (!a && !b); }

Value equals(const Value& a, const Value& b) {
  if (std::holds_alternative<RcvError>(a) || std::holds_alternative<RcvError>(b))
    return std::holds_alternative<RcvError>(a) && std::holds_alternative<RcvError>(b);
  bool ab = std::holds_alternative<bool>(a) || std::holds_alternative<sym::Formula>(a);
  bool bb = std::holds_alternative<bool>(b) || std::holds_alternative<sym::Formula>(b);
  if (ab && bb) return bool_value(iff(as_formula(a), as_formula(b)));
  if (std::holds_alternative<sym::Poly>(a) && std::holds_alternative<sym::Poly>(b))
    return bool_value(sym::Formula::eq(std::get<sym::Poly>(a), std::get<sym::Poly>(b)));
  if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b))
    return std::get<std::string>(a) == std::get<std::string>(b);
  return false;  // values of different kinds (ANY) are never equal
}

Value apply_binary(const std::string& op, const Value& a, const Value& b) {
  if (op == "AND") return bool_value(as_formula(a) && as_formula(b));
  if (op == "OR") return bool_value(as_formula(a) || as_formula(b));
  if (op == "XOR") return bool_value(!iff(as_formula(a), as_formula(b)));
  if (op == "=") return equals(a, b);
  if (op == "<>") {
    Value e = equals(a, b);
    return bool_value(!as_formula(e));
  }
  const sym::Poly& x = as_poly(a);
  const sym::Poly& y = as_poly(b);
  if (op == "+") return x + y;
  if (op == "-") return x - y;
  if (op == "*") return x * y;
  if (op == "/") {
    if (!y.is_constant()) throw std::runtime_error("division by a symbolic value is not supported");
    if (y.is_zero()) throw std::runtime_error("division by zero");
    return x.scaled(1 / y.constant_value());
  }
  if (op == "MOD") {
    if (!x.is_constant() || !y.is_constant()) throw std::runtime_error("MOD of symbolic values is not supported");
    Rational xv = x.constant_value(), yv = y.constant_value();
    if (!is_integer(xv) || !is_integer(yv)) throw std::runtime_error("MOD expects integers");
    if (yv == 0) throw std::runtime_error("division by zero");
    mpz_class r = xv.get_num() % yv.get_num();
    return sym::Poly(Rational(r));
  }
  if (op == "<") return bool_value(sym::Formula::lt(x, y));
  if (op == "<=") return bool_value(sym::Formula::le(x, y));
  if (op == ">") return bool_value(sym::Formula::gt(x, y));
  if (op == ">=") return bool_value(sym::Formula::ge(x, y));
  throw std::runtime_error("unknown operator " + op);
}

struct Evaluator {
  const KConfig* cfg;  // null for constant evaluation
  int frame;
  const Value* pending;

  Value operator()(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Bool: return e.b;
      case Expr::Kind::Num: return sym::Poly(e.num);
      case Expr::Kind::Str: return e.name;
      case Expr::Kind::Var: {
        const Frame& fr = cfg->layout->frames[static_cast<std::size_t>(frame)];
        const st::VarInfo* v = fr.pou->find(e.name);
        return cfg->store[static_cast<std::size_t>(fr.slot[static_cast<std::size_t>(v->index)])];
      }
      case Expr::Kind::Field: {
        const Layout& L = *cfg->layout;
        const Frame& fr = L.frames[static_cast<std::size_t>(frame)];
        const st::VarInfo* inst = fr.pou->find(e.name);
        const Frame& child = L.frames[static_cast<std::size_t>(fr.slot[static_cast<std::size_t>(inst->index)])];
        const st::VarInfo* out = child.pou->find(e.field);
        return cfg->store[static_cast<std::size_t>(child.slot[static_cast<std::size_t>(out->index)])];
      }
      case Expr::Kind::Unary: {
        Value v = (*this)(*e.args[0]);
        if (e.name == "NOT") return bool_value(!as_formula(v));
        return -as_poly(v);
      }
      case Expr::Kind::Binary: return apply_binary(e.name, (*this)(*e.args[0]), (*this)(*e.args[1]));
      case Expr::Kind::Intrinsic: {
        st::Intrinsic in = *st::intrinsic_by_name(e.name);
        if (in == st::Intrinsic::RcvError) return RcvError{};
        if (in == st::Intrinsic::ThisBlock) return cfg->layout->frames[static_cast<std::size_t>(frame)].instance;
        if (!pending) throw std::logic_error("intrinsic evaluated without a result");
        return *pending;
      }
    }
    throw std::logic_error("bad expression");
  }
};

Value eval_const(const Expr& e) { return Evaluator{nullptr, -1, nullptr}(e); }

const Expr* find_comm(const Expr* e) {
  if (!e) return nullptr;
  if (e->kind == Expr::Kind::Intrinsic && st::intrinsic_is_comm(*st::intrinsic_by_name(e->name))) return e;
  for (const auto& a : e->args)
    if (const Expr* f = find_comm(a.get())) return f;
  return nullptr;
}

void push_block(std::vector<KItem>& k, const st::Block& b) {
  for (auto it = b.rbegin(); it != b.rend(); ++it) k.push_back(KItem{KItem::Kind::Stmt, it->get(), -1});
}

Value coerce(const Value& v, BaseType t, const std::string& name) {
  bool ok = true;
  switch (t) {
    case BaseType::Bool: ok = std::holds_alternative<bool>(v) || std::holds_alternative<sym::Formula>(v); break;
    case BaseType::Int:
    case BaseType::Real: ok = std::holds_alternative<sym::Poly>(v); break;
    case BaseType::String: ok = std::holds_alternative<std::string>(v); break;
    default: break;
  }
  if (!ok) throw std::runtime_error("type mismatch assigning " + value_str(v) + " to " + name);
  return v;
}

void pop_to_marker(KConfig& c) {
  while (!c.k.empty() && c.k.back().kind != KItem::Kind::ProgramEnd && c.k.back().kind != KItem::Kind::FbExit)
    c.k.pop_back();
}

}  // namespace

Value eval_in(const KConfig& cfg, int frame, const Expr& e) { return Evaluator{&cfg, frame, nullptr}(e); }

void normalize(KConfig& c) {
  while (!c.k.empty()) {
    const KItem it = c.k.back();
    if (it.kind == KItem::Kind::EnterProgram) {
      c.stack.assign(1, c.layout->program_frames[static_cast<std::size_t>(it.arg)]);
    } else if (it.kind == KItem::Kind::ProgramEnd) {
      c.done.push_back(c.layout->programs[static_cast<std::size_t>(it.arg)]);
      c.stack.clear();
    } else if (it.kind == KItem::Kind::FbExit) {
      c.stack.pop_back();
    } else if (it.stmt->kind == Stmt::Kind::Empty) {
      // nothing
    } else {
      break;
    }
    c.k.pop_back();
  }
}

KConfig idle_config(const st::PouTable& pous, const std::vector<std::string>& programs, const Rational& cycle_time) {
  auto L = std::make_shared<Layout>();
  L->pous = pous;
  L->programs = programs;
  for (const auto& [name, info] : pous) {
    L->pou_names.push_back(name);
    number_stmts(*L, info->decl.body, static_cast<int>(L->pou_names.size()) - 1);
  }
  std::vector<Value> init;
  for (const auto& p : programs) {
    auto it = pous.find(p);
    if (it == pous.end()) throw std::invalid_argument("unknown program '" + p + "'");
    if (it->second->decl.kind != st::PouDecl::Kind::Program)
      throw std::invalid_argument("'" + p + "' is a function block, not a program");
    L->program_frames.push_back(make_frame(*L, init, *it->second, p, p));
  }
  KConfig c;
  c.layout = std::move(L);
  c.store = std::move(init);
  c.done = programs;
  c.cycle_time = cycle_time;
  return c;
}

bool is_cycle_complete(const KConfig& cfg) { return cfg.k.empty() && cfg.done == cfg.plist(); }

KConfig load_programs(const KConfig& cfg) {
  if (!is_cycle_complete(cfg)) throw std::logic_error("load_programs: previous cycle has not completed");
  KConfig c = cfg;
  c.done.clear();
  c.stack.clear();
  c.pending.reset();
  const Layout& L = *c.layout;
  for (int i = static_cast<int>(L.programs.size()) - 1; i >= 0; --i) {
    c.k.push_back(KItem{KItem::Kind::ProgramEnd, nullptr, i});
    push_block(c.k, L.pous.at(L.programs[static_cast<std::size_t>(i)])->decl.body);
    c.k.push_back(KItem{KItem::Kind::EnterProgram, nullptr, i});
  }
  normalize(c);
  return c;
}

StepResult step(const KConfig& cfg) {
  StepResult r;
  KConfig c = cfg;
  normalize(c);
  if (c.k.empty()) {
    r.kind = StepResult::Kind::Done;
    return r;
  }
  const Stmt& s = *c.k.back().stmt;
  r.stmt = &s;
  int frame = c.current_frame();
  const Layout& L = *c.layout;
  const Frame& fr = L.frames[static_cast<std::size_t>(frame)];
  try {
    // surface a communication intrinsic before anything else
    const Expr* comm = find_comm(s.expr.get());
    if (comm && !c.pending) {
      r.kind = StepResult::Kind::NeedsComm;
      r.comm.op = *st::intrinsic_by_name(comm->name);
      r.comm.block = fr.path;
      Evaluator ev{&c, frame, nullptr};
      for (const auto& a : comm->args) r.comm.args.push_back(ev(*a));
      return r;
    }
    Evaluator ev{&c, frame, c.pending ? &*c.pending : nullptr};
    switch (s.kind) {
      case Stmt::Kind::Annot:
        c.k.pop_back();
        normalize(c);
        r.kind = s.annot.kind == st::Annotation::Kind::AssertTime ? StepResult::Kind::AssertTime : StepResult::Kind::Delay;
        r.label = s.annot.kind == st::Annotation::Kind::AssertTime ? "assertTime" : "delaySet";
        r.annot = s.annot;
        r.next = std::move(c);
        return r;
      case Stmt::Kind::Return:
        pop_to_marker(c);
        r.label = "return";
        break;
      case Stmt::Kind::Assign: {
        const st::VarInfo* v = fr.pou->find(s.target);
        Value val = coerce(normalize(ev(*s.expr)), v->type, fr.path + "." + s.target);
        c.store[static_cast<std::size_t>(fr.slot[static_cast<std::size_t>(v->index)])] = std::move(val);
        c.k.pop_back();
        c.pending.reset();
        r.label = "assign";
        break;
      }
      case Stmt::Kind::If:
      case Stmt::Kind::While: {
        Value cond = normalize(ev(*s.expr));
        sym::Formula f = as_formula(cond);
        c.pending.reset();
        bool is_if = s.kind == Stmt::Kind::If;
        auto take = [&](KConfig base, bool branch) {
          if (is_if) {
            base.k.pop_back();
            push_block(base.k, branch ? s.then_body : s.else_body);
          } else if (branch) {
            push_block(base.k, s.then_body);  // the WHILE item stays below as the re-test
          } else {
            base.k.pop_back();
          }
          normalize(base);
          return base;
        };
        if (f.is_true() || f.is_false()) {
          bool b = f.is_true();
          r.label = std::string(is_if ? "if-" : "while-") + (b ? "true" : "false");
          r.back_edge = !is_if && b;
          r.kind = StepResult::Kind::Internal;
          r.next = take(c, b);
          return r;
        }
        r.kind = StepResult::Kind::Branch;
        r.label = is_if ? "if" : "while";
        r.cond = f;
        r.back_edge = !is_if;
        r.next = take(c, true);
        r.other = take(std::move(c), false);
        return r;
      }
      case Stmt::Kind::FbCall: {
        const st::VarInfo* inst = fr.pou->find(s.target);
        int child = fr.slot[static_cast<std::size_t>(inst->index)];
        const Frame& cf = L.frames[static_cast<std::size_t>(child)];
        for (std::size_t i = 0; i < s.args.size(); ++i) {
          const st::VarInfo* in = s.args[i].name.empty() ? &cf.pou->vars[static_cast<std::size_t>(cf.pou->inputs[i])]
                                                         : cf.pou->find(s.args[i].name);
          Value val = coerce(normalize(ev(*s.args[i].value)), in->type, cf.path + "." + in->name);
          c.store[static_cast<std::size_t>(cf.slot[static_cast<std::size_t>(in->index)])] = std::move(val);
        }
        c.k.pop_back();
        c.k.push_back(KItem{KItem::Kind::FbExit, nullptr, child});
        push_block(c.k, cf.pou->decl.body);
        c.stack.push_back(child);
        r.label = "fbCall";
        break;
      }
      case Stmt::Kind::Call:
        // only reachable with a pending result; resume() normally consumes these
        c.k.pop_back();
        c.pending.reset();
        r.label = "call";
        break;
      case Stmt::Kind::Empty:
        c.k.pop_back();
        r.label = "skip";
        break;
    }
  } catch (const std::runtime_error& e) {
    r.kind = StepResult::Kind::Error;
    r.error = fr.path + ": line " + std::to_string(s.pos.line) + ": " + e.what();
    return r;
  }
  normalize(c);
  r.kind = StepResult::Kind::Internal;
  r.next = std::move(c);
  return r;
}

KConfig resume(const KConfig& cfg, Value result) {
  KConfig c = cfg;
  normalize(c);
  if (c.k.empty() || c.k.back().kind != KItem::Kind::Stmt) throw std::logic_error("resume without a pending intrinsic");
  if (c.k.back().stmt->kind == Stmt::Kind::Call) {
    c.k.pop_back();
    c.pending.reset();
  } else {
    c.pending = normalize(std::move(result));
  }
  normalize(c);
  return c;
}

KConfig rename_vars(const KConfig& cfg, const std::map<sym::VarId, sym::VarId>& ren) {
  KConfig c = cfg;
  for (auto& v : c.store) v = rename(v, ren);
  if (c.pending) c.pending = rename(*c.pending, ren);
  return c;
}

KConfig substitute_vars(const KConfig& cfg, const std::map<sym::VarId, sym::Poly>& sub) {
  KConfig c = cfg;
  for (auto& v : c.store) v = substitute(v, sub);
  if (c.pending) c.pending = substitute(*c.pending, sub);
  return c;
}

void collect_vars(const KConfig& cfg, std::set<sym::VarId>& out) {
  for (const auto& v : cfg.store) exec::collect_vars(v, out);
  if (cfg.pending) exec::collect_vars(*cfg.pending, out);
}

}  // namespace plcnet::exec
