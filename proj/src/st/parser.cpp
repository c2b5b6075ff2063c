#include "st/parser.hpp"

#include <sstream>

namespace plcnet::st {

namespace {

class Parser {
 public:
  explicit Parser(const std::vector<Token>& t) : t_(t) {}

  std::vector<PouDecl> file() {
    std::vector<PouDecl> out;
    while (!at_eof()) out.push_back(pou());
    return out;
  }

  ExprPtr lone_expr() {
    ExprPtr e = expr();
    if (!at_eof()) fail("end of expression");
    return e;
  }

 private:
  const Token& cur() const { return t_[i_]; }
  bool at_eof() const { return cur().kind == Token::Kind::Eof; }
  bool is_kw(const char* kw) const { return cur().kind == Token::Kind::Keyword && cur().upper == kw; }
  bool is_op(const char* op) const { return cur().kind == Token::Kind::Op && cur().text == op; }

  [[noreturn]] void fail(const std::string& expected) const {
    std::string got = at_eof() ? "end of input" : std::string(token_kind_name(cur().kind)) + " '" + cur().text + "'";
    throw SourceError(cur().pos, "expected " + expected + ", got " + got);
  }
  void expect_kw(const char* kw) {
    if (!is_kw(kw)) fail(std::string("'") + kw + "'");
    ++i_;
  }
  void expect_op(const char* op) {
    if (!is_op(op)) fail(std::string("'") + op + "'");
    ++i_;
  }
  bool accept_op(const char* op) {
    if (!is_op(op)) return false;
    ++i_;
    return true;
  }
  std::string ident(const char* what = "identifier") {
    if (cur().kind != Token::Kind::Ident) fail(what);
    return t_[i_++].text;
  }

  PouDecl pou() {
    PouDecl p;
    p.pos = cur().pos;
    const char* end_kw;
    if (is_kw("PROGRAM")) {
      p.kind = PouDecl::Kind::Program;
      end_kw = "END_PROGRAM";
    } else if (is_kw("FUNCTION_BLOCK")) {
      p.kind = PouDecl::Kind::FunctionBlock;
      end_kw = "END_FUNCTION_BLOCK";
    } else {
      fail("'PROGRAM' or 'FUNCTION_BLOCK'");
    }
    ++i_;
    p.name = ident("POU name");
    for (;;) {
      std::vector<VarDecl>* sec = nullptr;
      if (is_kw("VAR")) sec = &p.locals;
      if (is_kw("VAR_INPUT")) sec = &p.inputs;
      if (is_kw("VAR_OUTPUT")) sec = &p.outputs;
      if (!sec) break;
      ++i_;
      while (!is_kw("END_VAR")) decls(*sec);
      ++i_;
      accept_op(";");
    }
    next_id_ = 0;
    p.body = block({end_kw});
    expect_kw(end_kw);
    accept_op(";");
    p.stmt_count = next_id_;
    return p;
  }

  void decls(std::vector<VarDecl>& out) {
    std::vector<std::pair<std::string, Pos>> names;
    do {
      Pos p = cur().pos;
      names.emplace_back(ident("variable name"), p);
    } while (accept_op(","));
    expect_op(":");
    std::string type = ident("type name");
    ExprPtr init;
    if (accept_op(":=")) init = expr();
    expect_op(";");
    for (auto& [n, p] : names) out.push_back(VarDecl{n, type, init, p});
  }

  bool at_block_end(std::initializer_list<const char*> enders) const {
    if (at_eof()) return true;
    for (const char* e : enders)
      if (is_kw(e)) return true;
    return false;
  }

  Block block(std::initializer_list<const char*> enders) {
    Block b;
    while (!at_block_end(enders)) b.push_back(stmt());
    return b;
  }

  StmtPtr stmt() {
    auto s = std::make_shared<Stmt>();
    s->pos = cur().pos;
    s->id = next_id_++;
    if (cur().kind == Token::Kind::Annotation) {
      s->kind = Stmt::Kind::Annot;
      s->annot = cur().annot;
      ++i_;
      return s;
    }
    if (accept_op(";")) {
      s->kind = Stmt::Kind::Empty;
      return s;
    }
    if (is_kw("RETURN")) {
      ++i_;
      expect_op(";");
      s->kind = Stmt::Kind::Return;
      return s;
    }
    if (is_kw("IF")) {
      ++i_;
      if_tail(*s);
      expect_kw("END_IF");
      accept_op(";");
      return s;
    }
    if (is_kw("WHILE")) {
      ++i_;
      s->kind = Stmt::Kind::While;
      s->expr = expr();
      expect_kw("DO");
      s->then_body = block({"END_WHILE"});
      expect_kw("END_WHILE");
      accept_op(";");
      return s;
    }
    if (cur().kind != Token::Kind::Ident) fail("statement");
    std::string name = t_[i_++].text;
    if (accept_op(":=")) {
      s->kind = Stmt::Kind::Assign;
      s->target = name;
      s->expr = expr();
      expect_op(";");
      return s;
    }
    if (!is_op("(")) fail("':=' or '('");
    if (intrinsic_by_name(name)) {
      s->kind = Stmt::Kind::Call;
      s->expr = intrinsic_call(name, s->pos);
      expect_op(";");
      return s;
    }
    ++i_;
    s->kind = Stmt::Kind::FbCall;
    s->target = name;
    if (!is_op(")")) {
      do {
        Arg a;
        if (cur().kind == Token::Kind::Ident && t_[i_ + 1].kind == Token::Kind::Op && t_[i_ + 1].text == ":=") {
          a.name = t_[i_].text;
          i_ += 2;
        }
        a.value = expr();
        s->args.push_back(std::move(a));
      } while (accept_op(","));
    }
    expect_op(")");
    expect_op(";");
    return s;
  }

  // after IF / ELSIF
  void if_tail(Stmt& s) {
    s.kind = Stmt::Kind::If;
    s.expr = expr();
    expect_kw("THEN");
    s.then_body = block({"ELSIF", "ELSE", "END_IF"});
    if (is_kw("ELSIF")) {
      auto nested = std::make_shared<Stmt>();
      nested->pos = cur().pos;
      nested->id = next_id_++;
      ++i_;
      if_tail(*nested);
      s.else_body.push_back(nested);
    } else if (is_kw("ELSE")) {
      ++i_;
      s.else_body = block({"END_IF"});
    }
  }

  ExprPtr intrinsic_call(const std::string& name, Pos p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Intrinsic;
    e->pos = p;
    e->name = name;
    expect_op("(");
    if (!is_op(")")) {
      do e->args.push_back(expr());
      while (accept_op(","));
    }
    expect_op(")");
    return e;
  }

  ExprPtr binary(const std::string& op, ExprPtr l, ExprPtr r, Pos p) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->pos = p;
    e->name = op;
    e->args = {std::move(l), std::move(r)};
    return e;
  }

  ExprPtr expr() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr l = xor_expr();
    while (is_kw("OR")) {
      Pos p = cur().pos;
      ++i_;
      l = binary("OR", l, xor_expr(), p);
    }
    return l;
  }
  ExprPtr xor_expr() {
    ExprPtr l = and_expr();
    while (is_kw("XOR")) {
      Pos p = cur().pos;
      ++i_;
      l = binary("XOR", l, and_expr(), p);
    }
    return l;
  }
  ExprPtr and_expr() {
    ExprPtr l = eq_expr();
    while (is_kw("AND")) {
      Pos p = cur().pos;
      ++i_;
      l = binary("AND", l, eq_expr(), p);
    }
    return l;
  }
  ExprPtr eq_expr() {
    ExprPtr l = rel_expr();
    while (is_op("=") || is_op("<>")) {
      Pos p = cur().pos;
      std::string op = t_[i_++].text;
      l = binary(op, l, rel_expr(), p);
    }
    return l;
  }
  ExprPtr rel_expr() {
    ExprPtr l = add_expr();
    while (is_op("<") || is_op("<=") || is_op(">") || is_op(">=")) {
      Pos p = cur().pos;
      std::string op = t_[i_++].text;
      l = binary(op, l, add_expr(), p);
    }
    return l;
  }
  ExprPtr add_expr() {
    ExprPtr l = mul_expr();
    while (is_op("+") || is_op("-")) {
      Pos p = cur().pos;
      std::string op = t_[i_++].text;
      l = binary(op, l, mul_expr(), p);
    }
    return l;
  }
  ExprPtr mul_expr() {
    ExprPtr l = unary();
    while (is_op("*") || is_op("/") || is_kw("MOD")) {
      Pos p = cur().pos;
      std::string op = cur().kind == Token::Kind::Keyword ? "MOD" : cur().text;
      ++i_;
      l = binary(op, l, unary(), p);
    }
    return l;
  }
  ExprPtr unary() {
    if (is_kw("NOT") || is_op("-")) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Unary;
      e->pos = cur().pos;
      e->name = is_op("-") ? "-" : "NOT";
      ++i_;
      e->args = {unary()};
      return e;
    }
    return primary();
  }
  ExprPtr primary() {
    auto e = std::make_shared<Expr>();
    e->pos = cur().pos;
    const Token& t = cur();
    switch (t.kind) {
      case Token::Kind::Int:
      case Token::Kind::Real:
        e->kind = Expr::Kind::Num;
        e->num = parse_rational(t.text);
        e->is_real = t.kind == Token::Kind::Real;
        ++i_;
        return e;
      case Token::Kind::String:
        e->kind = Expr::Kind::Str;
        e->name = t.text.substr(1, t.text.size() - 2);
        ++i_;
        return e;
      case Token::Kind::Keyword:
        if (t.upper == "TRUE" || t.upper == "FALSE") {
          e->kind = Expr::Kind::Bool;
          e->b = t.upper == "TRUE";
          ++i_;
          return e;
        }
        break;
      case Token::Kind::Op:
        if (t.text == "(") {
          ++i_;
          ExprPtr inner = expr();
          expect_op(")");
          return inner;
        }
        break;
      case Token::Kind::Ident: {
        std::string name = t.text;
        ++i_;
        auto in = intrinsic_by_name(name);
        if (in && intrinsic_arity(*in) >= 0) {
          return intrinsic_call(name, e->pos);
        }
        if (in) {
          e->kind = Expr::Kind::Intrinsic;
          e->name = name;
          return e;
        }
        if (accept_op(".")) {
          e->kind = Expr::Kind::Field;
          e->name = name;
          e->field = ident("field name");
          return e;
        }
        e->kind = Expr::Kind::Var;
        e->name = name;
        return e;
      }
      default: break;
    }
    fail("expression");
  }

  const std::vector<Token>& t_;
  std::size_t i_ = 0;
  int next_id_ = 0;
};

void print_block(std::ostringstream& o, const Block& b, int indent);

void print_stmt(std::ostringstream& o, const Stmt& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case Stmt::Kind::Assign: o << pad << s.target << " := " << print(*s.expr) << ";\n"; break;
    case Stmt::Kind::If:
      o << pad << "IF " << print(*s.expr) << " THEN\n";
      print_block(o, s.then_body, indent + 1);
      if (!s.else_body.empty()) {
        o << pad << "ELSE\n";
        print_block(o, s.else_body, indent + 1);
      }
      o << pad << "END_IF;\n";
      break;
    case Stmt::Kind::While:
      o << pad << "WHILE " << print(*s.expr) << " DO\n";
      print_block(o, s.then_body, indent + 1);
      o << pad << "END_WHILE;\n";
      break;
    case Stmt::Kind::Return: o << pad << "RETURN;\n"; break;
    case Stmt::Kind::FbCall: {
      o << pad << s.target << "(";
      for (std::size_t i = 0; i < s.args.size(); ++i) {
        if (i) o << ", ";
        if (!s.args[i].name.empty()) o << s.args[i].name << " := ";
        o << print(*s.args[i].value);
      }
      o << ");\n";
      break;
    }
    case Stmt::Kind::Call: o << pad << print(*s.expr) << ";\n"; break;
    case Stmt::Kind::Annot:
      if (s.annot.kind == Annotation::Kind::AssertTime) {
        o << pad << "//assertTime(" << to_string(s.annot.min) << ", " << to_string(s.annot.max) << ")\n";
      } else {
        o << pad << "//delay(" << s.annot.src << ", " << s.annot.dst << ", " << to_string(s.annot.min) << ", "
          << to_string(s.annot.max) << ")\n";
      }
      break;
    case Stmt::Kind::Empty: o << pad << ";\n"; break;
  }
}

void print_block(std::ostringstream& o, const Block& b, int indent) {
  for (const auto& s : b) print_stmt(o, *s, indent);
}

std::string num_text(const Expr& e) {
  // decimals print as decimals when representable, otherwise as a division
  if (!e.is_real || is_integer(e.num)) return to_string(e.num) + (e.is_real ? ".0" : "");
  mpz_class den = e.num.get_den();
  int twos = 0, fives = 0;
  while (den % 2 == 0) den /= 2, ++twos;
  while (den % 5 == 0) den /= 5, ++fives;
  if (den != 1) return "(" + e.num.get_num().get_str() + ".0 / " + e.num.get_den().get_str() + ".0)";
  int digits = std::max(twos, fives);
  mpz_class scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  Rational scaled = e.num * scale;
  mpz_class n = scaled.get_num();
  bool neg = n < 0;
  if (neg) n = -n;
  std::string s = n.get_str();
  while (static_cast<int>(s.size()) <= digits) s = "0" + s;
  s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  return (neg ? "-" : "") + s;
}

}  // namespace

std::vector<PouDecl> parse(const std::vector<Token>& tokens) { return Parser(tokens).file(); }

std::vector<PouDecl> parse_source(std::string_view source) { return parse(tokenize(source)); }

ExprPtr parse_expression(std::string_view source) {
  auto toks = tokenize(source);
  return Parser(toks).lone_expr();
}

std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Bool: return e.b ? "TRUE" : "FALSE";
    case Expr::Kind::Num: return num_text(e);
    case Expr::Kind::Str: return "\"" + e.name + "\"";
    case Expr::Kind::Var: return e.name;
    case Expr::Kind::Field: return e.name + "." + e.field;
    case Expr::Kind::Unary: return (e.name == "NOT" ? "NOT " : "-") + print(*e.args[0]);
    case Expr::Kind::Binary: return "(" + print(*e.args[0]) + " " + e.name + " " + print(*e.args[1]) + ")";
    case Expr::Kind::Intrinsic: {
      auto in = intrinsic_by_name(e.name);
      if (in && intrinsic_arity(*in) < 0) return e.name;
      std::string out = e.name + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += print(*e.args[i]);
      }
      return out + ")";
    }
  }
  return "?";
}

std::string print(const PouDecl& p) {
  std::ostringstream o;
  bool prog = p.kind == PouDecl::Kind::Program;
  o << (prog ? "PROGRAM " : "FUNCTION_BLOCK ") << p.name << "\n";
  auto section = [&](const char* kw, const std::vector<VarDecl>& vs) {
    if (vs.empty()) return;
    o << kw << "\n";
    for (const auto& v : vs) {
      o << "  " << v.name << " : " << v.type;
      if (v.init) o << " := " << print(*v.init);
      o << ";\n";
    }
    o << "END_VAR\n";
  };
  section("VAR_INPUT", p.inputs);
  section("VAR_OUTPUT", p.outputs);
  section("VAR", p.locals);
  print_block(o, p.body, 1);
  o << (prog ? "END_PROGRAM\n" : "END_FUNCTION_BLOCK\n");
  return o.str();
}

}  // namespace plcnet::st
