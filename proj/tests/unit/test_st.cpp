#include "doctest.h"

#include "st/builtins.hpp"
#include "st/elaborate.hpp"
#include "st/parser.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace plcnet;
using namespace plcnet::st;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> bench_sources() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(std::filesystem::path(PLCNET_SOURCE_DIR) / "bench"))
    if (e.path().extension() == ".st") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

int count_annotations(const Block& b) {
  int n = 0;
  for (const auto& s : b) {
    if (s->kind == Stmt::Kind::Annot) ++n;
    n += count_annotations(s->then_body) + count_annotations(s->else_body);
  }
  return n;
}

int count_if(const Block& b) {
  int n = 0;
  for (const auto& s : b)
    if (s->kind == Stmt::Kind::If) ++n;
  return n;
}

}  // namespace

TEST_CASE("tokenize examples") {
  auto t = tokenize("pumpSwitch := 1;");
  REQUIRE(t.size() == 5);
  CHECK(t[0].kind == Token::Kind::Ident);
  CHECK(t[1].text == ":=");
  CHECK(t[2].kind == Token::Kind::Int);
  CHECK(t[3].text == ";");
  CHECK(t[4].kind == Token::Kind::Eof);

  auto a = tokenize("//assertTime(50, 100)");
  REQUIRE(a.size() == 2);
  CHECK(a[0].kind == Token::Kind::Annotation);
  CHECK(a[0].annot.kind == Annotation::Kind::AssertTime);
  CHECK(a[0].annot.min == 50);
  CHECK(a[0].annot.max == 100);

  auto d = tokenize("//delay(P1, P2, 10, 20)");
  CHECK(d[0].annot.src == "P1");
  CHECK(d[0].annot.dst == "P2");
  CHECK(d[0].annot.max == 20);

  CHECK(tokenize("").size() == 1);
  CHECK(tokenize("// just a comment\n(* block *)").size() == 1);
  CHECK_THROWS_AS(tokenize("x := 'abc"), SourceError);
  CHECK_THROWS_AS(tokenize("x := 1 # 2;"), SourceError);
  CHECK_THROWS_AS(tokenize("//assertTime(5, 1)"), SourceError);
}

TEST_CASE("token slices and positions reproduce the source") {
  for (const auto& path : bench_sources()) {
    std::string src = slurp(path);
    auto toks = tokenize(src);
    std::size_t last = 0;
    int last_line = 0, last_col = 0;
    for (const auto& t : toks) {
      if (t.kind == Token::Kind::Eof) break;
      CHECK(src.compare(t.offset, t.text.size(), t.text) == 0);
      CHECK(t.offset >= last);
      // skipped text between tokens is whitespace or comments only
      std::string gap = src.substr(last, t.offset - last);
      auto trimmed = gap.find_first_not_of(" \t\r\n");
      if (trimmed != std::string::npos) CHECK((gap.substr(trimmed, 2) == "//" || gap.substr(trimmed, 2) == "(*"));
      CHECK((t.pos.line > last_line || (t.pos.line == last_line && t.pos.col > last_col)));
      last_line = t.pos.line;
      last_col = t.pos.col;
      last = t.offset + t.text.size();
    }
  }
}

TEST_CASE("parse the single-tank program") {
  auto pous = parse_source(slurp(std::filesystem::path(PLCNET_SOURCE_DIR) / "bench/ptp/tank.st"));
  REQUIRE(pous.size() == 1);
  const auto& p = pous[0];
  CHECK(p.kind == PouDecl::Kind::Program);
  CHECK(p.inputs.size() == 1);
  CHECK(p.inputs[0].name == "waterLevel");
  CHECK(p.inputs[0].type == "REAL");
  CHECK(p.outputs.size() == 1);
  CHECK(p.outputs[0].name == "pumpSwitch");
  REQUIRE(p.body.size() == 1);
  CHECK(p.body[0]->kind == Stmt::Kind::If);
}

TEST_CASE("builtin function blocks") {
  const auto& b = builtin_pous();
  REQUIRE(b.size() == 3);
  const PouDecl& connect = b[0];
  CHECK(connect.name == "CONNECT");
  CHECK(connect.kind == PouDecl::Kind::FunctionBlock);
  REQUIRE(connect.inputs.size() == 2);
  CHECK(connect.inputs[0].name == "ENC");
  CHECK(connect.inputs[1].name == "PARTNER");
  REQUIRE(connect.outputs.size() == 4);
  CHECK(connect.outputs[2].name == "STATUS");
  REQUIRE(connect.outputs[2].init);
  CHECK(connect.outputs[2].init->num == 0);
  CHECK(count_if(connect.body) == 3);

  const PouDecl& usend = b[1];
  const Stmt& last = *usend.body.back();
  REQUIRE(last.kind == Stmt::Kind::If);
  CHECK(last.expr->kind == Expr::Kind::Var);
  CHECK(last.expr->name == "RESULT");
  CHECK(last.then_body[0]->target == "DONE");
  CHECK(last.then_body[0]->expr->b == true);
  const Stmt& send = *usend.body[usend.body.size() - 2];
  CHECK(send.kind == Stmt::Kind::Assign);
  CHECK(send.expr->name == "sendData");

  const PouDecl& urcv = b[2];
  const Stmt& check = *urcv.body.back();
  REQUIRE(check.kind == Stmt::Kind::If);
  CHECK(check.expr->name == "<>");
  CHECK(check.expr->args[1]->name == "rcvError");
  bool assigns_data = false;
  for (const auto& s : check.then_body)
    if (s->target == "DATA" && s->expr->name == "RESULT") assigns_data = true;
  CHECK(assigns_data);
}

TEST_CASE("minimal program and syntax errors") {
  auto p = parse_source("PROGRAM P END_PROGRAM");
  REQUIRE(p.size() == 1);
  CHECK(p[0].body.empty());
  CHECK(p[0].inputs.empty());
  try {
    parse_source("PROGRAM P\n  x := ;\nEND_PROGRAM");
    FAIL("expected an error");
  } catch (const SourceError& e) {
    CHECK(e.pos.line == 2);
    CHECK(std::string(e.what()).find("expected expression") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_source("PROGRAM P IF x THEN END_PROGRAM"), SourceError);
}

TEST_CASE("round trip printing over corpus and builtins") {
  std::vector<PouDecl> all = builtin_pous();
  for (const auto& path : bench_sources()) {
    auto p = parse_source(slurp(path));
    all.insert(all.end(), p.begin(), p.end());
  }
  CHECK(all.size() > 5);
  for (const auto& pou : all) {
    std::string text = print(pou);
    auto again = parse_source(text);
    REQUIRE(again.size() == 1);
    CHECK_MESSAGE(equal(pou, again[0]), text);
    CHECK(print(again[0]) == text);
  }
}

TEST_CASE("property: random expressions round trip") {
  std::mt19937 rng(7);
  std::function<std::string(int)> gen = [&](int depth) -> std::string {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 3);
    switch (pick(rng)) {
      case 0: return std::to_string(rng() % 100);
      case 1: return "x" + std::to_string(rng() % 3);
      case 2: return (rng() % 2) ? "TRUE" : "FALSE";
      case 3: return "fb.OUT";
      case 4: return "NOT " + gen(depth - 1);
      case 5: return "-" + gen(depth - 1);
      case 6: {
        static const char* ops[] = {"+", "-", "*", "/", "=", "<>", "<", "<=", ">", ">=", "AND", "OR", "XOR"};
        return gen(depth - 1) + " " + ops[rng() % 13] + " " + gen(depth - 1);
      }
      default: return "(" + gen(depth - 1) + ")";
    }
  };
  for (int i = 0; i < 200; ++i) {
    std::string src = gen(4);
    ExprPtr e = parse_expression(src);
    ExprPtr back = parse_expression(print(*e));
    CHECK_MESSAGE(equal(*e, *back), src);
  }
}

TEST_CASE("annotations are kept in statement position") {
  std::string src =
      "PROGRAM P\nVAR x : INT; END_VAR\n"
      "//assertTime(3, 3)\nx := 1;\n// note\nIF x > 0 THEN\n  //delay(A, B, 1, 2)\n  x := 2;\nEND_IF;\nEND_PROGRAM\n";
  auto p = parse_source(src);
  CHECK(count_annotations(p[0].body) == 2);
  CHECK(p[0].body[0]->kind == Stmt::Kind::Annot);
  for (const auto& path : bench_sources()) {
    std::string text = slurp(path);
    int lines = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      auto k = line.find_first_not_of(" \t");
      if (k != std::string::npos && (line.compare(k, 13, "//assertTime(") == 0 || line.compare(k, 8, "//delay(") == 0)) ++lines;
    }
    int in_ast = 0;
    for (const auto& pou : parse_source(text)) in_ast += count_annotations(pou.body);
    CHECK(in_ast == lines);
  }
}

TEST_CASE("elaboration") {
  auto tank = parse_source(slurp(std::filesystem::path(PLCNET_SOURCE_DIR) / "bench/ptp/tank.st"));
  std::vector<PouDecl> decls = tank;
  decls.insert(decls.end(), builtin_pous().begin(), builtin_pous().end());
  CHECK(elaborate(decls).size() == 4);
  CHECK(elaborate({}).empty());
  auto dup = tank;
  dup.push_back(tank[0]);
  CHECK_THROWS_WITH_AS(elaborate(dup), doctest::Contains("duplicate POU"), SourceError);

  auto bad = [](const char* src) { return elaborate_with_builtins(parse_source(src)); };
  CHECK_THROWS_WITH_AS(bad("PROGRAM P VAR x : INT; END_VAR y := 1; END_PROGRAM"), doctest::Contains("undeclared"), SourceError);
  CHECK_THROWS_WITH_AS(bad("PROGRAM P VAR x : FOO; END_VAR END_PROGRAM"), doctest::Contains("unknown type"), SourceError);
  CHECK_THROWS_WITH_AS(bad("PROGRAM P VAR x : INT; x : BOOL; END_VAR END_PROGRAM"), doctest::Contains("duplicate variable"),
                       SourceError);
  CHECK_THROWS_AS(bad("PROGRAM P VAR x : BOOL; END_VAR x := 1; END_PROGRAM"), SourceError);
  CHECK_THROWS_AS(bad("PROGRAM P VAR c : CONNECT; b : BOOL; END_VAR b := c.ENC; END_PROGRAM"), SourceError);
  CHECK_THROWS_AS(bad("PROGRAM P VAR b : BOOL; END_VAR b := isConnected(\"A\") AND isConnected(\"B\"); END_PROGRAM"),
                  SourceError);
  CHECK_THROWS_WITH_AS(bad("FUNCTION_BLOCK A VAR b : B; END_VAR END_FUNCTION_BLOCK\n"
                           "FUNCTION_BLOCK B VAR a : A; END_VAR END_FUNCTION_BLOCK"),
                       doctest::Contains("recursive"), SourceError);
  auto ok = bad("PROGRAM P VAR c : CONNECT; b : BOOL; END_VAR c(TRUE, PARTNER := \"X\"); b := c.VALID; END_PROGRAM");
  CHECK(ok.at("P")->find("c")->fb_type == "CONNECT");
  for (const auto& path : bench_sources()) {
    CHECK_NOTHROW(elaborate_with_builtins(parse_source(slurp(path))));
  }
}
