#include "st/lexer.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace plcnet::st {

SourceError::SourceError(Pos p, const std::string& what)
    : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + what), pos(p) {}

const char* token_kind_name(Token::Kind k) {
  switch (k) {
    case Token::Kind::Keyword: return "keyword";
    case Token::Kind::Ident: return "identifier";
    case Token::Kind::Int: return "integer";
    case Token::Kind::Real: return "real";
    case Token::Kind::String: return "string";
    case Token::Kind::Op: return "operator";
    case Token::Kind::Annotation: return "annotation";
    case Token::Kind::Eof: return "end of input";
  }
  return "?";
}

namespace {

const std::set<std::string>& keywords() {
  static const std::set<std::string> k{"PROGRAM", "END_PROGRAM", "FUNCTION_BLOCK", "END_FUNCTION_BLOCK", "VAR",
                                       "VAR_INPUT", "VAR_OUTPUT", "END_VAR", "IF", "THEN", "ELSIF", "ELSE",
                                       "END_IF", "WHILE", "DO", "END_WHILE", "RETURN", "TRUE", "FALSE", "AND",
                                       "OR", "NOT", "XOR", "MOD"};
  return k;
}

std::string to_upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_ident(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : s_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (i_ >= s_.size()) break;
      Pos p = pos();
      std::size_t start = i_;
      char c = s_[i_];
      if (c == '/' && peek(1) == '/') {
        if (auto t = annotation(p, start)) {
          out.push_back(std::move(*t));
        } else {
          while (i_ < s_.size() && s_[i_] != '\n') advance();
        }
        continue;
      }
      if (c == '(' && peek(1) == '*') {
        advance();
        advance();
        while (i_ < s_.size() && !(s_[i_] == '*' && peek(1) == ')')) advance();
        if (i_ >= s_.size()) throw SourceError(p, "unterminated comment");
        advance();
        advance();
        continue;
      }
      Token t;
      t.pos = p;
      t.offset = start;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) advance();
        t.text = std::string(s_.substr(start, i_ - start));
        t.upper = to_upper(t.text);
        t.kind = keywords().count(t.upper) ? Token::Kind::Keyword : Token::Kind::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) advance();
        t.kind = Token::Kind::Int;
        if (i_ + 1 < s_.size() && s_[i_] == '.' && std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) {
          advance();
          while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) advance();
          t.kind = Token::Kind::Real;
        }
        t.text = std::string(s_.substr(start, i_ - start));
      } else if (c == '"' || c == '\'') {
        advance();
        while (i_ < s_.size() && s_[i_] != c && s_[i_] != '\n') advance();
        if (i_ >= s_.size() || s_[i_] != c) throw SourceError(p, "unterminated string literal");
        advance();
        t.kind = Token::Kind::String;
        t.text = std::string(s_.substr(start, i_ - start));
      } else {
        static const char* two[] = {":=", "<>", "<=", ">=", "=>"};
        t.kind = Token::Kind::Op;
        for (const char* op : two) {
          if (c == op[0] && peek(1) == op[1]) {
            advance();
            advance();
            t.text = op;
            break;
          }
        }
        if (t.text.empty()) {
          static const std::string single = ";:,().+-*/=<>";
          if (single.find(c) == std::string::npos)
            throw SourceError(p, std::string("illegal character '") + c + "'");
          advance();
          t.text = std::string(1, c);
        }
      }
      out.push_back(std::move(t));
    }
    Token eof;
    eof.kind = Token::Kind::Eof;
    eof.pos = pos();
    eof.offset = s_.size();
    out.push_back(eof);
    return out;
  }

 private:
  char peek(std::size_t k) const { return i_ + k < s_.size() ? s_[i_ + k] : '\0'; }
  Pos pos() const { return Pos{line_, col_}; }
  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }
  void skip_space() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) advance();
  }

  std::optional<Token> annotation(Pos p, std::size_t start) {
    std::string_view rest = s_.substr(i_ + 2);
    Annotation::Kind kind;
    std::size_t name_len;
    if (rest.substr(0, 11) == "assertTime(") {
      kind = Annotation::Kind::AssertTime;
      name_len = 10;
    } else if (rest.substr(0, 6) == "delay(") {
      kind = Annotation::Kind::Delay;
      name_len = 5;
    } else {
      return std::nullopt;
    }
    std::size_t open = i_ + 2 + name_len;
    std::size_t close = s_.find(')', open);
    std::size_t eol = s_.find('\n', open);
    if (close == std::string_view::npos || (eol != std::string_view::npos && close > eol))
      throw SourceError(p, "unterminated annotation");
    std::vector<std::string> args;
    std::string inner(s_.substr(open + 1, close - open - 1));
    std::size_t from = 0;
    for (;;) {
      std::size_t comma = inner.find(',', from);
      args.push_back(trim(inner.substr(from, comma == std::string::npos ? std::string::npos : comma - from)));
      if (comma == std::string::npos) break;
      from = comma + 1;
    }
    Token t;
    t.kind = Token::Kind::Annotation;
    t.pos = p;
    t.offset = start;
    t.annot.kind = kind;
    auto num = [&](const std::string& a) {
      try {
        Rational q = parse_rational(a);
        if (q < 0) throw SourceError(p, "annotation time must be nonnegative: " + a);
        return q;
      } catch (const std::invalid_argument&) {
        throw SourceError(p, "annotation expects a time, got '" + a + "'");
      }
    };
    auto id = [&](const std::string& a) {
      std::string v = a;
      if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) v = v.substr(1, v.size() - 2);
      if (!is_ident(v)) throw SourceError(p, "annotation expects a machine id, got '" + a + "'");
      return v;
    };
    if (kind == Annotation::Kind::AssertTime) {
      if (args.size() != 2) throw SourceError(p, "assertTime takes 2 arguments");
      t.annot.min = num(args[0]);
      t.annot.max = num(args[1]);
    } else {
      if (args.size() != 4) throw SourceError(p, "delay takes 4 arguments");
      t.annot.src = id(args[0]);
      t.annot.dst = id(args[1]);
      t.annot.min = num(args[2]);
      t.annot.max = num(args[3]);
    }
    if (t.annot.min > t.annot.max) throw SourceError(p, "annotation requires min <= max");
    while (i_ <= close) advance();
    t.text = std::string(s_.substr(start, i_ - start));
    return t;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace plcnet::st
