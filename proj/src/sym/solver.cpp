#include "sym/solver.hpp"

#include "sym/linear.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace plcnet::sym {

const char* query_class_name(QueryClass c) {
  switch (c) {
    case QueryClass::Path: return "path";
    case QueryClass::Env: return "env";
    case QueryClass::Property: return "property";
    case QueryClass::Bound: return "bound";
  }
  return "?";
}

std::uint64_t SolverStats::total() const {
  std::uint64_t t = 0;
  for (auto q : queries) t += q;
  return t;
}

namespace {

bool on_path(const std::string& exe) {
  if (exe.find('/') != std::string::npos) return access(exe.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    if (access((dir + "/" + exe).c_str(), X_OK) == 0) return true;
  }
  return false;
}

struct Search {
  const std::set<VarId>& vars;
  Model* model;

  SatResult leaf(const std::vector<Atom>& atoms) {
    std::vector<Atom> lin;
    bool nonlinear = false;
    for (const auto& a : atoms) {
      if (a.p.is_linear()) {
        lin.push_back(a);
      } else {
        nonlinear = true;
      }
    }
    LinearResult r = check_linear(lin, vars);
    if (!r.sat) return SatResult::Unsat;
    if (nonlinear) {
      // the linear model may still happen to satisfy everything
      for (const auto& a : atoms) {
        if (a.p.is_linear()) continue;
        if (!eval_rel(a.p.evaluate(r.model), a.rel)) return SatResult::Unknown;
      }
    }
    if (model) *model = std::move(r.model);
    return SatResult::Sat;
  }

  bool linear_prefix_sat(const std::vector<Atom>& atoms) {
    std::vector<Atom> lin;
    for (const auto& a : atoms)
      if (a.p.is_linear()) lin.push_back(a);
    return check_linear(lin).sat;
  }

  SatResult run(std::vector<Formula> todo, std::vector<Atom> atoms) {
    while (!todo.empty()) {
      Formula f = todo.back();
      todo.pop_back();
      switch (f.kind()) {
        case Formula::Kind::True: break;
        case Formula::Kind::False: return SatResult::Unsat;
        case Formula::Kind::Atom: {
          const Atom& a = f.as_atom();
          if (a.rel != Rel::Ne) {
            atoms.push_back(a);
            break;
          }
          std::vector<Formula> split{Formula::atom(a.p, Rel::Lt), Formula::atom(-a.p, Rel::Lt)};
          return branch(todo, atoms, split);
        }
        case Formula::Kind::And:
          for (const auto& k : f.children()) todo.push_back(k);
          break;
        case Formula::Kind::Or:
          return branch(todo, atoms, f.children());
      }
    }
    return leaf(atoms);
  }

  SatResult branch(const std::vector<Formula>& todo, const std::vector<Atom>& atoms, const std::vector<Formula>& alts) {
    if (!linear_prefix_sat(atoms)) return SatResult::Unsat;
    bool unknown = false;
    for (const auto& alt : alts) {
      std::vector<Formula> next = todo;
      next.push_back(alt);
      SatResult r = run(std::move(next), atoms);
      if (r == SatResult::Sat) return r;
      if (r == SatResult::Unknown) unknown = true;
    }
    return unknown ? SatResult::Unknown : SatResult::Unsat;
  }
};

// Minimal s-expression reader for solver output.
struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
};

class SExprReader {
 public:
  explicit SExprReader(const std::string& s) : s_(s) {}
  bool eof() {
    skip();
    return i_ >= s_.size();
  }
  SExpr read() {
    skip();
    if (i_ >= s_.size()) throw std::runtime_error("unexpected end of solver output");
    SExpr e;
    if (s_[i_] == '(') {
      e.is_list = true;
      ++i_;
      for (;;) {
        skip();
        if (i_ >= s_.size()) throw std::runtime_error("unbalanced solver output");
        if (s_[i_] == ')') {
          ++i_;
          break;
        }
        e.list.push_back(read());
      }
      return e;
    }
    std::size_t j = i_;
    while (j < s_.size() && !std::isspace(static_cast<unsigned char>(s_[j])) && s_[j] != '(' && s_[j] != ')') ++j;
    e.atom = s_.substr(i_, j - i_);
    i_ = j;
    return e;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  const std::string& s_;
  std::size_t i_ = 0;
};

std::optional<Rational> sexpr_value(const SExpr& e) {
  if (!e.is_list) {
    try {
      return parse_rational(e.atom);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }
  if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") {
    auto v = sexpr_value(e.list[1]);
    if (v) return Rational(-*v);
    return std::nullopt;
  }
  if (e.list.size() == 3 && !e.list[0].is_list && e.list[0].atom == "/") {
    auto a = sexpr_value(e.list[1]);
    auto b = sexpr_value(e.list[2]);
    if (a && b && *b != 0) return Rational(*a / *b);
  }
  return std::nullopt;
}

// Runs `cmd` through the shell with `input` on stdin and returns stdout+stderr.
std::string run_solver(const std::string& cmd, const std::string& input) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) throw std::runtime_error("pipe failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw std::runtime_error("pipe failed");
  }
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    dup2(in_pipe[0], 0);
    dup2(out_pipe[1], 1);
    dup2(out_pipe[1], 2);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  // The script ends with check-sat/get-value, so the solver reads everything
  // before writing; a single writer-then-reader pass cannot deadlock.
  std::signal(SIGPIPE, SIG_IGN);
  std::size_t done = 0;
  while (done < input.size()) {
    ssize_t n = write(in_pipe[1], input.data() + done, input.size() - done);
    if (n <= 0) break;
    done += static_cast<std::size_t>(n);
  }
  close(in_pipe[1]);
  std::string output;
  char buf[4096];
  ssize_t n;
  while ((n = read(out_pipe[0], buf, sizeof buf)) > 0) output.append(buf, static_cast<std::size_t>(n));
  close(out_pipe[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127) throw std::runtime_error("cannot run external solver: " + cmd);
  return output;
}

}  // namespace

std::string Solver::locate_external(const std::string& requested) {
  std::string cmd = requested;
  if (cmd.empty()) {
    if (const char* env = std::getenv("PLCNET_SOLVER")) cmd = env;
  }
  if (cmd.empty()) cmd = "z3";
  if (cmd == "none" || cmd == "internal") return {};
  std::string exe = cmd.substr(0, cmd.find(' '));
  if (!on_path(exe)) return {};
  // z3 needs to be told to read the script from stdin
  if (cmd == "z3" || (exe.size() >= 3 && exe.compare(exe.size() - 3, 3, "/z3") == 0 && cmd == exe)) cmd += " -in";
  return cmd;
}

Solver::Solver(SolverOptions opts) : opts_(std::move(opts)) {
  if (opts_.backend != Backend::Internal) external_ = locate_external(opts_.external_cmd);
  if (opts_.backend == Backend::External && external_.empty())
    throw std::runtime_error("external SMT solver requested but none found (set PLCNET_SOLVER)");
}

SatResult Solver::check(const Formula& f, QueryClass qc, Model* model, const std::set<VarId>& vars) {
  if (f.is_true() || f.is_false()) {
    ++stats_.trivial;
    if (f.is_true() && model) {
      model->clear();
      for (VarId v : vars) (*model)[v] = 0;
    }
    return f.is_true() ? SatResult::Sat : SatResult::Unsat;
  }
  ++stats_.queries[static_cast<std::size_t>(qc)];
  SatResult r;
  bool go_external = opts_.backend == Backend::External || (opts_.backend == Backend::Auto && !f.is_linear() && has_external());
  r = go_external ? check_external(f, model, vars) : check_internal(f, model, vars);
  if (r == SatResult::Unknown) ++stats_.unknown;
  return r;
}

SatResult Solver::check_internal(const Formula& f, Model* model, const std::set<VarId>& vars) {
  std::set<VarId> all = vars;
  f.collect_vars(all);
  Search s{all, model};
  return s.run({f}, {});
}

SatResult Solver::check_external(const Formula& f, Model* model, const std::set<VarId>& vars) {
  ++stats_.external_calls;
  std::set<VarId> all = vars;
  f.collect_vars(all);
  std::ostringstream out;
  out << "(set-option :produce-models true)\n";
  out << "(set-logic " << (f.is_linear() ? "QF_LRA" : "QF_NRA") << ")\n";
  for (VarId v : all) out << "(declare-const " << default_var_name(v) << " Real)\n";
  out << "(assert " << f.smtlib() << ")\n(check-sat)\n";
  if (model && !all.empty()) {
    out << "(get-value (";
    for (VarId v : all) out << " " << default_var_name(v);
    out << "))\n";
  }
  out << "(exit)\n";
  std::string output = run_solver(external_, out.str());
  SExprReader rd(output);
  if (rd.eof()) throw std::runtime_error("external solver produced no output");
  SExpr verdict = rd.read();
  if (verdict.is_list || (verdict.atom != "sat" && verdict.atom != "unsat" && verdict.atom != "unknown"))
    throw std::runtime_error("unexpected external solver output: " + output);
  if (verdict.atom == "unsat") return SatResult::Unsat;
  if (verdict.atom == "unknown") return SatResult::Unknown;
  if (model) {
    model->clear();
    if (!all.empty()) {
      SExpr vals = rd.read();
      for (const auto& pair : vals.list) {
        if (!pair.is_list || pair.list.size() != 2 || pair.list[0].is_list) continue;
        const std::string& nm = pair.list[0].atom;
        auto v = sexpr_value(pair.list[1]);
        if (!v || nm.size() < 2 || nm[0] != 'x') continue;
        (*model)[static_cast<VarId>(std::stoul(nm.substr(1)))] = *v;
      }
      for (VarId v : all)
        if (!model->count(v)) return SatResult::Unknown;  // irrational witness
    }
  }
  return SatResult::Sat;
}

}  // namespace plcnet::sym
