#include "sem/engine.hpp"

#include <map>
#include <set>

namespace plcnet::sem {

using model::Conn;
using model::Msg;

namespace {

const std::string& partner_arg(const exec::CommRequest& req) {
  if (req.args.empty() || !std::holds_alternative<std::string>(req.args[0]))
    throw EngineError(std::string(st::intrinsic_name(req.op)) + " in " + req.block + ": partner must be a machine name");
  return std::get<std::string>(req.args[0]);
}

const std::string& string_arg(const exec::CommRequest& req, std::size_t i) {
  if (req.args.size() <= i || !std::holds_alternative<std::string>(req.args[i]))
    throw EngineError(std::string(st::intrinsic_name(req.op)) + " in " + req.block + ": argument " + std::to_string(i + 1) +
                      " must be a string");
  return std::get<std::string>(req.args[i]);
}

}  // namespace

void Engine::comm_steps(const SystemState& s, int i, const exec::CommRequest& req, Expansion& out) {
  const auto self = static_cast<std::size_t>(i);
  const std::string& partner = partner_arg(req);
  int p = m_.machine_index(partner);
  int ci = p < 0 ? -1 : m_.conn_index(i, p);
  const Conn* conn = ci < 0 ? nullptr : &s.conns[static_cast<std::size_t>(ci)];
  if (!conn && req.op != st::Intrinsic::IsConnected)
    throw EngineError(std::string(st::intrinsic_name(req.op)) + " in " + req.block + ": no connection between " +
                      m_.machines[self].id + " and " + partner);

  auto emit = [&](const SystemState& base, const char* label, exec::Value result, std::string detail = {}) -> Transition& {
    Transition t;
    t.id = TransitionId{label, i, std::move(detail)};
    t.cls = TransitionClass::Comm;
    t.next = base;
    t.next.last_tick = false;
    t.next.machines[self].proc = exec::resume(base.machines[self].proc, std::move(result));
    out.transitions.push_back(std::move(t));
    return out.transitions.back();
  };
  auto conn_of = [&](SystemState& ns) -> Conn& { return ns.conns[static_cast<std::size_t>(ci)]; };

  switch (req.op) {
    case st::Intrinsic::ConnectRequest: {
      if (conn->valid) {
        emit(s, "conSucc", true);
        return;
      }
      SystemState ok = s;
      conn_of(ok).valid = true;
      emit(ok, "conSucc", true);
      if (!m_.flags.reliable_connect) emit(s, "conFail", false);
      return;
    }
    case st::Intrinsic::IsConnected: emit(s, "conCheck", conn != nullptr && conn->valid); return;
    case st::Intrinsic::Disconnect: {
      SystemState ns = s;
      conn_of(ns).valid = false;
      emit(ns, "disconnect", true);
      return;
    }
    case st::Intrinsic::SendData: {
      if (req.args.size() != 4) throw EngineError("sendData in " + req.block + " expects 4 arguments");
      if (!conn->valid) {
        emit(s, "sendDataFail", false);
        return;
      }
      SystemState ns = s;
      Msg msg;
      msg.sender = i;
      msg.receiver = p;
      msg.send_fb = string_arg(req, 1);
      msg.recv_fb = string_arg(req, 2);
      msg.data = req.args[3];
      msg.min_timer = Poly(conn->dmin);
      msg.max_timer = Poly(conn->dmax);
      conn_of(ns).buffer.push_back(std::move(msg));
      emit(ns, "sendData", true, exec::value_str(req.args[3]));
      return;
    }
    case st::Intrinsic::RcvData: {
      if (!conn->valid) {
        emit(s, "rcvFail", exec::RcvError{});
        return;
      }
      const std::string& send_fb = string_arg(req, 1);
      const std::string& recv_fb = string_arg(req, 2);
      std::vector<std::size_t> matching;
      for (std::size_t k = 0; k < conn->buffer.size(); ++k) {
        const Msg& m = conn->buffer[k];
        if (m.sender == p && m.receiver == i && m.send_fb == send_fb && m.recv_fb == recv_fb) matching.push_back(k);
      }
      std::set<std::string> seen;
      std::map<std::string, int> ordinal;
      Formula none_ready;
      for (std::size_t k : matching) {
        const Msg& m = conn->buffer[k];
        none_ready = none_ready && Formula::gt(m.min_timer, Poly());
        if (!seen.insert(model::msg_str(m_, m)).second) continue;
        // the label names the message without its timers, which depend on
        // how the state was reached
        std::string key = m_.machines[static_cast<std::size_t>(p)].id + ":" + exec::value_str(m.data);
        if (int n = ordinal[key]++) key += "#" + std::to_string(n + 1);
        SystemState ns = s;
        Formula g = Formula::le(m.min_timer, Poly());
        if (!assume(ns, g, sym::QueryClass::Path)) continue;
        exec::Value data = m.data;
        auto& buf = conn_of(ns).buffer;
        buf.erase(buf.begin() + static_cast<std::ptrdiff_t>(k));
        Transition& t = emit(ns, "rcvData", std::move(data), key);
        t.added = g;
      }
      if (matching.empty()) {
        emit(s, "rcvNo", exec::RcvError{});
      } else if (m_.flags.rcv_no_if_undeliverable) {
        SystemState ns = s;
        if (assume(ns, none_ready, sym::QueryClass::Path)) emit(ns, "rcvNo", exec::RcvError{}).added = none_ready;
      }
      return;
    }
    default: throw EngineError(std::string("unexpected intrinsic ") + st::intrinsic_name(req.op));
  }
}

}  // namespace plcnet::sem
