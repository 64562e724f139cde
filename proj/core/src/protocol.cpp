#include "screpair/protocol.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <httplib.h>

#include "json_io.hpp"
#include "screpair/error.hpp"

namespace screpair {

using jsonio::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

json envelope(std::string_view type) { return {{"protocol", kProtocolVersion}, {"type", type}}; }

}  // namespace

std::string observation_message(const Observation& o, std::size_t iis_limit) {
  json history = json::array();
  for (const TranscriptEntry& e : o.history) history.push_back(jsonio::to_json(e));
  json payload = {
      {"episode_id", o.episode_id},
      {"nl_description", o.nl_description},
      {"problem",
       {{"n_echelons", o.problem.n_echelons},
        {"n_periods", o.problem.n_periods},
        {"mean_demand", jsonio::number(o.problem.mean_demand)}}},
      {"status", status_name(o.status)},
      {"objective", o.objective ? jsonio::number(*o.objective) : json(nullptr)},
      {"iis", o.iis ? jsonio::to_json(*o.iis) : json(nullptr)},
      {"model_summary",
       {{"n_constraints", o.n_constraints},
        {"n_variables", o.n_variables},
        {"constraint_names", o.constraint_preview}}},
      {"history", history},
      {"step_index", o.step},
      {"phase", phase_name(o.phase)},
      {"loop_count", o.loop_count},
      {"loop_back", o.loop_back},
      {"entered_validation", o.entered_validation},
      {"rationality_feedback", o.rationality_feedback},
      {"verdict", o.verdict ? jsonio::to_json(*o.verdict) : json(nullptr)},
      {"message", o.message},
      {"action_error", o.action_error},
      {"terminal", o.terminal},
      {"text", render_observation(o, iis_limit)},
  };
  json j = envelope("observation");
  j["session"] = o.episode_id;
  j["phase"] = phase_name(o.phase);
  j["step"] = o.step;
  if (o.action_error) j["error"] = o.message;
  j["payload"] = std::move(payload);
  return j.dump();
}

Observation observation_from_message(std::string_view line) {
  const json j = jsonio::parse(line);
  if (jsonio::integer_at(j, "protocol") != kProtocolVersion) throw FormatError("unsupported protocol version");
  if (jsonio::string_at(j, "type") != "observation") throw FormatError("expected an observation message");
  const json& p = jsonio::at(j, "payload");
  Observation o;
  o.episode_id = jsonio::string_at(p, "episode_id");
  o.nl_description = jsonio::string_at(p, "nl_description");
  const json& pr = jsonio::at(p, "problem");
  o.problem.n_echelons = static_cast<int>(jsonio::integer_at(pr, "n_echelons"));
  o.problem.n_periods = static_cast<int>(jsonio::integer_at(pr, "n_periods"));
  o.problem.mean_demand = jsonio::number_at(pr, "mean_demand");
  o.status = jsonio::parse_status(jsonio::string_at(p, "status"));
  if (!jsonio::at(p, "objective").is_null()) o.objective = jsonio::number_at(p, "objective");
  if (!jsonio::at(p, "iis").is_null()) o.iis = jsonio::iis_from_json(jsonio::at(p, "iis"));
  const json& ms = jsonio::at(p, "model_summary");
  o.n_constraints = static_cast<int>(jsonio::integer_at(ms, "n_constraints"));
  o.n_variables = static_cast<int>(jsonio::integer_at(ms, "n_variables"));
  for (const json& n : jsonio::at(ms, "constraint_names")) o.constraint_preview.push_back(n.get<std::string>());
  for (const json& e : jsonio::at(p, "history")) o.history.push_back(jsonio::transcript_from_json(e));
  o.step = static_cast<int>(jsonio::integer_at(p, "step_index"));
  o.phase = jsonio::parse_phase(jsonio::string_at(p, "phase"));
  o.loop_count = static_cast<int>(jsonio::integer_at(p, "loop_count"));
  o.loop_back = jsonio::bool_at(p, "loop_back");
  o.entered_validation = jsonio::bool_at(p, "entered_validation");
  o.rationality_feedback = jsonio::string_at(p, "rationality_feedback");
  if (!jsonio::at(p, "verdict").is_null()) o.verdict = jsonio::verdict_from_json(jsonio::at(p, "verdict"));
  o.message = jsonio::string_at(p, "message");
  o.action_error = jsonio::bool_at(p, "action_error");
  o.terminal = jsonio::bool_at(p, "terminal");
  return o;
}

std::string result_message(const EpisodeResult& r) {
  json j = envelope("result");
  j["session"] = r.episode_id;
  j["payload"] = jsonio::to_json(r);
  return j.dump();
}

std::string error_message(std::string_view text) {
  json j = envelope("error");
  j["message"] = std::string(text);
  return j.dump();
}

AgentTurn parse_agent_reply(std::string_view reply) {
  AgentTurn turn;
  turn.raw = std::string(trim(reply));
  if (turn.raw.empty()) {
    turn.error = "empty reply";
    return turn;
  }
  try {
    if (turn.raw.front() == '{') {
      json j = json::parse(turn.raw, nullptr, false);
      if (!j.is_discarded() && j.is_object()) {
        if (j.contains("protocol") && j["protocol"] != kProtocolVersion) {
          turn.error = "unsupported protocol version";
          return turn;
        }
        if (j.contains("type") && j["type"] == "error") {
          turn.error = "agent reported: " + j.value("message", std::string("error"));
          return turn;
        }
      }
    }
    ActionMessage m = parse_agent_response(turn.raw);
    turn.action = std::move(m.action);
    turn.reasoning = std::move(m.reasoning);
    turn.tokens_used = m.tokens_used;
  } catch (const FormatError& e) {
    turn.error = e.what();
  }
  return turn;
}

// ---------------------------------------------------------------- subprocess

SubprocessTransport::SubprocessTransport(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });
  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0) throw TransportError(std::string("pipe: ") + std::strerror(errno));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw TransportError(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw TransportError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    // Own process group, so a forced shutdown also reaches anything the shell spawned.
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

SubprocessTransport::~SubprocessTransport() { shutdown(); }

void SubprocessTransport::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  to_child_ = -1;
  if (pid_ > 0) {
    // Give the agent a moment to exit on EOF before forcing it.
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    if (pid_ > 0) {
      ::kill(-pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }
  if (from_child_ >= 0) ::close(from_child_);
  from_child_ = -1;
}

void SubprocessTransport::write_line(const std::string& line) {
  if (to_child_ < 0) throw TransportError("agent process is closed");
  std::string data = line;
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("write to agent failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string SubprocessTransport::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw TransportError("agent reply timed out");
    pollfd pfd{from_child_, POLLIN, 0};
    const int r = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("poll: ") + std::strerror(errno));
    }
    if (r == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("read from agent failed: ") + std::strerror(errno));
    }
    if (n == 0) throw TransportError("agent closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::string SubprocessTransport::request(const std::string& message) {
  write_line(message);
  return read_line();
}

void SubprocessTransport::notify(const std::string& message) {
  try {
    write_line(message);
  } catch (const TransportError&) {
  }
  shutdown();
}

// ---------------------------------------------------------------------- http

HttpTransport::HttpTransport(std::string url, std::chrono::milliseconds timeout) : timeout_(timeout) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigurationError("http endpoint needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  scheme_host_port_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
  if (url.compare(0, scheme, "http") != 0 || scheme != 4)
    throw ConfigurationError("only plain http endpoints are supported: " + url);
}

std::string HttpTransport::request(const std::string& message) {
  httplib::Client cli(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  cli.set_read_timeout(secs.count(), static_cast<long>((timeout_ - secs).count()) * 1000);
  cli.set_connection_timeout(10, 0);
  auto res = cli.Post(path_, message, "application/json");
  if (!res) throw TransportError("http request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError("http status " + std::to_string(res->status));
  return res->body;
}

void HttpTransport::notify(const std::string& message) {
  try {
    request(message);
  } catch (const TransportError&) {
  }
}

// ------------------------------------------------------------ protocol agent

ProtocolAgent::ProtocolAgent(std::unique_ptr<Transport> transport, std::string identity, std::size_t limit)
    : transport_(std::move(transport)), identity_(std::move(identity)), iis_display_limit_(limit) {
  if (!transport_) throw ConfigurationError("protocol agent needs a transport");
}

AgentTurn ProtocolAgent::act(const Observation& obs) {
  return parse_agent_reply(transport_->request(observation_message(obs, iis_display_limit_)));
}

void ProtocolAgent::finish(const EpisodeResult& result) { transport_->notify(result_message(result)); }

AgentEndpoint AgentEndpoint::parse(std::string_view spec) {
  AgentEndpoint e;
  if (spec == "gt" || spec == "greedy") {
    e.mode = EndpointMode::kInProcess;
    e.policy = std::string(spec);
    e.identity = spec == "gt" ? "gt_replay" : "greedy_iis";
  } else if (spec.rfind("proto:", 0) == 0 && spec.size() > 6) {
    e.mode = EndpointMode::kSubprocessStdio;
    e.command = std::string(spec.substr(6));
    e.identity = "proto:" + e.command;
    e.token_reporting = true;
  } else if (spec.rfind("http:", 0) == 0 && spec.size() > 5) {
    e.mode = EndpointMode::kHttp;
    e.url = std::string(spec.substr(5));
    // Accept both "http:http://host/path" and "http://host/path".
    if (e.url.rfind("//", 0) == 0) e.url = "http:" + e.url;
    e.identity = e.url;
    e.token_reporting = true;
  } else {
    throw ConfigurationError("unknown agent endpoint '" + std::string(spec) +
                             "' (expected gt, greedy, proto:CMD or http:URL)");
  }
  return e;
}

// ------------------------------------------------------------ agent side

namespace {

// Handles one inbound message for a session; returns the reply ("" for none).
std::string answer(std::unique_ptr<Agent>& policy, const PolicyFactory& factory, std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return error_message("message is not a JSON object");
  const std::string type = j.value("type", std::string());
  if (type == "result") {
    if (policy) {
      try {
        policy->finish(jsonio::result_from_json(jsonio::at(j, "payload")));
      } catch (const Error&) {
      }
    }
    policy.reset();
    return {};
  }
  if (type != "observation") return error_message("unexpected message type '" + type + "'");
  try {
    const Observation obs = observation_from_message(line);
    if (!policy) policy = factory();
    AgentTurn turn = policy->act(obs);
    if (!turn.action) return error_message(turn.error);
    return action_to_json(*turn.action, turn.reasoning, turn.tokens_used);
  } catch (const Error& e) {
    return error_message(e.what());
  }
}

}  // namespace

void serve_stdio_agent(const PolicyFactory& factory, std::istream& in, std::ostream& out) {
  std::unique_ptr<Agent> policy;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::string reply = answer(policy, factory, line);
    if (!reply.empty()) out << reply << '\n' << std::flush;
  }
}

struct AgentHttpServer::Impl {
  PolicyFactory factory;
  httplib::Server server;
  std::mutex mu;
  std::map<std::string, std::unique_ptr<Agent>> sessions;
  std::thread thread;
};

AgentHttpServer::AgentHttpServer(PolicyFactory factory) : impl_(std::make_unique<Impl>()) {
  impl_->factory = std::move(factory);
  impl_->server.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
    json j = json::parse(req.body, nullptr, false);
    const std::string session =
        (!j.is_discarded() && j.is_object() && j.contains("session") && j["session"].is_string())
            ? j["session"].get<std::string>()
            : std::string();
    std::unique_ptr<Agent> policy;
    {
      std::lock_guard lock(impl_->mu);
      auto it = impl_->sessions.find(session);
      if (it != impl_->sessions.end()) {
        policy = std::move(it->second);
        impl_->sessions.erase(it);
      }
    }
    std::string reply = answer(policy, impl_->factory, req.body);
    if (policy) {
      std::lock_guard lock(impl_->mu);
      impl_->sessions[session] = std::move(policy);
    }
    res.set_content(reply.empty() ? "{}" : reply, "application/json");
  });
}

AgentHttpServer::~AgentHttpServer() { stop(); }

int AgentHttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw TransportError("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void AgentHttpServer::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw TransportError("cannot listen on " + host + ":" + std::to_string(port));
}

void AgentHttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace screpair
