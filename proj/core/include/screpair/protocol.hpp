#pragma once

// Newline-delimited JSON protocol between the environment and external agents.
//
//   env   -> agent  {"protocol":1,"type":"observation","session":..,"phase":..,"step":..,"payload":{..}}
//   agent -> env    {"protocol":1,"type":"action","action":"RELAX_CONSTRAINT","target":"capacity_e1",
//                    "value":50.0,"reasoning":"..","tokens_used":123}
//                   or a single text line "Action: KIND(args)"
//   env   -> agent  {"protocol":1,"type":"result","session":..,"payload":{..}}   (no reply expected)
//
// Over stdio each message is one line. Over HTTP each message is the body of
// one POST and the action is the response body.

#include <chrono>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include "screpair/agents.hpp"
#include "screpair/environment.hpp"

namespace screpair {

inline constexpr int kProtocolVersion = 1;

std::string observation_message(const Observation& obs, std::size_t iis_display_limit = 25);
// Inverse of observation_message. Throws FormatError.
Observation observation_from_message(std::string_view line);
std::string result_message(const EpisodeResult& result);
std::string error_message(std::string_view text);

// Parses an agent reply into a turn; malformed replies become turns without
// an action. A reply declaring another protocol version is malformed.
AgentTurn parse_agent_reply(std::string_view reply);

class Transport {
 public:
  virtual ~Transport() = default;
  // Sends one message and waits for the reply. Throws TransportError.
  virtual std::string request(const std::string& message) = 0;
  // Sends one message, no reply expected. Best effort.
  virtual void notify(const std::string& message) = 0;
};

// Runs `/bin/sh -c command` and exchanges lines over its stdin/stdout.
class SubprocessTransport final : public Transport {
 public:
  SubprocessTransport(std::string command, std::chrono::milliseconds reply_timeout);
  ~SubprocessTransport() override;
  SubprocessTransport(const SubprocessTransport&) = delete;
  SubprocessTransport& operator=(const SubprocessTransport&) = delete;

  std::string request(const std::string& message) override;
  void notify(const std::string& message) override;

 private:
  void write_line(const std::string& line);
  std::string read_line();
  void shutdown();

  std::string command_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

// POSTs each message to `url` ("http://host:port/path").
class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string url, std::chrono::milliseconds reply_timeout);
  std::string request(const std::string& message) override;
  void notify(const std::string& message) override;

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

// An Agent whose decisions come from the other end of a transport.
class ProtocolAgent final : public Agent {
 public:
  ProtocolAgent(std::unique_ptr<Transport> transport, std::string identity, std::size_t iis_display_limit = 25);
  std::string name() const override { return identity_; }
  AgentTurn act(const Observation& obs) override;
  void finish(const EpisodeResult& result) override;

 private:
  std::unique_ptr<Transport> transport_;
  std::string identity_;
  std::size_t iis_display_limit_;
};

enum class EndpointMode { kInProcess, kSubprocessStdio, kHttp };

struct AgentEndpoint {
  EndpointMode mode = EndpointMode::kInProcess;
  std::string identity;  // label for reports
  bool token_reporting = false;
  std::string policy;    // in-process: "gt" | "greedy"
  std::string command;   // subprocess
  std::string url;       // http
  std::chrono::milliseconds reply_timeout{300000};

  // "gt", "greedy", "proto:CMD", "http:URL". Throws ConfigurationError.
  static AgentEndpoint parse(std::string_view spec);
};

// Agent side of the stdio protocol: reads observation lines from `in`,
// answers each with the policy's action. A result line starts a new episode
// with a fresh policy. Returns at end of input.
using PolicyFactory = std::function<std::unique_ptr<Agent>()>;
void serve_stdio_agent(const PolicyFactory& factory, std::istream& in, std::ostream& out);

// Agent side of the HTTP protocol, one policy instance per session id.
class AgentHttpServer {
 public:
  explicit AgentHttpServer(PolicyFactory factory);
  ~AgentHttpServer();
  AgentHttpServer(const AgentHttpServer&) = delete;
  AgentHttpServer& operator=(const AgentHttpServer&) = delete;

  // Binds (port 0 picks a free port), starts serving on a background thread
  // and returns the bound port. Throws TransportError.
  int start(const std::string& host, int port);
  // Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace screpair
