#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gridlab/error.hpp"

namespace gridlab {

// One conversation entry as shipped to an agent process. Roles are "system",
// "environment", and "agent".
struct TranscriptEntry {
    std::string role;
    std::string text;
};

struct AgentRequest {
    std::uint64_t id = 0;
    std::vector<TranscriptEntry> transcript;
    long long char_budget_turn = 0;
};

struct AgentResponse {
    std::uint64_t id = 0;
    std::string text;
};

// Line-delimited JSON codec: one object per line, arbitrary UTF-8 payload
// (escaped by the JSON layer), newline terminated by the transport.
std::string agent_request_to_json_line(const AgentRequest& request);
AgentRequest agent_request_from_json_line(const std::string& line); // throws IoError
std::string agent_response_to_json_line(const AgentResponse& response);
AgentResponse agent_response_from_json_line(const std::string& line); // throws IoError

// Byte stream carrying newline-terminated messages to one agent process.
class Transport {
  public:
    virtual ~Transport() = default;

    // Writes line + LF. Throws TransportClosed when the peer went away.
    virtual void send_line(const std::string& line) = 0;

    // Blocks for the next LF-terminated line (LF stripped). Throws Timeout
    // after timeout_ms, TransportClosed on EOF.
    virtual std::string recv_line(int timeout_ms) = 0;
};

// Address forms: "exec:<command line>" spawns a child on pipes;
// "tcp:<host>:<port>" connects a socket. Throws ConfigError on malformed
// addresses, TransportClosed when the connection cannot be established.
std::unique_ptr<Transport> open_transport(const std::string& address);

// Ship one request and wait for its matching response text.
// Throws Timeout / TransportClosed / IdMismatch.
std::string exchange(Transport& transport, const AgentRequest& request, int timeout_ms);

constexpr int kDefaultAgentTimeoutMs = 120000;

} // namespace gridlab
