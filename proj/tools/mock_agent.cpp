// Scriptable stand-in for an external agent process. Speaks the line-delimited
// JSON wire format on stdin/stdout and misbehaves on request so transport
// error handling can be exercised end to end.
//
// Usage: mock_agent <mode> [command ...]
//   valid     reply to every request with a well-formed response; the action
//             command defaults to "no operation" (override with extra args,
//             which are joined with spaces; use ';' inside an arg to send
//             several commands)
//   silent    read requests but never answer (provokes timeouts)
//   wrong-id  answer with the request id plus one
//   garbage   answer with a line that is not JSON
//   close     exit immediately without reading anything

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gridlab/bridge.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    const std::string mode = argc > 1 ? argv[1] : "valid";
    if (mode == "close") return 0;

    std::string command = "no operation";
    if (argc > 2) {
        std::ostringstream joined;
        for (int i = 2; i < argc; ++i) {
            if (i > 2) joined << ' ';
            joined << argv[i];
        }
        command = joined.str();
    }

    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        gridlab::AgentRequest request;
        try {
            request = gridlab::agent_request_from_json_line(line);
        } catch (const gridlab::Error&) {
            return 1;
        }
        if (mode == "silent") continue;
        if (mode == "garbage") {
            std::cout << "this is not a json object\n" << std::flush;
            continue;
        }
        gridlab::AgentResponse response;
        response.id = mode == "wrong-id" ? request.id + 1 : request.id;
        response.text = "<think>scripted</think><action>" + command + "</action>";
        std::cout << gridlab::agent_response_to_json_line(response) << '\n' << std::flush;
    }
    return 0;
}
