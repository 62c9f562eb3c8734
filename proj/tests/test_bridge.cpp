#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "gridlab/bridge.hpp"

using namespace gridlab;

namespace {

std::string mock_agent_path() {
    const char* path = std::getenv("MOCK_AGENT");
    REQUIRE(path != nullptr);
    return std::string(path);
}

AgentRequest sample_request() {
    AgentRequest request;
    request.id = 7;
    request.transcript = {
        {"system", "You are a helpful assistant."},
        {"environment", "maze\n###\n#P#\n###\nlines with\nnewlines"},
        {"agent", "<think>déjà vu ✓</think><action>move up</action>"},
        {"environment", "tab\there \"quoted\" and backslash \\"},
    };
    request.char_budget_turn = 12000;
    return request;
}

} // namespace

TEST_CASE("request lines survive a round trip through the wire format") {
    const AgentRequest request = sample_request();
    const std::string line = agent_request_to_json_line(request);
    CHECK(line.find('\n') == std::string::npos);

    const AgentRequest back = agent_request_from_json_line(line);
    CHECK(back.id == request.id);
    CHECK(back.char_budget_turn == request.char_budget_turn);
    REQUIRE(back.transcript.size() == request.transcript.size());
    for (std::size_t i = 0; i < request.transcript.size(); ++i) {
        CHECK(back.transcript[i].role == request.transcript[i].role);
        CHECK(back.transcript[i].text == request.transcript[i].text);
    }
}

TEST_CASE("response lines survive a round trip through the wire format") {
    AgentResponse response;
    response.id = 42;
    response.text = "<think>multi\nline\nthought</think><action>push box left; move up</action>";
    const std::string line = agent_response_to_json_line(response);
    CHECK(line.find('\n') == std::string::npos);

    const AgentResponse back = agent_response_from_json_line(line);
    CHECK(back.id == response.id);
    CHECK(back.text == response.text);
}

TEST_CASE("malformed wire lines raise io errors") {
    for (const std::string& bad :
         {std::string("not json"), std::string("{}"), std::string("{\"id\": \"x\"}"),
          std::string("[1,2,3]"), std::string("")}) {
        CHECK_THROWS_AS(agent_request_from_json_line(bad), Error);
        CHECK_THROWS_AS(agent_response_from_json_line(bad), Error);
    }
    try {
        agent_response_from_json_line("still not json");
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}

TEST_CASE("exec transport exchanges requests with a child process") {
    auto transport = open_transport("exec:" + mock_agent_path() + " valid move up");
    const AgentRequest request = sample_request();
    const std::string text = exchange(*transport, request, 5000);
    CHECK(text == "<think>scripted</think><action>move up</action>");

    // The child keeps serving subsequent requests on the same pipe.
    AgentRequest second = sample_request();
    second.id = 8;
    CHECK(exchange(*transport, second, 5000) ==
          "<think>scripted</think><action>move up</action>");
}

TEST_CASE("a silent child process turns into a timeout") {
    auto transport = open_transport("exec:" + mock_agent_path() + " silent");
    try {
        exchange(*transport, sample_request(), 250);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Timeout);
    }
}

TEST_CASE("a response with the wrong id is rejected") {
    auto transport = open_transport("exec:" + mock_agent_path() + " wrong-id");
    try {
        exchange(*transport, sample_request(), 5000);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IdMismatch);
    }
}

TEST_CASE("a child that exits immediately closes the transport") {
    auto transport = open_transport("exec:" + mock_agent_path() + " close");
    try {
        exchange(*transport, sample_request(), 5000);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TransportClosed);
    }
}

TEST_CASE("a garbage reply line closes the transport") {
    auto transport = open_transport("exec:" + mock_agent_path() + " garbage");
    try {
        exchange(*transport, sample_request(), 5000);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TransportClosed);
    }
}

TEST_CASE("transport addresses are validated") {
    CHECK_THROWS_AS(open_transport("carrier-pigeon:coop"), Error);
    CHECK_THROWS_AS(open_transport("tcp:missing-port"), Error);
    CHECK_THROWS_AS(open_transport("tcp:"), Error);
    CHECK_THROWS_AS(open_transport("exec:"), Error);
    try {
        open_transport("carrier-pigeon:coop");
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
}

TEST_CASE("tcp transport talks to a listening socket") {
    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(listener >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    REQUIRE(::listen(listener, 1) == 0);
    socklen_t len = sizeof(addr);
    REQUIRE(::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
    const int port = ntohs(addr.sin_port);

    std::thread server([listener]() {
        const int conn = ::accept(listener, nullptr, nullptr);
        if (conn < 0) return;
        std::string line;
        char c = 0;
        while (::read(conn, &c, 1) == 1 && c != '\n') line.push_back(c);
        AgentResponse response;
        response.id = agent_request_from_json_line(line).id;
        response.text = "<think>tcp</think><action>no operation</action>";
        const std::string out = agent_response_to_json_line(response) + "\n";
        (void)!::write(conn, out.data(), out.size());
        ::close(conn);
    });

    auto transport = open_transport("tcp:127.0.0.1:" + std::to_string(port));
    const std::string text = exchange(*transport, sample_request(), 5000);
    CHECK(text == "<think>tcp</think><action>no operation</action>");
    server.join();
    ::close(listener);
}

TEST_CASE("connecting to a dead port fails cleanly") {
    // Bind a port, then close it so nothing is listening there.
    const int probe = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(probe >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    REQUIRE(::bind(probe, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    socklen_t len = sizeof(addr);
    REQUIRE(::getsockname(probe, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
    const int port = ntohs(addr.sin_port);
    ::close(probe);

    try {
        open_transport("tcp:127.0.0.1:" + std::to_string(port));
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TransportClosed);
    }
}
