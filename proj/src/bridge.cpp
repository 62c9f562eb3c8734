#include "gridlab/bridge.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <json.hpp>
#include <sstream>

namespace gridlab {

using nlohmann::json;

std::string agent_request_to_json_line(const AgentRequest& request) {
    json entries = json::array();
    for (const TranscriptEntry& entry : request.transcript) {
        entries.push_back({{"role", entry.role}, {"text", entry.text}});
    }
    const json out = {{"id", request.id},
                      {"transcript", std::move(entries)},
                      {"char_budget_turn", request.char_budget_turn}};
    return out.dump();
}

AgentRequest agent_request_from_json_line(const std::string& line) {
    try {
        const json in = json::parse(line);
        AgentRequest request;
        request.id = in.at("id").get<std::uint64_t>();
        for (const json& item : in.at("transcript")) {
            request.transcript.push_back(
                {item.at("role").get<std::string>(), item.at("text").get<std::string>()});
        }
        request.char_budget_turn = in.at("char_budget_turn").get<long long>();
        return request;
    } catch (const json::exception& error) {
        throw Error(ErrorCode::IoError, std::string("agent request parse: ") + error.what());
    }
}

std::string agent_response_to_json_line(const AgentResponse& response) {
    const json out = {{"id", response.id}, {"text", response.text}};
    return out.dump();
}

AgentResponse agent_response_from_json_line(const std::string& line) {
    try {
        const json in = json::parse(line);
        AgentResponse response;
        response.id = in.at("id").get<std::uint64_t>();
        response.text = in.at("text").get<std::string>();
        return response;
    } catch (const json::exception& error) {
        throw Error(ErrorCode::IoError, std::string("agent response parse: ") + error.what());
    }
}

namespace {

// Shared line-framing over a pair of file descriptors with poll-based
// timeouts. Owns the descriptors; closes them on destruction.
class FdLineChannel {
  public:
    FdLineChannel(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

    ~FdLineChannel() {
        if (read_fd_ >= 0) ::close(read_fd_);
        if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
    }

    void send_line(const std::string& line) {
        std::string framed = line;
        framed.push_back('\n');
        std::size_t sent = 0;
        while (sent < framed.size()) {
            const ssize_t n = ::write(write_fd_, framed.data() + sent, framed.size() - sent);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw Error(ErrorCode::TransportClosed,
                            std::string("write failed: ") + std::strerror(errno));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    std::string recv_line(int timeout_ms) {
        const auto deadline =
            std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
        for (;;) {
            const std::size_t newline = buffer_.find('\n');
            if (newline != std::string::npos) {
                std::string line = buffer_.substr(0, newline);
                buffer_.erase(0, newline + 1);
                return line;
            }
            const auto now = std::chrono::steady_clock::now();
            if (now >= deadline) {
                throw Error(ErrorCode::Timeout, "agent did not respond in time");
            }
            const auto remaining =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
            struct pollfd pfd;
            pfd.fd = read_fd_;
            pfd.events = POLLIN;
            const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()) + 1);
            if (ready < 0) {
                if (errno == EINTR) continue;
                throw Error(ErrorCode::TransportClosed,
                            std::string("poll failed: ") + std::strerror(errno));
            }
            if (ready == 0) {
                throw Error(ErrorCode::Timeout, "agent did not respond in time");
            }
            char chunk[4096];
            const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
            if (n < 0) {
                if (errno == EINTR) continue;
                throw Error(ErrorCode::TransportClosed,
                            std::string("read failed: ") + std::strerror(errno));
            }
            if (n == 0) {
                throw Error(ErrorCode::TransportClosed, "agent closed the connection");
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

  private:
    int read_fd_;
    int write_fd_;
    std::string buffer_;
};

class ExecTransport final : public Transport {
  public:
    explicit ExecTransport(const std::string& command_line) {
        std::vector<std::string> args;
        std::istringstream words(command_line);
        std::string word;
        while (words >> word) args.push_back(word);
        if (args.empty()) {
            throw Error(ErrorCode::ConfigError, "exec transport needs a command");
        }

        int to_child[2];
        int from_child[2];
        if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
            throw Error(ErrorCode::TransportClosed, "pipe creation failed");
        }
        child_ = ::fork();
        if (child_ < 0) {
            throw Error(ErrorCode::TransportClosed, "fork failed");
        }
        if (child_ == 0) {
            ::dup2(to_child[0], STDIN_FILENO);
            ::dup2(from_child[1], STDOUT_FILENO);
            ::close(to_child[0]);
            ::close(to_child[1]);
            ::close(from_child[0]);
            ::close(from_child[1]);
            std::vector<char*> argv;
            for (std::string& arg : args) argv.push_back(arg.data());
            argv.push_back(nullptr);
            ::execvp(argv[0], argv.data());
            ::_exit(127);
        }
        ::close(to_child[0]);
        ::close(from_child[1]);
        channel_ = std::make_unique<FdLineChannel>(from_child[0], to_child[1]);
        // A dead child surfaces as EOF/EPIPE on the pipes, not as a signal.
        ::signal(SIGPIPE, SIG_IGN);
    }

    ~ExecTransport() override {
        channel_.reset(); // closes the pipes; child sees EOF
        if (child_ > 0) {
            int status = 0;
            ::kill(child_, SIGTERM);
            ::waitpid(child_, &status, 0);
        }
    }

    void send_line(const std::string& line) override { channel_->send_line(line); }
    std::string recv_line(int timeout_ms) override { return channel_->recv_line(timeout_ms); }

  private:
    pid_t child_ = -1;
    std::unique_ptr<FdLineChannel> channel_;
};

class TcpTransport final : public Transport {
  public:
    TcpTransport(const std::string& host, const std::string& port) {
        struct addrinfo hints;
        std::memset(&hints, 0, sizeof(hints));
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        struct addrinfo* result = nullptr;
        if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &result) != 0) {
            throw Error(ErrorCode::TransportClosed, "cannot resolve " + host + ":" + port);
        }
        int fd = -1;
        for (struct addrinfo* entry = result; entry != nullptr; entry = entry->ai_next) {
            fd = ::socket(entry->ai_family, entry->ai_socktype, entry->ai_protocol);
            if (fd < 0) continue;
            if (::connect(fd, entry->ai_addr, entry->ai_addrlen) == 0) break;
            ::close(fd);
            fd = -1;
        }
        ::freeaddrinfo(result);
        if (fd < 0) {
            throw Error(ErrorCode::TransportClosed, "cannot connect to " + host + ":" + port);
        }
        channel_ = std::make_unique<FdLineChannel>(fd, fd);
        ::signal(SIGPIPE, SIG_IGN);
    }

    void send_line(const std::string& line) override { channel_->send_line(line); }
    std::string recv_line(int timeout_ms) override { return channel_->recv_line(timeout_ms); }

  private:
    std::unique_ptr<FdLineChannel> channel_;
};

} // namespace

std::unique_ptr<Transport> open_transport(const std::string& address) {
    if (address.rfind("exec:", 0) == 0) {
        return std::make_unique<ExecTransport>(address.substr(5));
    }
    if (address.rfind("tcp:", 0) == 0) {
        const std::string rest = address.substr(4);
        const std::size_t colon = rest.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
            throw Error(ErrorCode::ConfigError, "tcp address must be tcp:host:port");
        }
        return std::make_unique<TcpTransport>(rest.substr(0, colon), rest.substr(colon + 1));
    }
    throw Error(ErrorCode::ConfigError, "unknown transport address: " + address);
}

std::string exchange(Transport& transport, const AgentRequest& request, int timeout_ms) {
    transport.send_line(agent_request_to_json_line(request));
    const std::string line = transport.recv_line(timeout_ms);
    AgentResponse response;
    try {
        response = agent_response_from_json_line(line);
    } catch (const Error&) {
        throw Error(ErrorCode::TransportClosed, "malformed agent response line");
    }
    if (response.id != request.id) {
        std::ostringstream msg;
        msg << "response id " << response.id << " does not match request id " << request.id;
        throw Error(ErrorCode::IdMismatch, msg.str());
    }
    return response.text;
}

} // namespace gridlab
