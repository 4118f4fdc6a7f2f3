#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "teachdemo/generator.hpp"
#include "teachdemo/transport.hpp"

namespace teachdemo {

// Wire protocol: one JSON object per line, UTF-8.
//   client -> {"type":"hello","protocol_version":"teach-demo/1"}
//   server -> {"type":"hello","protocol_version":"teach-demo/1","parallel":bool}
//   client -> {"type":"generate","session_id":s,"prefix":s,"max_new_tokens":n[,"trim_tokens":n]}
//   server -> {"type":"result","text":s,"eos":bool,"token_count":n}
// Any violation is answered with {"type":"error","message":s}, after which
// the server closes the connection. One session per connection.
inline constexpr std::string_view kProtocolVersion = "teach-demo/1";
inline constexpr std::size_t kMaxFrameBytes = std::size_t{16} << 20;

/// Runs the server side of one connection until the peer hangs up or a
/// protocol error occurs. The generator is built from the first request's
/// session id.
void serve_connection(Stream& stream, const GeneratorFactory& factory, bool parallel);

/// Accepts TCP connections on a background thread. With `parallel` each
/// connection gets its own thread; otherwise connections are served one at
/// a time in arrival order.
class Server {
public:
    Server(const std::string& host, int port, GeneratorFactory factory, bool parallel = true);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    int port() const noexcept { return listener_.port(); }
    void stop();

private:
    void accept_loop();

    Listener listener_;
    GeneratorFactory factory_;
    bool parallel_;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    std::mutex mutex_;  // guards workers_ and live_
    std::vector<std::thread> workers_;
    std::vector<std::weak_ptr<Stream>> live_;
};

/// Blocking server for the CLI: "stdio" serves one session on stdin/stdout;
/// "tcp://host:port" serves until `stop` becomes true.
void serve(std::string_view listen_address, const GeneratorFactory& factory, bool parallel,
           const std::atomic<bool>* stop = nullptr);

/// Protocol client. Every failure surfaces as GeneratorUnavailable.
class RemoteGenerator final : public Generator {
public:
    RemoteGenerator(std::string address, int timeout_ms = 60000);
    ~RemoteGenerator() override;

    GenerateResponse generate(const GenerateRequest& request) override;
    bool server_parallel() const noexcept { return parallel_; }

private:
    void connect();

    std::string address_;
    int timeout_ms_;
    StreamPtr stream_;
    bool parallel_ = false;
};

}  // namespace teachdemo
