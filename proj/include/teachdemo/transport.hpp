#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace teachdemo {

/// A bidirectional byte stream carrying newline-delimited frames.
/// All failures throw TransportError.
class Stream {
public:
    virtual ~Stream() = default;

    /// Reads up to and excluding the next '\n'. Returns false on a clean EOF
    /// before any byte of the line. A line longer than `max_bytes` or a
    /// silence longer than `timeout_ms` (when positive) throws.
    virtual bool read_line(std::string& line, std::size_t max_bytes, int timeout_ms) = 0;
    virtual void write_all(std::string_view bytes) = 0;
    virtual void close() noexcept = 0;
    /// Thread-safe: unblocks a reader on another thread (sockets only).
    virtual void interrupt() noexcept {}
};

using StreamPtr = std::unique_ptr<Stream>;

/// "tcp://host:port" or "exec:COMMAND" (COMMAND run by /bin/sh with its
/// stdin/stdout as the stream).
StreamPtr connect_stream(std::string_view address, int timeout_ms);

/// The process's own stdin/stdout.
StreamPtr stdio_stream();

/// A listening TCP socket.
class Listener {
public:
    /// Binds host:port; port 0 picks a free port.
    Listener(const std::string& host, int port);
    ~Listener();
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    int port() const noexcept { return port_; }

    /// Waits up to timeout_ms (negative: forever) for a connection; returns
    /// nullptr on timeout or after close().
    StreamPtr accept(int timeout_ms);
    void close() noexcept;

private:
    int fd_ = -1;
    int port_ = 0;
};

struct TcpAddress {
    std::string host;
    int port = 0;
};

/// Parses "tcp://host:port". Throws std::invalid_argument.
TcpAddress parse_tcp_address(std::string_view address);

}  // namespace teachdemo
