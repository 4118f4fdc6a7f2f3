#include "teachdemo/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "teachdemo/errors.hpp"

namespace teachdemo {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

void ignore_sigpipe() {
    static const bool once = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)once;
}

class FdStream final : public Stream {
public:
    FdStream(int read_fd, int write_fd, bool is_socket, pid_t child = -1)
        : read_fd_(read_fd), write_fd_(write_fd), is_socket_(is_socket), child_(child) {}

    ~FdStream() override { close(); }

    bool read_line(std::string& line, std::size_t max_bytes, int timeout_ms) override {
        line.clear();
        while (true) {
            const std::size_t nl = buffer_.find('\n', scanned_);
            if (nl != std::string::npos) {
                if (nl > max_bytes) {
                    throw TransportError("frame exceeds " + std::to_string(max_bytes) + " bytes");
                }
                line.assign(buffer_, 0, nl);
                buffer_.erase(0, nl + 1);
                scanned_ = 0;
                return true;
            }
            scanned_ = buffer_.size();
            if (buffer_.size() > max_bytes) {
                throw TransportError("frame exceeds " + std::to_string(max_bytes) + " bytes");
            }
            if (read_fd_ < 0) {
                throw TransportError("stream closed");
            }
            if (timeout_ms > 0) {
                pollfd pfd{read_fd_, POLLIN, 0};
                int rc;
                do {
                    rc = ::poll(&pfd, 1, timeout_ms);
                } while (rc < 0 && errno == EINTR);
                if (rc == 0) {
                    throw TransportError("timed out after " + std::to_string(timeout_ms) + " ms");
                }
                if (rc < 0) {
                    throw TransportError(errno_text("poll"));
                }
            }
            char chunk[65536];
            ssize_t n;
            do {
                n = ::read(read_fd_, chunk, sizeof chunk);
            } while (n < 0 && errno == EINTR);
            if (n < 0) {
                throw TransportError(errno_text("read"));
            }
            if (n == 0) {
                if (buffer_.empty()) {
                    return false;
                }
                throw TransportError("peer closed mid-frame");
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    void write_all(std::string_view bytes) override {
        if (write_fd_ < 0) {
            throw TransportError("stream closed");
        }
        while (!bytes.empty()) {
            ssize_t n;
            do {
                n = is_socket_ ? ::send(write_fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL)
                               : ::write(write_fd_, bytes.data(), bytes.size());
            } while (n < 0 && errno == EINTR);
            if (n < 0) {
                throw TransportError(errno_text("write"));
            }
            bytes.remove_prefix(static_cast<std::size_t>(n));
        }
    }

    void interrupt() noexcept override {
        if (is_socket_ && read_fd_ >= 0) {
            ::shutdown(read_fd_, SHUT_RDWR);
        }
    }

    void close() noexcept override {
        if (is_socket_ && read_fd_ >= 0) {
            ::shutdown(read_fd_, SHUT_RDWR);
        }
        if (write_fd_ >= 0 && write_fd_ != read_fd_ && write_fd_ > 2) {
            ::close(write_fd_);
        }
        if (read_fd_ > 2) {
            ::close(read_fd_);
        }
        read_fd_ = write_fd_ = -1;
        reap();
    }

private:
    void reap() noexcept {
        if (child_ <= 0) {
            return;
        }
        // Closing the pipes is the child's cue to exit; give it a moment.
        for (int i = 0; i < 100; ++i) {
            if (::waitpid(child_, nullptr, WNOHANG) != 0) {
                child_ = -1;
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        ::kill(child_, SIGKILL);
        ::waitpid(child_, nullptr, 0);
        child_ = -1;
    }

    int read_fd_;
    int write_fd_;
    bool is_socket_;
    pid_t child_;
    std::string buffer_;
    std::size_t scanned_ = 0;
};

StreamPtr connect_tcp(const TcpAddress& addr, int timeout_ms) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(addr.port);
    if (const int rc = ::getaddrinfo(addr.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
        throw TransportError("resolve " + addr.host + ": " + ::gai_strerror(rc));
    }
    int fd = -1;
    std::string last_error = "no addresses";
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno_text("socket");
            continue;
        }
        const int flags = ::fcntl(fd, F_GETFL, 0);
        ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
        if (rc < 0 && errno == EINPROGRESS) {
            pollfd pfd{fd, POLLOUT, 0};
            rc = ::poll(&pfd, 1, timeout_ms > 0 ? timeout_ms : -1);
            if (rc == 1) {
                int err = 0;
                socklen_t len = sizeof err;
                ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
                errno = err;
                rc = err == 0 ? 0 : -1;
            } else {
                errno = rc == 0 ? ETIMEDOUT : errno;
                rc = -1;
            }
        }
        if (rc == 0) {
            ::fcntl(fd, F_SETFL, flags);
            break;
        }
        last_error = errno_text("connect");
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) {
        throw TransportError(addr.host + ":" + port + ": " + last_error);
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::make_unique<FdStream>(fd, fd, true);
}

StreamPtr spawn(const std::string& command) {
    ignore_sigpipe();
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) < 0) {
        throw TransportError(errno_text("pipe"));
    }
    if (::pipe2(from_child, O_CLOEXEC) < 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        throw TransportError(errno_text("pipe"));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
        for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) {
            ::close(fd);
        }
        throw TransportError(errno_text("fork"));
    }
    if (pid == 0) {
        ::dup2(to_child[0], STDIN_FILENO);
        ::dup2(from_child[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    return std::make_unique<FdStream>(from_child[0], to_child[1], false, pid);
}

}  // namespace

TcpAddress parse_tcp_address(std::string_view address) {
    constexpr std::string_view kScheme = "tcp://";
    if (!address.starts_with(kScheme)) {
        throw std::invalid_argument("expected tcp://host:port, got '" + std::string(address) + "'");
    }
    address.remove_prefix(kScheme.size());
    const std::size_t colon = address.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == address.size()) {
        throw std::invalid_argument("expected tcp://host:port");
    }
    TcpAddress out;
    out.host = std::string(address.substr(0, colon));
    if (out.host.size() > 2 && out.host.front() == '[' && out.host.back() == ']') {
        out.host = out.host.substr(1, out.host.size() - 2);
    }
    int port = 0;
    for (char c : address.substr(colon + 1)) {
        if (c < '0' || c > '9' || port > 65535) {
            throw std::invalid_argument("bad port in tcp address");
        }
        port = port * 10 + (c - '0');
    }
    if (port > 65535) {
        throw std::invalid_argument("bad port in tcp address");
    }
    out.port = port;
    return out;
}

StreamPtr connect_stream(std::string_view address, int timeout_ms) {
    if (address.starts_with("tcp://")) {
        TcpAddress addr;
        try {
            addr = parse_tcp_address(address);
        } catch (const std::invalid_argument& e) {
            throw TransportError(e.what());
        }
        return connect_tcp(addr, timeout_ms);
    }
    if (address.starts_with("exec:")) {
        return spawn(std::string(address.substr(5)));
    }
    throw TransportError("unsupported address '" + std::string(address) + "' (use tcp://host:port or exec:CMD)");
}

StreamPtr stdio_stream() {
    ignore_sigpipe();
    return std::make_unique<FdStream>(STDIN_FILENO, STDOUT_FILENO, false);
}

Listener::Listener(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res); rc != 0) {
        throw TransportError("resolve " + host + ": " + ::gai_strerror(rc));
    }
    std::string last_error = "no addresses";
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno_text("socket");
            continue;
        }
        const int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
            fd_ = fd;
            break;
        }
        last_error = errno_text("bind");
        ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) {
        throw TransportError(host + ":" + service + ": " + last_error);
    }
    sockaddr_storage bound{};
    socklen_t len = sizeof bound;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = bound.ss_family == AF_INET6 ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
                                        : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
    ignore_sigpipe();
}

Listener::~Listener() { close(); }

StreamPtr Listener::accept(int timeout_ms) {
    if (fd_ < 0) {
        return nullptr;
    }
    pollfd pfd{fd_, POLLIN, 0};
    int rc;
    do {
        rc = ::poll(&pfd, 1, timeout_ms);
    } while (rc < 0 && errno == EINTR);
    if (rc <= 0 || fd_ < 0) {
        return nullptr;
    }
    const int conn = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (conn < 0) {
        return nullptr;
    }
    const int one = 1;
    ::setsockopt(conn, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::make_unique<FdStream>(conn, conn, true);
}

void Listener::close() noexcept {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

}  // namespace teachdemo
