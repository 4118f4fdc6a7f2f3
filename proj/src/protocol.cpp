#include "teachdemo/protocol.hpp"

#include <chrono>

#include "json.hpp"
#include <spdlog/spdlog.h>

#include "teachdemo/errors.hpp"

namespace teachdemo {

using nlohmann::json;

namespace {

void send_frame(Stream& stream, const json& frame) {
    std::string line = frame.dump(-1, ' ', false, json::error_handler_t::replace);
    line += '\n';
    stream.write_all(line);
}

void send_error(Stream& stream, const std::string& message) noexcept {
    try {
        send_frame(stream, json{{"type", "error"}, {"message", message}});
    } catch (const std::exception&) {
        // The peer is gone; nothing left to tell it.
    }
}

json parse_frame(const std::string& line) {
    json frame = json::parse(line, nullptr, false);
    if (frame.is_discarded() || !frame.is_object()) {
        throw ProtocolError("frame is not a JSON object");
    }
    if (!frame.contains("type") || !frame["type"].is_string()) {
        throw ProtocolError("frame has no string \"type\"");
    }
    return frame;
}

const std::string& string_field(const json& frame, const char* name) {
    const auto it = frame.find(name);
    if (it == frame.end() || !it->is_string()) {
        throw ProtocolError(std::string("missing string field \"") + name + "\"");
    }
    return it->get_ref<const std::string&>();
}

std::int64_t int_field(const json& frame, const char* name, std::int64_t min_value) {
    const auto it = frame.find(name);
    if (it == frame.end() || !it->is_number_integer() || it->get<std::int64_t>() < min_value) {
        throw ProtocolError(std::string("field \"") + name + "\" must be an integer >= " + std::to_string(min_value));
    }
    return it->get<std::int64_t>();
}

}  // namespace

void serve_connection(Stream& stream, const GeneratorFactory& factory, bool parallel) {
    std::string line;
    GeneratorPtr generator;
    std::string session_id;
    bool greeted = false;
    try {
        while (stream.read_line(line, kMaxFrameBytes, 0)) {
            const json frame = parse_frame(line);
            const std::string& type = frame["type"].get_ref<const std::string&>();
            if (!greeted) {
                if (type != "hello") {
                    throw ProtocolError("expected hello, got \"" + type + "\"");
                }
                const std::string& version = string_field(frame, "protocol_version");
                if (version != kProtocolVersion) {
                    throw ProtocolError("unsupported protocol version \"" + version + "\" (server speaks " +
                                        std::string(kProtocolVersion) + ")");
                }
                send_frame(stream, json{{"type", "hello"},
                                        {"protocol_version", kProtocolVersion},
                                        {"parallel", parallel}});
                greeted = true;
                continue;
            }
            if (type != "generate") {
                throw ProtocolError("unexpected frame type \"" + type + "\"");
            }
            GenerateRequest req;
            req.session_id = string_field(frame, "session_id");
            req.prefix = string_field(frame, "prefix");
            req.max_new_tokens = static_cast<int>(int_field(frame, "max_new_tokens", 1));
            if (frame.contains("trim_tokens")) {
                req.trim_tokens = static_cast<int>(int_field(frame, "trim_tokens", 0));
            }
            if (!generator) {
                session_id = req.session_id;
                generator = factory(session_id);
            } else if (req.session_id != session_id) {
                throw ProtocolError("one session per connection (bound to \"" + session_id + "\")");
            }
            const GenerateResponse resp = generator->generate(req);
            send_frame(stream, json{{"type", "result"},
                                    {"text", resp.text},
                                    {"eos", resp.eos},
                                    {"token_count", resp.token_count}});
        }
    } catch (const TransportError& e) {
        spdlog::debug("connection dropped: {}", e.what());
        send_error(stream, e.what());
    } catch (const std::exception& e) {
        send_error(stream, e.what());
    }
    stream.close();
}

Server::Server(const std::string& host, int port, GeneratorFactory factory, bool parallel)
    : listener_(host, port), factory_(std::move(factory)), parallel_(parallel) {
    acceptor_ = std::thread([this] { accept_loop(); });
}

Server::~Server() { stop(); }

void Server::stop() {
    if (stopping_.exchange(true)) {
        return;
    }
    {
        std::lock_guard lock(mutex_);
        for (const auto& weak : live_) {
            if (auto s = weak.lock()) {
                s->interrupt();
            }
        }
    }
    if (acceptor_.joinable()) {
        acceptor_.join();
    }
    listener_.close();
    for (std::thread& t : workers_) {
        t.join();
    }
    workers_.clear();
    live_.clear();
}

void Server::accept_loop() {
    while (!stopping_.load()) {
        std::shared_ptr<Stream> conn(listener_.accept(100));
        if (!conn) {
            continue;
        }
        {
            std::lock_guard lock(mutex_);
            std::erase_if(live_, [](const auto& w) { return w.expired(); });
            live_.push_back(conn);
            if (stopping_.load()) {
                conn->interrupt();
            }
            if (parallel_) {
                workers_.emplace_back([this, conn] { serve_connection(*conn, factory_, true); });
                continue;
            }
        }
        serve_connection(*conn, factory_, false);
    }
}

void serve(std::string_view listen_address, const GeneratorFactory& factory, bool parallel,
           const std::atomic<bool>* stop) {
    if (listen_address == "stdio") {
        StreamPtr s = stdio_stream();
        serve_connection(*s, factory, false);
        return;
    }
    TcpAddress addr;
    try {
        addr = parse_tcp_address(listen_address);
    } catch (const std::invalid_argument& e) {
        throw TransportError(e.what());
    }
    Server server(addr.host, addr.port, factory, parallel);
    spdlog::info("serving {} on {}:{}", kProtocolVersion, addr.host, server.port());
    while (!stop || !stop->load()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.stop();
}

RemoteGenerator::RemoteGenerator(std::string address, int timeout_ms)
    : address_(std::move(address)), timeout_ms_(timeout_ms) {}

RemoteGenerator::~RemoteGenerator() {
    if (stream_) {
        stream_->close();
    }
}

void RemoteGenerator::connect() {
    try {
        stream_ = connect_stream(address_, timeout_ms_);
        send_frame(*stream_, json{{"type", "hello"}, {"protocol_version", kProtocolVersion}});
        std::string line;
        if (!stream_->read_line(line, kMaxFrameBytes, timeout_ms_)) {
            throw ProtocolError("server closed the connection during hello");
        }
        const json frame = parse_frame(line);
        if (frame["type"] == "error") {
            throw ProtocolError("server refused hello: " + frame.value("message", std::string()));
        }
        if (frame["type"] != "hello" || string_field(frame, "protocol_version") != kProtocolVersion) {
            throw ProtocolError("bad hello reply");
        }
        parallel_ = frame.value("parallel", false);
    } catch (const std::exception& e) {
        stream_.reset();
        throw GeneratorUnavailable(address_ + ": " + e.what());
    }
}

GenerateResponse RemoteGenerator::generate(const GenerateRequest& request) {
    if (!stream_) {
        connect();
    }
    try {
        json frame{{"type", "generate"},
                   {"session_id", request.session_id},
                   {"prefix", request.prefix},
                   {"max_new_tokens", request.max_new_tokens}};
        if (request.trim_tokens > 0) {
            frame["trim_tokens"] = request.trim_tokens;
        }
        send_frame(*stream_, frame);
        std::string line;
        if (!stream_->read_line(line, kMaxFrameBytes, timeout_ms_)) {
            throw ProtocolError("server closed the connection");
        }
        const json reply = parse_frame(line);
        if (reply["type"] == "error") {
            throw ProtocolError("server error: " + reply.value("message", std::string()));
        }
        if (reply["type"] != "result") {
            throw ProtocolError("expected a result frame");
        }
        GenerateResponse resp;
        resp.text = string_field(reply, "text");
        const auto eos = reply.find("eos");
        if (eos == reply.end() || !eos->is_boolean()) {
            throw ProtocolError("missing boolean field \"eos\"");
        }
        resp.eos = eos->get<bool>();
        resp.token_count = static_cast<int>(int_field(reply, "token_count", 0));
        return resp;
    } catch (const GeneratorUnavailable&) {
        throw;
    } catch (const std::exception& e) {
        stream_.reset();
        throw GeneratorUnavailable(address_ + ": " + e.what());
    }
}

}  // namespace teachdemo
