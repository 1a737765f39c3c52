// Copyright 2026 The Qeyboard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// WebSocket + HTTP front end. One port serves:
//
//   ws://host:port/          wire protocol (protocol.hpp)
//   GET /wav/<token>         rendered session audio
//   GET /health              "ok"
//
// Everything runs on one io_context thread, so sessions, timers and
// connections need no locking.

#pragma once

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>

#include "qeyboard/service/config.hpp"
#include "qeyboard/service/protocol.hpp"

namespace qeyboard::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

class Server;

namespace detail {

class WsConnection : public std::enable_shared_from_this<WsConnection> {
  public:
    WsConnection(tcp::socket socket, SessionManager &mgr) : ws_(std::move(socket)), mgr_(mgr) {}

    void start(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        std::weak_ptr<WsConnection> weak = shared_from_this();
        client_.wake = [weak] {
            if (auto self = weak.lock()) {
                self->pump();
            }
        };
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
            if (!ec) {
                self->read();
            }
        });
    }

    void close() {
        if (closed_) {
            return;
        }
        pump();
        closing_ = true;
        maybe_close();
    }

  private:
    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->shutdown();
                return;
            }
            const auto text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            for (auto &r : self->mgr_.handle(self->client_, text)) {
                self->outbox_.push_back(r.dump());
            }
            self->pump();
            self->read();
        });
    }

    // Frames stay in the bounded subscription queues while a write is in
    // flight, so a slow client loses the oldest frames, not memory.
    void pump() {
        if (closed_ || writing_) {
            return;
        }
        if (outbox_.empty()) {
            for (auto &m : mgr_.collect(client_)) {
                outbox_.push_back(m.dump());
            }
        }
        if (outbox_.empty()) {
            maybe_close();
            return;
        }
        writing_ = true;
        ws_.text(true);
        ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->writing_ = false;
            if (ec) {
                self->shutdown();
                return;
            }
            self->outbox_.pop_front();
            self->pump();
        });
    }

    void maybe_close() {
        if (!closing_ || writing_ || !outbox_.empty() || closed_) {
            return;
        }
        closed_ = true;
        ws_.async_close(websocket::close_code::going_away, [self = shared_from_this()](beast::error_code) {
            self->client_.subscriptions.clear();
        });
    }

    void shutdown() {
        closed_ = true;
        client_.subscriptions.clear();
        outbox_.clear();
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    SessionManager &mgr_;
    Client client_;
    std::deque<std::string> outbox_;
    bool writing_ = false;
    bool closing_ = false;
    bool closed_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
  public:
    HttpConnection(tcp::socket socket, SessionManager &mgr,
                   std::function<void(const std::shared_ptr<WsConnection> &)> on_ws)
        : stream_(std::move(socket)), mgr_(mgr), on_ws_(std::move(on_ws)) {}

    void run() { read(); }

  private:
    void read() {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                return;
            }
            self->handle();
        });
    }

    void handle() {
        if (websocket::is_upgrade(req_)) {
            stream_.expires_never();
            auto ws = std::make_shared<WsConnection>(stream_.release_socket(), mgr_);
            on_ws_(ws);
            ws->start(std::move(req_));
            return;
        }
        auto res = std::make_shared<http::response<http::vector_body<std::uint8_t>>>();
        res->version(req_.version());
        res->keep_alive(req_.keep_alive());
        res->set(http::field::server, "qeyboard");
        const std::string target(req_.target());
        auto text = [&](http::status st, std::string_view body) {
            res->result(st);
            res->set(http::field::content_type, "text/plain");
            res->body().assign(body.begin(), body.end());
        };
        if (req_.method() != http::verb::get) {
            text(http::status::method_not_allowed, "only GET is supported\n");
        } else if (target == "/health") {
            text(http::status::ok, "ok\n");
        } else if (target.rfind("/wav/", 0) == 0) {
            if (auto bytes = mgr_.wavs().get(target.substr(5))) {
                res->result(http::status::ok);
                res->set(http::field::content_type, "audio/wav");
                res->set(http::field::content_disposition, "attachment; filename=\"" + target.substr(5) + ".wav\"");
                res->body() = *bytes;
            } else {
                text(http::status::not_found, "unknown or expired token\n");
            }
        } else {
            text(http::status::not_found, "not found\n");
        }
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
            if (ec || !res->keep_alive()) {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                return;
            }
            self->read();
        });
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    SessionManager &mgr_;
    std::function<void(const std::shared_ptr<WsConnection> &)> on_ws_;
};

}  // namespace detail

class Server {
  public:
    explicit Server(ServiceConfig cfg, std::uint64_t id_seed = std::random_device{}())
        : mgr_(std::move(cfg), id_seed), acceptor_(io_) {
        mgr_.on_created = [this](const std::shared_ptr<Session> &s) { start_ticker(s); };
        mgr_.on_closed = [this](const std::string &id) {
            if (auto it = tickers_.find(id); it != tickers_.end()) {
                it->second->timer.cancel();
                tickers_.erase(it);
            }
        };
    }

    net::io_context &io() { return io_; }
    SessionManager &manager() { return mgr_; }

    /// Binds and listens; returns the bound port. Throws
    /// boost::system::system_error if the address is unavailable.
    std::uint16_t start() {
        const auto &c = mgr_.config();
        tcp::endpoint ep(net::ip::make_address(c.host), c.port);
        acceptor_.open(ep.protocol());
        acceptor_.set_option(net::socket_base::reuse_address(true));
        acceptor_.bind(ep);
        acceptor_.listen();
        accept();
        return acceptor_.local_endpoint().port();
    }

    /// Runs the io loop until stop() completes.
    void run() { io_.run(); }

    /// Thread-safe. Closes every session, says goodbye to clients and ends run().
    void stop() {
        net::post(io_, [this] {
            if (stopping_) {
                return;
            }
            stopping_ = true;
            beast::error_code ignored;
            acceptor_.close(ignored);
            mgr_.close_all();
            for (auto &w : connections_) {
                if (auto c = w.lock()) {
                    c->close();
                }
            }
            // Give close frames a moment to flush.
            auto t = std::make_shared<net::steady_timer>(io_, std::chrono::milliseconds(200));
            t->async_wait([this, t](beast::error_code) { io_.stop(); });
        });
    }

  private:
    struct Ticker {
        explicit Ticker(net::io_context &io) : timer(io) {}
        net::steady_timer timer;
        std::chrono::steady_clock::time_point t0;
        std::uint64_t next = 0;
        double dt = 0.1;
    };

    void accept() {
        acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                return;  // acceptor closed
            }
            std::make_shared<detail::HttpConnection>(std::move(socket), mgr_,
                                                     [this](const std::shared_ptr<detail::WsConnection> &ws) {
                                                         std::erase_if(connections_,
                                                                       [](const auto &w) { return w.expired(); });
                                                         connections_.push_back(ws);
                                                     })
                ->run();
            accept();
        });
    }

    void start_ticker(const std::shared_ptr<Session> &s) {
        auto t = std::make_shared<Ticker>(io_);
        t->t0 = std::chrono::steady_clock::now();
        t->dt = s->dt();
        tickers_[s->id()] = t;
        schedule(s->id(), t);
    }

    // Tick i fires at t0 + i*dt, so scheduling jitter does not accumulate.
    void schedule(const std::string &id, const std::shared_ptr<Ticker> &t) {
        const auto at = t->t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(static_cast<double>(t->next) * t->dt));
        t->timer.expires_at(at);
        t->timer.async_wait([this, id, t](beast::error_code ec) {
            if (ec) {
                return;
            }
            if (!mgr_.tick(id)) {
                return;
            }
            ++t->next;
            schedule(id, t);
        });
    }

    net::io_context io_;
    SessionManager mgr_;
    tcp::acceptor acceptor_;
    std::map<std::string, std::shared_ptr<Ticker>> tickers_;
    std::vector<std::weak_ptr<detail::WsConnection>> connections_;
    bool stopping_ = false;
};

}  // namespace qeyboard::service
