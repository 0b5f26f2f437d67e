#include "twcrawl/firehose_server.hpp"

#include <charconv>
#include <httplib.h>
#include <json.hpp>

#include "twcrawl/errors.hpp"
#include "twcrawl/search_wire.hpp"

namespace twcrawl {
namespace {

void set_error(httplib::Response& res, int status, const std::string& code, const std::string& msg) {
  res.status = status;
  res.set_content(nlohmann::json{{"error", code}, {"message", msg}}.dump(), "application/json");
}

void set_rate_headers(httplib::Response& res, int remaining, Timestamp reset_at) {
  res.set_header(wire::kRemainingHeader, std::to_string(remaining));
  res.set_header(wire::kResetHeader, std::to_string(to_epoch_ms(reset_at) / 1000));
}

}  // namespace

struct FirehoseServer::Impl {
  Impl(MockFirehose& f, Clock& c, bool honor) : firehose(f), clock(c), honor_virtual_now(honor) {}

  MockFirehose& firehose;
  Clock& clock;
  bool honor_virtual_now;
  httplib::Server server;

  Timestamp request_time(const httplib::Request& req) const {
    if (honor_virtual_now && req.has_header(wire::kVirtualNowHeader)) {
      const std::string v = req.get_header_value(wire::kVirtualNowHeader);
      std::int64_t ms = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), ms);
      if (ec == std::errc{} && p == v.data() + v.size()) return from_epoch_ms(ms);
    }
    return clock.now();
  }

  static Credentials credentials(const httplib::Request& req) {
    return {req.get_header_value(wire::kKeyHeader), req.get_header_value(wire::kSecretHeader)};
  }

  void handle_search(const httplib::Request& req, httplib::Response& res) {
    int count = 15;
    if (req.has_param("count")) {
      const std::string v = req.get_param_value("count");
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), count);
      if (ec != std::errc{} || p != v.data() + v.size() || count < 1) {
        set_error(res, 400, "bad_count", "count must be a positive integer");
        return;
      }
    }
    std::optional<std::string> next;
    if (req.has_param("next")) next = req.get_param_value("next");
    try {
      const ApiPage page = firehose.search(credentials(req), count, next, request_time(req));
      set_rate_headers(res, page.remaining, page.reset_at);
      res.set_content(wire::page_body(page), "application/json");
    } catch (const AuthError& e) {
      set_error(res, 401, "auth", e.what());
    } catch (const RateLimitError& e) {
      set_rate_headers(res, 0, e.reset_at());
      set_error(res, 429, "rate_limited", e.what());
    } catch (const BadTokenError& e) {
      set_error(res, 400, "bad_token", e.what());
    }
  }

  void handle_rate_status(const httplib::Request& req, httplib::Response& res) {
    try {
      const RateStatus s = firehose.rate_limit_status(credentials(req), request_time(req));
      set_rate_headers(res, s.remaining, s.reset_at);
      res.set_content(wire::rate_status_body(s), "application/json");
    } catch (const AuthError& e) {
      set_error(res, 401, "auth", e.what());
    }
  }
};

FirehoseServer::FirehoseServer(MockFirehose& firehose, Clock& clock, bool honor_virtual_now)
    : impl_(std::make_unique<Impl>(firehose, clock, honor_virtual_now)) {
  impl_->server.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
    impl_->handle_search(req, res);
  });
  impl_->server.Get("/rate_limit_status",
                    [this](const httplib::Request& req, httplib::Response& res) {
                      impl_->handle_rate_status(req, res);
                    });
}

FirehoseServer::~FirehoseServer() {
  // httplib only closes a bound socket from inside listen, so a server that was
  // never served would otherwise leave a listening fd behind.
  if (bound_ && !served_) start();
  stop();
}

int FirehoseServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  bound_ = true;
  return bound;
}

void FirehoseServer::serve() {
  served_ = true;
  impl_->server.listen_after_bind();
}

void FirehoseServer::start() {
  thread_ = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
}

void FirehoseServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace twcrawl
