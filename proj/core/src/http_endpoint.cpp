#include "twcrawl/http_endpoint.hpp"

#include <httplib.h>
#include <json.hpp>
#include <mutex>

#include "twcrawl/errors.hpp"
#include "twcrawl/search_wire.hpp"

namespace twcrawl {

struct HttpSearchEndpoint::Impl {
  std::string base_url;
  bool send_virtual_now;
  std::mutex mu;
  httplib::Client client;

  Impl(std::string url, bool virtual_now)
      : base_url(std::move(url)), send_virtual_now(virtual_now), client(base_url) {
    client.set_keep_alive(true);
    client.set_connection_timeout(5);
    client.set_read_timeout(30);
  }

  httplib::Headers headers(const Credentials& creds, Timestamp now) const {
    httplib::Headers h{{wire::kKeyHeader, creds.app_key}, {wire::kSecretHeader, creds.app_secret}};
    if (send_virtual_now) h.emplace(wire::kVirtualNowHeader, std::to_string(to_epoch_ms(now)));
    return h;
  }

  httplib::Result get(const std::string& path, const httplib::Headers& h) {
    std::lock_guard lock(mu);
    auto res = client.Get(path, h);
    if (!res) {
      throw NetworkError("GET " + base_url + path + " failed: " + httplib::to_string(res.error()));
    }
    return res;
  }

  static Timestamp reset_header(const httplib::Response& r) {
    if (!r.has_header(wire::kResetHeader)) return {};
    return from_epoch_ms(std::stoll(r.get_header_value(wire::kResetHeader)) * 1000);
  }

  static void raise_for_status(const httplib::Response& r) {
    if (r.status == 200) return;
    std::string code;
    std::string message = r.body;
    try {
      const auto j = nlohmann::json::parse(r.body);
      code = j.value("error", "");
      message = j.value("message", r.body);
    } catch (const nlohmann::json::exception&) {
    }
    if (r.status == 401) throw AuthError(message);
    if (r.status == 429) throw RateLimitError(reset_header(r));
    if (r.status == 400 && code == "bad_token") throw BadTokenError(message);
    if (r.status >= 500) throw NetworkError("HTTP " + std::to_string(r.status) + ": " + message);
    throw Error("HTTP " + std::to_string(r.status) + ": " + message);
  }
};

HttpSearchEndpoint::HttpSearchEndpoint(std::string base_url, bool send_virtual_now)
    : impl_(std::make_unique<Impl>(std::move(base_url), send_virtual_now)) {}

HttpSearchEndpoint::~HttpSearchEndpoint() = default;

ApiPage HttpSearchEndpoint::search(const Credentials& creds, int count,
                                   const std::optional<std::string>& next_token, Timestamp now) {
  httplib::Params params{{"count", std::to_string(count)}};
  if (next_token) params.emplace("next", *next_token);
  const std::string path = httplib::append_query_params("/search", params);
  auto res = impl_->get(path, impl_->headers(creds, now));
  Impl::raise_for_status(*res);
  ApiPage page = wire::parse_page_body(res->body);
  if (res->has_header(wire::kRemainingHeader)) {
    page.remaining = std::stoi(res->get_header_value(wire::kRemainingHeader));
  }
  page.reset_at = Impl::reset_header(*res);
  return page;
}

RateStatus HttpSearchEndpoint::rate_limit_status(const Credentials& creds, Timestamp now) {
  auto res = impl_->get("/rate_limit_status", impl_->headers(creds, now));
  Impl::raise_for_status(*res);
  return wire::parse_rate_status_body(res->body);
}

}  // namespace twcrawl
