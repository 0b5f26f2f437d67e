#pragma once

#include <memory>
#include <string>

#include "twcrawl/search_api.hpp"

namespace twcrawl {

// SearchEndpoint backed by HTTP GET against a FirehoseServer-compatible
// service. Maps 401 to AuthError, 429 to RateLimitError, 400 bad_token to
// BadTokenError and transport failures or 5xx to NetworkError.
class HttpSearchEndpoint final : public SearchEndpoint {
 public:
  // base_url like "http://localhost:8080". With send_virtual_now the
  // caller's clock reading is forwarded in X-Virtual-Now.
  explicit HttpSearchEndpoint(std::string base_url, bool send_virtual_now = false);
  ~HttpSearchEndpoint() override;

  ApiPage search(const Credentials& creds, int count, const std::optional<std::string>& next_token,
                 Timestamp now) override;
  RateStatus rate_limit_status(const Credentials& creds, Timestamp now) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace twcrawl
