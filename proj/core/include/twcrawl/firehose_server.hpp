#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "twcrawl/clock.hpp"
#include "twcrawl/mock_firehose.hpp"

namespace twcrawl {

// Serves a MockFirehose over HTTP:
//   GET /search?count=N[&next=TOKEN][&q=...]
//   GET /rate_limit_status
// Credentials come in X-Api-Key / X-Api-Secret. With honor_virtual_now the
// X-Virtual-Now header (epoch ms) overrides the server clock per request.
class FirehoseServer {
 public:
  FirehoseServer(MockFirehose& firehose, Clock& clock, bool honor_virtual_now);
  ~FirehoseServer();

  FirehoseServer(const FirehoseServer&) = delete;
  FirehoseServer& operator=(const FirehoseServer&) = delete;

  // Binds and returns the bound port (port 0 picks a free one).
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  // Runs serve() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  bool bound_ = false;
  std::atomic<bool> served_{false};
};

}  // namespace twcrawl
