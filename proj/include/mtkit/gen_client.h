#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

namespace mtkit {

struct GenParams {
  int max_tokens = 256;
  double temperature = 0.0;  // greedy by default
};

// Text-completion backend. Implementations are pass-throughs; timeouts,
// retries and rate limits live in the harness around them.
class GenClient {
 public:
  virtual ~GenClient() = default;
  virtual std::string generate(const std::string& prompt, const GenParams& params) = 0;
};

// Deterministic stub: answers with the final prompt line's text before '='
// (the query source), so hypotheses equal sources exactly.
class EchoClient : public GenClient {
 public:
  std::string generate(const std::string& prompt, const GenParams& params) override;
};

// Wraps any callable; handy for table-driven stubs in tests.
class FnClient : public GenClient {
 public:
  using Fn = std::function<std::string(const std::string&, const GenParams&)>;
  explicit FnClient(Fn fn) : fn_(std::move(fn)) {}
  std::string generate(const std::string& prompt, const GenParams& params) override {
    return fn_(prompt, params);
  }

 private:
  Fn fn_;
};

// POSTs {"prompt","max_tokens","temperature"} to `endpoint` on host:port and
// expects {"text"} back. Throws std::runtime_error on transport or protocol
// failures (the harness's retry policy catches these).
class HttpGenClient : public GenClient {
 public:
  HttpGenClient(std::string host, int port, std::string endpoint = "/generate",
                int timeout_seconds = 60);
  ~HttpGenClient() override;
  std::string generate(const std::string& prompt, const GenParams& params) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Caps in-flight calls and smooths request rate with a token bucket.
// requests_per_second <= 0 disables the bucket.
class RateLimitedClient : public GenClient {
 public:
  RateLimitedClient(GenClient& inner, int max_concurrent,
                    double requests_per_second = 0.0, int burst = 1);
  std::string generate(const std::string& prompt, const GenParams& params) override;

 private:
  void acquire();
  void release();

  GenClient& inner_;
  int max_concurrent_;
  int in_flight_ = 0;
  double rps_;
  double bucket_;
  double burst_;
  std::chrono::steady_clock::time_point last_refill_;
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace mtkit
