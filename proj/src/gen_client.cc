#include "mtkit/gen_client.h"

#include <httplib.h>

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <thread>

namespace mtkit {

using nlohmann::json;

std::string EchoClient::generate(const std::string& prompt, const GenParams&) {
  auto last_nl = prompt.rfind('\n');
  std::string last_line =
      last_nl == std::string::npos ? prompt : prompt.substr(last_nl + 1);
  if (!last_line.empty() && last_line.back() == '=') last_line.pop_back();
  return last_line;
}

struct HttpGenClient::Impl {
  httplib::Client client;
  std::string endpoint;

  Impl(const std::string& host, int port, std::string ep, int timeout_seconds)
      : client(host, port), endpoint(std::move(ep)) {
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    client.set_write_timeout(timeout_seconds, 0);
  }
};

HttpGenClient::HttpGenClient(std::string host, int port, std::string endpoint,
                             int timeout_seconds)
    : impl_(std::make_unique<Impl>(host, port, std::move(endpoint),
                                   timeout_seconds)) {}

HttpGenClient::~HttpGenClient() = default;

std::string HttpGenClient::generate(const std::string& prompt,
                                    const GenParams& params) {
  json body = {{"prompt", prompt},
               {"max_tokens", params.max_tokens},
               {"temperature", params.temperature}};
  auto res = impl_->client.Post(impl_->endpoint, body.dump(), "application/json");
  if (!res)
    throw std::runtime_error("generation request failed: " +
                             httplib::to_string(res.error()));
  if (res->status != 200)
    throw std::runtime_error("generation server returned status " +
                             std::to_string(res->status));
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("text"))
    throw std::runtime_error("generation reply missing \"text\"");
  return reply.at("text").get<std::string>();
}

RateLimitedClient::RateLimitedClient(GenClient& inner, int max_concurrent,
                                     double requests_per_second, int burst)
    : inner_(inner),
      max_concurrent_(max_concurrent > 0 ? max_concurrent : 1),
      rps_(requests_per_second),
      bucket_(burst > 0 ? burst : 1),
      burst_(burst > 0 ? burst : 1),
      last_refill_(std::chrono::steady_clock::now()) {}

void RateLimitedClient::acquire() {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [this] { return in_flight_ < max_concurrent_; });
  ++in_flight_;
  if (rps_ <= 0.0) return;
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    bucket_ = std::min(
        burst_, bucket_ + rps_ * std::chrono::duration<double>(now - last_refill_).count());
    last_refill_ = now;
    if (bucket_ >= 1.0) {
      bucket_ -= 1.0;
      return;
    }
    auto wait = std::chrono::duration<double>((1.0 - bucket_) / rps_);
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

void RateLimitedClient::release() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

std::string RateLimitedClient::generate(const std::string& prompt,
                                        const GenParams& params) {
  acquire();
  try {
    std::string out = inner_.generate(prompt, params);
    release();
    return out;
  } catch (...) {
    release();
    throw;
  }
}

}  // namespace mtkit
