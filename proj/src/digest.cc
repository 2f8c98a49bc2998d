#include "mtkit/digest.h"

#include <openssl/evp.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace mtkit {

namespace {

using CtxPtr = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

std::array<unsigned char, 32> sha256_raw(std::string_view data) {
  CtxPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  return out;
}

std::string to_hex(const unsigned char* p, size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(n * 2);
  for (size_t i = 0; i < n; ++i) {
    s.push_back(digits[p[i] >> 4]);
    s.push_back(digits[p[i] & 0xF]);
  }
  return s;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  auto raw = sha256_raw(data);
  return to_hex(raw.data(), raw.size());
}

std::string sha256_file_hex(const std::string& path) {
  std::unique_ptr<FILE, decltype(&fclose)> f(fopen(path.c_str(), "rb"), fclose);
  if (!f) throw std::runtime_error("cannot open for digest: " + path);
  CtxPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 init failed");
  std::vector<unsigned char> buf(1 << 16);
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f.get())) > 0) {
    if (EVP_DigestUpdate(ctx.get(), buf.data(), n) != 1)
      throw std::runtime_error("sha256 update failed");
  }
  if (ferror(f.get())) throw std::runtime_error("read error during digest: " + path);
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1)
    throw std::runtime_error("sha256 final failed");
  return to_hex(out.data(), out.size());
}

Digest128 digest128(std::string_view data) {
  auto raw = sha256_raw(data);
  Digest128 d;
  for (int i = 0; i < 8; ++i) d.hi = (d.hi << 8) | raw[i];
  for (int i = 8; i < 16; ++i) d.lo = (d.lo << 8) | raw[i];
  return d;
}

}  // namespace mtkit
