#include "opal/sha1.hpp"

#include <cstring>

namespace opal {

namespace {

inline uint32_t rol(uint32_t x, int s) { return (x << s) | (x >> (32 - s)); }

struct Sha1State {
  uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};

  void block(const unsigned char* p) {
    uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (uint32_t)p[4 * i] << 24 | (uint32_t)p[4 * i + 1] << 16 |
             (uint32_t)p[4 * i + 2] << 8 | (uint32_t)p[4 * i + 3];
    for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }
};

}  // namespace

std::string sha1_hex(const std::string& data) {
  Sha1State st;
  size_t n = data.size();
  size_t i = 0;
  for (; i + 64 <= n; i += 64) st.block((const unsigned char*)data.data() + i);
  unsigned char tail[128];
  size_t rem = n - i;
  std::memcpy(tail, data.data() + i, rem);
  tail[rem] = 0x80;
  size_t padded = rem + 1 <= 56 ? 64 : 128;
  std::memset(tail + rem + 1, 0, padded - rem - 1 - 8);
  uint64_t bits = (uint64_t)n * 8;
  for (int j = 0; j < 8; ++j) tail[padded - 1 - j] = (unsigned char)(bits >> (8 * j));
  st.block(tail);
  if (padded == 128) st.block(tail + 64);
  std::string out;
  out.reserve(40);
  static const char* hexd = "0123456789abcdef";
  for (uint32_t v : st.h)
    for (int j = 28; j >= 0; j -= 4) out.push_back(hexd[(v >> j) & 0xF]);
  return out;
}

std::string git_blob_sha1(const std::string& data) {
  std::string framed = "blob " + std::to_string(data.size());
  framed.push_back('\0');
  framed += data;
  return sha1_hex(framed);
}

}  // namespace opal
