#pragma once

// Per-packet HMAC-SHA-256 over the protocol label, the packet's sequence
// number bits and its transmitted nucleotide sequence.

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "spatial/codec.hpp"
#include "spatial/error.hpp"

namespace spatial {

inline constexpr std::string_view kProtocolVersion = "SPATIAL/1";
inline constexpr std::size_t kMinMacKeyBytes = 16;

class MacKey {
 public:
  MacKey() = default;
  explicit MacKey(Bytes key) : key_(std::move(key)) {
    if (key_.size() < kMinMacKeyBytes) {
      throw Error(Errc::KeyTooShort, "MAC key has " + std::to_string(key_.size()) +
                                         " bytes, need at least " +
                                         std::to_string(kMinMacKeyBytes));
    }
  }

  std::span<const std::uint8_t> bytes() const noexcept { return key_; }
  bool empty() const noexcept { return key_.empty(); }

  friend bool operator==(const MacKey&, const MacKey&) = default;

 private:
  Bytes key_;
};

using AuthTag = std::array<std::uint8_t, 32>;

/// Raw HMAC-SHA-256; accepts any key length.
inline AuthTag hmac_sha256(std::span<const std::uint8_t> key, std::string_view message) {
  AuthTag tag{};
  unsigned int len = 0;
  const unsigned char* ok =
      HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
           reinterpret_cast<const unsigned char*>(message.data()), message.size(), tag.data(), &len);
  if (ok == nullptr || len != tag.size()) throw std::runtime_error("HMAC-SHA-256 failed");
  return tag;
}

/// Exact bytes the tag covers: "SPATIAL/1:<seq bits>:<sequence>".
inline std::string mac_message(const BitString& seq_bits, const NucleotideSeq& sequence) {
  std::string msg(kProtocolVersion);
  msg.reserve(msg.size() + seq_bits.size() + sequence.size() + 2);
  msg += ':';
  msg += seq_bits.str();
  msg += ':';
  msg += sequence.str();
  return msg;
}

inline AuthTag compute_mac(const MacKey& k, const BitString& seq_bits,
                           const NucleotideSeq& sequence) {
  if (k.bytes().size() < kMinMacKeyBytes) throw Error(Errc::KeyTooShort, "MAC key too short");
  return hmac_sha256(k.bytes(), mac_message(seq_bits, sequence));
}

/// Constant-time comparison against the recomputed tag.
inline bool verify_mac(const MacKey& k, const BitString& seq_bits, const NucleotideSeq& sequence,
                       const AuthTag& tag) {
  const AuthTag expected = compute_mac(k, seq_bits, sequence);
  return CRYPTO_memcmp(expected.data(), tag.data(), tag.size()) == 0;
}

// hex helpers shared by the wire and session formats

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0x0F]);
  }
  return s;
}

/// Accepts upper- or lowercase; returns false on odd length or a non-hex digit.
inline bool from_hex(std::string_view hex, Bytes& out) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) return false;
  Bytes bytes(hex.size() / 2);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return false;
    bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  out = std::move(bytes);
  return true;
}

}  // namespace spatial
