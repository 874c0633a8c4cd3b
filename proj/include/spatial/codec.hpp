#pragma once

// Bit- and nucleotide-level primitives: text <-> bits, the keyed crypto
// map, and the dibit <-> nucleotide bijection.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spatial/error.hpp"

namespace spatial {

using Bytes = std::vector<std::uint8_t>;

/// Ordered sequence of '0'/'1' symbols.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::string bits) : bits_(std::move(bits)) {
    if (bits_.find_first_not_of("01") != std::string::npos) {
      throw Error(Errc::BadAlphabet, "bit string may only contain 0 and 1");
    }
  }

  /// Big-endian binary form of `value` in exactly `width` bits.
  static BitString from_uint(std::uint64_t value, std::size_t width) {
    std::string s(width, '0');
    for (std::size_t i = 0; i < width; ++i) {
      if (i < 64 && ((value >> i) & 1U) != 0) s[width - 1 - i] = '1';
    }
    return BitString(std::move(s));
  }

  std::uint64_t to_uint() const {
    std::uint64_t v = 0;
    for (char c : bits_) v = (v << 1) | static_cast<std::uint64_t>(c == '1');
    return v;
  }

  const std::string& str() const noexcept { return bits_; }
  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] == '1'; }

  BitString substr(std::size_t pos, std::size_t n = std::string::npos) const {
    return BitString(bits_.substr(pos, n));
  }
  BitString& operator+=(const BitString& o) {
    bits_ += o.bits_;
    return *this;
  }
  friend BitString operator+(BitString a, const BitString& b) { return a += b; }
  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::string bits_;
};

inline bool is_nucleotide(char c) noexcept {
  return c == 'A' || c == 'C' || c == 'G' || c == 'T';
}

/// Ordered sequence over {A,C,G,T}.
class NucleotideSeq {
 public:
  NucleotideSeq() = default;
  explicit NucleotideSeq(std::string residues) : residues_(std::move(residues)) {
    auto bad = std::find_if_not(residues_.begin(), residues_.end(), is_nucleotide);
    if (bad != residues_.end()) {
      throw Error(Errc::BadAlphabet,
                  std::string("invalid nucleotide '") + *bad + "'");
    }
  }

  const std::string& str() const noexcept { return residues_; }
  std::size_t size() const noexcept { return residues_.size(); }
  bool empty() const noexcept { return residues_.empty(); }
  char operator[](std::size_t i) const { return residues_[i]; }

  NucleotideSeq substr(std::size_t pos, std::size_t n = std::string::npos) const {
    NucleotideSeq out;
    out.residues_ = residues_.substr(pos, n);
    return out;
  }
  /// Replaces one residue; `c` must be a nucleotide.
  void set(std::size_t i, char c) {
    if (!is_nucleotide(c)) throw Error(Errc::BadAlphabet, "invalid nucleotide");
    residues_.at(i) = c;
  }
  NucleotideSeq& operator+=(const NucleotideSeq& o) {
    residues_ += o.residues_;
    return *this;
  }
  friend NucleotideSeq operator+(NucleotideSeq a, const NucleotideSeq& b) {
    return a += b;
  }
  friend bool operator==(const NucleotideSeq&, const NucleotideSeq&) = default;

 private:
  std::string residues_;
};

// ---------------------------------------------------------------------------
// text <-> bits

/// 8 bits per byte, most significant bit first.
inline BitString text_to_bits(std::span<const std::uint8_t> bytes) {
  std::string s;
  s.reserve(bytes.size() * 8);
  for (std::uint8_t b : bytes) {
    for (int i = 7; i >= 0; --i) s.push_back(((b >> i) & 1U) != 0 ? '1' : '0');
  }
  return BitString(std::move(s));
}

inline BitString text_to_bits(std::string_view text) {
  return text_to_bits(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline Bytes bits_to_bytes(const BitString& b) {
  if (b.size() % 8 != 0) {
    throw Error(Errc::LengthNotByteAligned,
                "bit length " + std::to_string(b.size()) + " is not a multiple of 8");
  }
  Bytes out(b.size() / 8, 0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  }
  return out;
}

inline std::string bits_to_text(const BitString& b) {
  Bytes bytes = bits_to_bytes(b);
  return {bytes.begin(), bytes.end()};
}

// ---------------------------------------------------------------------------
// crypto map

/// Keyed involution on bit strings. `complement` flips every bit;
/// `xor_keystream` XORs with the key bits (MSB first) repeated cyclically.
class CryptoMap {
 public:
  enum class Kind { complement, xor_keystream };

  CryptoMap() = default;
  static CryptoMap complement() { return CryptoMap(); }
  static CryptoMap xor_keystream(Bytes key) {
    CryptoMap m;
    m.kind_ = Kind::xor_keystream;
    m.key_ = std::move(key);
    return m;
  }

  Kind kind() const noexcept { return kind_; }
  const Bytes& key_material() const noexcept { return key_; }

  friend bool operator==(const CryptoMap&, const CryptoMap&) = default;

 private:
  Kind kind_ = Kind::complement;
  Bytes key_;
};

inline BitString crypto_apply(const CryptoMap& m, const BitString& b) {
  std::string out = b.str();
  if (m.kind() == CryptoMap::Kind::complement) {
    for (char& c : out) c = (c == '0') ? '1' : '0';
    return BitString(std::move(out));
  }
  const Bytes& key = m.key_material();
  if (key.empty()) throw Error(Errc::EmptyKey, "xor keystream requires key material");
  const std::size_t key_bits = key.size() * 8;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t k = i % key_bits;
    const bool kb = ((key[k / 8] >> (7 - k % 8)) & 1U) != 0;
    if (kb) out[i] = (out[i] == '0') ? '1' : '0';
  }
  return BitString(std::move(out));
}

// ---------------------------------------------------------------------------
// sigma map

/// Bijection from dibits 00,01,10,11 to nucleotides. The default is the
/// canonical A,C,G,T ordering.
class SigmaMap {
 public:
  SigmaMap() = default;

  /// `images` lists the nucleotides for 00,01,10,11 in order, e.g. "ACGT".
  explicit SigmaMap(std::string_view images) {
    std::string sorted(images);
    std::sort(sorted.begin(), sorted.end());
    if (images.size() != 4 || sorted != "ACGT") {
      throw Error(Errc::BadConfig,
                  "sigma must be a permutation of ACGT, got '" + std::string(images) + "'");
    }
    std::copy(images.begin(), images.end(), images_.begin());
  }

  char image(unsigned dibit) const { return images_.at(dibit); }

  unsigned preimage(char nucleotide) const {
    for (unsigned d = 0; d < 4; ++d) {
      if (images_[d] == nucleotide) return d;
    }
    throw Error(Errc::BadAlphabet, std::string("no preimage for '") + nucleotide + "'");
  }

  std::string str() const { return {images_.begin(), images_.end()}; }

  /// All 24 bijections, in lexicographic order of their image strings.
  static std::vector<SigmaMap> all() {
    std::string p = "ACGT";
    std::vector<SigmaMap> out;
    do {
      out.emplace_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
  }

  friend bool operator==(const SigmaMap&, const SigmaMap&) = default;

 private:
  std::array<char, 4> images_{'A', 'C', 'G', 'T'};
};

inline NucleotideSeq sigma_encode(const SigmaMap& s, const BitString& b) {
  if (b.size() % 2 != 0) {
    throw Error(Errc::OddBitLength,
                "cannot group " + std::to_string(b.size()) + " bits into dibits");
  }
  std::string out;
  out.reserve(b.size() / 2);
  for (std::size_t i = 0; i < b.size(); i += 2) {
    out.push_back(s.image((b[i] ? 2U : 0U) | (b[i + 1] ? 1U : 0U)));
  }
  return NucleotideSeq(std::move(out));
}

inline BitString sigma_decode(const SigmaMap& s, const NucleotideSeq& n) {
  std::string out;
  out.reserve(n.size() * 2);
  for (char c : n.str()) {
    const unsigned d = s.preimage(c);
    out.push_back((d & 2U) != 0 ? '1' : '0');
    out.push_back((d & 1U) != 0 ? '1' : '0');
  }
  return BitString(std::move(out));
}

}  // namespace spatial
