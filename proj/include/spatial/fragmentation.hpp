#pragma once

// Tearing the encoded message into fragments, hierarchical packet numbers,
// and size-header / number-trailer framing.

#include <algorithm>
#include <bit>
#include <cctype>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spatial/codec.hpp"
#include "spatial/detail/rng.hpp"
#include "spatial/error.hpp"

namespace spatial {

/// Root-to-leaf child indices of a fragment in the tear tree. Each digit is
/// 1..3 so it fits one dibit with 00 left free for padding.
struct TearPath {
  std::vector<std::uint8_t> digits;

  TearPath() = default;
  TearPath(std::initializer_list<std::uint8_t> d) : digits(d) {}
  explicit TearPath(std::vector<std::uint8_t> d) : digits(std::move(d)) {}

  std::size_t depth() const noexcept { return digits.size(); }

  std::string str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (i != 0) s += ',';
      s += std::to_string(digits[i]);
    }
    return s + "]";
  }

  friend auto operator<=>(const TearPath&, const TearPath&) = default;
  friend bool operator==(const TearPath&, const TearPath&) = default;
};

/// Recursive tear tree. A leaf carries a fragment length in nucleotides;
/// an internal node has 2 or 3 children and ignores `length`.
struct TearPlan {
  std::size_t length = 0;
  std::vector<TearPlan> children;

  static TearPlan leaf(std::size_t n) { return TearPlan{n, {}}; }
  static TearPlan split(std::vector<TearPlan> parts) { return TearPlan{0, std::move(parts)}; }

  bool is_leaf() const noexcept { return children.empty(); }

  std::size_t total_length() const {
    if (is_leaf()) return length;
    std::size_t sum = 0;
    for (const auto& c : children) sum += c.total_length();
    return sum;
  }

  std::size_t leaf_count() const {
    if (is_leaf()) return 1;
    std::size_t n = 0;
    for (const auto& c : children) n += c.leaf_count();
    return n;
  }

  /// Leaf lengths in left-to-right order.
  std::vector<std::size_t> leaf_lengths() const {
    std::vector<std::size_t> out;
    collect_lengths(out);
    return out;
  }

  /// Throws BadPlan unless every internal node has 2..3 children and every
  /// leaf length is at least 1.
  void validate() const {
    if (is_leaf()) {
      if (length == 0) throw Error(Errc::BadPlan, "leaf length must be at least 1");
      return;
    }
    if (children.size() < 2 || children.size() > 3) {
      throw Error(Errc::BadPlan, "internal node must have 2 or 3 children, has " +
                                     std::to_string(children.size()));
    }
    for (const auto& c : children) c.validate();
  }

  /// Nested-parenthesis form, e.g. "(23,(8,(9,32)))"; a single leaf is "23".
  std::string str() const {
    if (is_leaf()) return std::to_string(length);
    std::string s = "(";
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (i != 0) s += ',';
      s += children[i].str();
    }
    return s + ")";
  }

  static TearPlan parse(std::string_view text) {
    std::size_t pos = 0;
    TearPlan p = parse_node(text, pos);
    skip_ws(text, pos);
    if (pos != text.size()) throw Error(Errc::BadPlan, "trailing characters in plan");
    p.validate();
    return p;
  }

  friend bool operator==(const TearPlan&, const TearPlan&) = default;

 private:
  void collect_lengths(std::vector<std::size_t>& out) const {
    if (is_leaf()) {
      out.push_back(length);
      return;
    }
    for (const auto& c : children) c.collect_lengths(out);
  }

  static void skip_ws(std::string_view t, std::size_t& pos) {
    while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos])) != 0) ++pos;
  }

  static TearPlan parse_node(std::string_view t, std::size_t& pos) {
    skip_ws(t, pos);
    if (pos >= t.size()) throw Error(Errc::BadPlan, "unexpected end of plan");
    if (t[pos] == '(') {
      ++pos;
      TearPlan node;
      while (true) {
        node.children.push_back(parse_node(t, pos));
        skip_ws(t, pos);
        if (pos >= t.size()) throw Error(Errc::BadPlan, "unterminated '('");
        if (t[pos] == ',') {
          ++pos;
          continue;
        }
        if (t[pos] == ')') {
          ++pos;
          return node;
        }
        throw Error(Errc::BadPlan, std::string("unexpected '") + t[pos] + "' in plan");
      }
    }
    std::size_t value = 0;
    const std::size_t start = pos;
    while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos])) != 0) {
      value = value * 10 + static_cast<std::size_t>(t[pos] - '0');
      ++pos;
    }
    if (pos == start) throw Error(Errc::BadPlan, "expected a fragment length");
    return leaf(value);
  }
};

/// Default plan: starting from a single leaf, repeatedly pick a splittable
/// leaf uniformly and cut it at a uniform point until there are `n_leaves`.
inline TearPlan random_binary_plan(std::size_t total, std::size_t n_leaves,
                                   std::uint64_t seed) {
  if (n_leaves == 0 || n_leaves > total) {
    throw Error(Errc::BadPlan, "cannot tear " + std::to_string(total) + " nucleotides into " +
                                   std::to_string(n_leaves) + " fragments");
  }
  std::mt19937_64 rng(seed);
  TearPlan root = TearPlan::leaf(total);
  for (std::size_t count = 1; count < n_leaves; ++count) {
    std::vector<TearPlan*> splittable;
    auto visit = [&](auto&& self, TearPlan& node) -> void {
      if (node.is_leaf()) {
        if (node.length >= 2) splittable.push_back(&node);
        return;
      }
      for (auto& c : node.children) self(self, c);
    };
    visit(visit, root);
    TearPlan& victim = *splittable[detail::uniform_below(rng, splittable.size())];
    const std::size_t cut = 1 + detail::uniform_below(rng, victim.length - 1);
    victim = TearPlan::split({TearPlan::leaf(cut), TearPlan::leaf(victim.length - cut)});
  }
  return root;
}

/// One torn piece of the encoded message.
struct Fragment {
  NucleotideSeq payload;
  TearPath path;

  friend bool operator==(const Fragment&, const Fragment&) = default;
};

inline std::vector<Fragment> tear(const NucleotideSeq& e, const TearPlan& plan) {
  plan.validate();
  if (plan.total_length() != e.size()) {
    throw Error(Errc::PlanLengthMismatch,
                "plan covers " + std::to_string(plan.total_length()) +
                    " nucleotides but message has " + std::to_string(e.size()));
  }
  std::vector<Fragment> out;
  if (plan.is_leaf()) {
    out.push_back({e, TearPath{1}});
    return out;
  }
  std::size_t offset = 0;
  std::vector<std::uint8_t> path;
  auto walk = [&](auto&& self, const TearPlan& node) -> void {
    if (node.is_leaf()) {
      out.push_back({e.substr(offset, node.length), TearPath(path)});
      offset += node.length;
      return;
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      path.push_back(static_cast<std::uint8_t>(i + 1));
      self(self, node.children[i]);
      path.pop_back();
    }
  };
  walk(walk, plan);
  return out;
}

namespace detail {

// `group` is sorted, prefix-free, and every member shares the first `depth`
// digits and is longer than `depth`.
inline void check_complete(std::span<const Fragment* const> group, std::size_t depth) {
  std::size_t expected_digit = 1;
  std::size_t i = 0;
  while (i < group.size()) {
    const std::uint8_t digit = group[i]->path.digits[depth];
    if (digit != expected_digit) {
      throw Error(Errc::IncompleteTree, "missing sibling " + std::to_string(expected_digit) +
                                            " near " + group[i]->path.str());
    }
    std::size_t j = i;
    while (j < group.size() && group[j]->path.digits[depth] == digit) ++j;
    const bool is_leaf = (j - i == 1) && group[i]->path.depth() == depth + 1;
    if (!is_leaf) check_complete(group.subspan(i, j - i), depth + 1);
    ++expected_digit;
    i = j;
  }
  const std::size_t children = expected_digit - 1;
  const bool lone_root_leaf = depth == 0 && group.size() == 1 && group[0]->path.depth() == 1;
  if (children < 2 && !lone_root_leaf) {
    throw Error(Errc::IncompleteTree, "node at depth " + std::to_string(depth) +
                                          " has a single child");
  }
}

}  // namespace detail

/// Reassembles fragments in any order. The paths must form exactly the leaf
/// set of some tear tree.
inline NucleotideSeq join(std::span<const Fragment> fragments) {
  if (fragments.empty()) throw Error(Errc::IncompleteTree, "no fragments");
  std::vector<const Fragment*> sorted;
  sorted.reserve(fragments.size());
  for (const auto& f : fragments) {
    if (f.path.digits.empty()) throw Error(Errc::BadPath, "empty path");
    for (auto d : f.path.digits) {
      if (d < 1 || d > 3) throw Error(Errc::BadPath, "path digit out of range in " + f.path.str());
    }
    sorted.push_back(&f);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Fragment* a, const Fragment* b) { return a->path < b->path; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto& prev = sorted[i - 1]->path.digits;
    const auto& cur = sorted[i]->path.digits;
    if (prev == cur) throw Error(Errc::DuplicatePath, "duplicate path " + sorted[i]->path.str());
    if (std::equal(prev.begin(), prev.end(), cur.begin())) {
      throw Error(Errc::PrefixConflict, sorted[i - 1]->path.str() + " is a prefix of " +
                                            sorted[i]->path.str());
    }
  }
  detail::check_complete(sorted, 0);
  NucleotideSeq out;
  for (const Fragment* f : sorted) out += f->payload;
  return out;
}

/// Fixed width of 2(N-1) bits: each digit as a dibit, left-padded with 00.
inline BitString encode_path(const TearPath& p, std::size_t n_packets) {
  if (n_packets < 2) throw Error(Errc::BadConfig, "packet count must be at least 2");
  if (p.digits.empty()) throw Error(Errc::BadPath, "empty path");
  if (p.depth() > n_packets - 1) {
    throw Error(Errc::PathTooDeep, p.str() + " deeper than " + std::to_string(n_packets - 1));
  }
  std::string s(2 * (n_packets - 1 - p.depth()), '0');
  for (auto d : p.digits) {
    if (d < 1 || d > 3) throw Error(Errc::BadPath, "path digit out of range in " + p.str());
    s += BitString::from_uint(d, 2).str();
  }
  return BitString(std::move(s));
}

inline TearPath decode_path(const BitString& b, std::size_t n_packets) {
  if (n_packets < 2) throw Error(Errc::BadConfig, "packet count must be at least 2");
  if (b.size() != 2 * (n_packets - 1)) {
    throw Error(Errc::BadWidth, "path field is " + std::to_string(b.size()) + " bits, expected " +
                                    std::to_string(2 * (n_packets - 1)),
                b.str());
  }
  TearPath p;
  for (std::size_t i = 0; i < b.size(); i += 2) {
    const auto d = static_cast<std::uint8_t>(b.substr(i, 2).to_uint());
    if (d == 0) {
      if (!p.digits.empty()) {
        throw Error(Errc::ZeroDigitAfterPadding, "00 pair after a digit in " + b.str(), b.str());
      }
      continue;
    }
    p.digits.push_back(d);
  }
  if (p.digits.empty()) throw Error(Errc::BadPath, "path field is all padding", b.str());
  return p;
}

/// Nucleotides needed for the size header: the bit length of the total
/// message size, rounded up to even, halved.
constexpr std::size_t header_width_nt(std::size_t total_message_bits) {
  const auto width = static_cast<std::size_t>(std::bit_width(total_message_bits));
  return (width + 1) / 2;
}

/// Shared parameters that framing and deframing depend on.
struct FrameParams {
  SigmaMap sigma;
  CryptoMap crypto;
  std::size_t n_packets = 2;
  std::size_t total_message_bits = 0;

  std::size_t header_nt() const { return header_width_nt(total_message_bits); }
  std::size_t trailer_nt() const { return n_packets - 1; }
};

struct FramedStream {
  NucleotideSeq header;
  NucleotideSeq payload;
  NucleotideSeq trailer;

  std::size_t size() const { return header.size() + payload.size() + trailer.size(); }
  NucleotideSeq joined() const { return header + payload + trailer; }

  friend bool operator==(const FramedStream&, const FramedStream&) = default;
};

// The size header goes through the crypto map; the path trailer does not.
inline FramedStream frame(const Fragment& f, const FrameParams& params) {
  const std::size_t header_bits = 2 * params.header_nt();
  const std::size_t size = f.payload.size() + params.trailer_nt();
  if (header_bits < 64 && size >= (std::uint64_t{1} << header_bits)) {
    throw Error(Errc::SizeOverflow, "size " + std::to_string(size) + " does not fit in " +
                                        std::to_string(header_bits) + " bits");
  }
  const BitString size_bits = BitString::from_uint(size, header_bits);
  return FramedStream{
      sigma_encode(params.sigma, crypto_apply(params.crypto, size_bits)),
      f.payload,
      sigma_encode(params.sigma, encode_path(f.path, params.n_packets)),
  };
}

/// Reads the size header, keeps that many nucleotides, and drops any filler
/// after them.
inline Fragment deframe(const NucleotideSeq& extracted, const FrameParams& params) {
  const std::size_t hn = params.header_nt();
  if (extracted.size() < hn) {
    throw Error(Errc::TruncatedStream, "stream shorter than the size header");
  }
  const BitString size_bits = crypto_apply(params.crypto, sigma_decode(params.sigma, extracted.substr(0, hn)));
  const std::uint64_t size = size_bits.to_uint();
  const std::size_t tn = params.trailer_nt();
  if (size <= tn) {
    throw Error(Errc::TruncatedStream, "size field " + std::to_string(size) +
                                           " leaves no room for a payload");
  }
  if (extracted.size() - hn < size) {
    throw Error(Errc::TruncatedStream, "size field claims " + std::to_string(size) +
                                           " nucleotides but only " +
                                           std::to_string(extracted.size() - hn) + " follow");
  }
  const std::size_t payload_nt = static_cast<std::size_t>(size) - tn;
  const NucleotideSeq trailer = extracted.substr(hn + payload_nt, tn);
  TearPath path;
  try {
    path = decode_path(sigma_decode(params.sigma, trailer), params.n_packets);
  } catch (const Error& e) {
    throw Error(Errc::BadPath, e.what(), e.subject());
  }
  return Fragment{extracted.substr(hn, payload_nt), std::move(path)};
}

}  // namespace spatial
