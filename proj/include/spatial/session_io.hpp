#pragma once

// Text file formats used by the command-line tool: FASTA carriers, the
// key=value session file, and the channel configuration.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spatial/auth.hpp"
#include "spatial/codec.hpp"
#include "spatial/error.hpp"
#include "spatial/netsim.hpp"
#include "spatial/pipeline.hpp"

namespace spatial {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

template <typename Int>
Int parse_int(std::string_view s, Errc code, std::string_view what) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(code, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

inline double parse_probability(std::string_view s, std::string_view what) {
  s = trim(s);
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::BadConfig, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FASTA

struct FastaRecord {
  std::string name;
  NucleotideSeq sequence;
};

/// Case-insensitive and whitespace-tolerant; anything outside ACGT rejects
/// the record.
inline std::vector<FastaRecord> parse_fasta(std::string_view text) {
  std::vector<FastaRecord> records;
  std::optional<std::string> name;
  std::string residues;
  auto flush = [&] {
    if (!name) return;
    if (residues.empty()) throw Error(Errc::BadFasta, "record '" + *name + "' has no sequence");
    records.push_back({*name, NucleotideSeq(residues)});
    residues.clear();
  };
  for (std::string_view raw : detail::split_lines(text)) {
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '>') {
      flush();
      name = std::string(detail::trim(line.substr(1)));
      continue;
    }
    if (!name) throw Error(Errc::BadFasta, "sequence data before the first '>' header");
    for (char c : line) {
      if (std::isspace(static_cast<unsigned char>(c)) != 0) continue;
      const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (!is_nucleotide(u)) {
        throw Error(Errc::BadFasta,
                    std::string("invalid symbol '") + c + "' in record '" + *name + "'");
      }
      residues.push_back(u);
    }
  }
  flush();
  return records;
}

inline std::vector<NucleotideSeq> load_carriers(const fs::path& path) {
  const auto records = parse_fasta(read_file(path));
  if (records.size() < 2 || records.size() > 3) {
    throw Error(Errc::BadFasta, path.string() + " must hold 2 or 3 records, has " +
                                    std::to_string(records.size()));
  }
  std::vector<NucleotideSeq> out;
  for (const auto& r : records) out.push_back(r.sequence);
  return out;
}

inline std::string format_fasta(const std::vector<FastaRecord>& records, std::size_t width = 60) {
  std::string out;
  for (const auto& r : records) {
    out += ">" + r.name + "\n";
    for (std::size_t i = 0; i < r.sequence.size(); i += width) {
      out += r.sequence.str().substr(i, width) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// session file

struct SessionFile {
  SessionConfig config;
  std::string carriers_path;  // as written in the file
};

inline CryptoMap parse_crypto(std::string_view v) {
  if (v == "complement") return CryptoMap::complement();
  if (v.substr(0, 4) == "xor:") {
    Bytes key;
    if (!from_hex(v.substr(4), key)) throw Error(Errc::BadSessionFile, "bad xor key hex");
    if (key.empty()) throw Error(Errc::EmptyKey, "xor keystream requires key material");
    return CryptoMap::xor_keystream(std::move(key));
  }
  throw Error(Errc::BadSessionFile, "crypto must be 'complement' or 'xor:<hex>'");
}

inline std::string format_crypto(const CryptoMap& m) {
  return m.kind() == CryptoMap::Kind::complement ? "complement" : "xor:" + to_hex(m.key_material());
}

inline TemplatePolicy parse_policy(std::string_view v) {
  if (v == "round_robin") return TemplatePolicy::round_robin();
  if (v.substr(0, 6) == "fixed:") {
    return TemplatePolicy::fixed(
        detail::parse_int<std::size_t>(v.substr(6), Errc::BadSessionFile, "fixed template index"));
  }
  throw Error(Errc::BadSessionFile, "template_policy must be 'round_robin' or 'fixed:<k>'");
}

inline ScoringScheme parse_scoring(std::string_view v) {
  std::string s(v);
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  ScoringScheme sc;
  std::string extra;
  if (!(in >> sc.match >> sc.mismatch >> sc.gap) || (in >> extra)) {
    throw Error(Errc::BadSessionFile, "scoring must be three integers: match mismatch gap");
  }
  return sc;
}

/// Parses session text. Carrier paths are resolved against `base_dir`.
inline SessionFile parse_session(std::string_view text, const fs::path& base_dir) {
  static const std::vector<std::string_view> kRequired = {
      "mac_key", "sigma", "crypto", "scoring", "n_packets", "total_message_bits",
      "template_policy", "carriers"};
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  for (std::string_view raw : detail::split_lines(text)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::BadSessionFile, "line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key(detail::trim(line.substr(0, eq)));
    const bool known = key == "max_packet_bits" ||
                       std::find(kRequired.begin(), kRequired.end(), key) != kRequired.end();
    if (!known) throw Error(Errc::BadSessionFile, "unknown key '" + key + "'");
    if (!kv.emplace(key, std::string(detail::trim(line.substr(eq + 1)))).second) {
      throw Error(Errc::BadSessionFile, "duplicate key '" + key + "'");
    }
  }
  for (auto k : kRequired) {
    if (!kv.contains(k)) throw Error(Errc::BadSessionFile, "missing key '" + std::string(k) + "'");
  }

  SessionFile out;
  SessionConfig& c = out.config;
  Bytes key;
  if (!from_hex(kv["mac_key"], key)) throw Error(Errc::BadSessionFile, "mac_key must be hex");
  c.mac_key = MacKey(std::move(key));
  c.sigma = SigmaMap(kv["sigma"]);
  c.crypto = parse_crypto(kv["crypto"]);
  c.scoring = parse_scoring(kv["scoring"]);
  c.n_packets = detail::parse_int<std::size_t>(kv["n_packets"], Errc::BadSessionFile, "n_packets");
  c.total_message_bits = detail::parse_int<std::size_t>(kv["total_message_bits"],
                                                        Errc::BadSessionFile, "total_message_bits");
  c.template_policy = parse_policy(kv["template_policy"]);
  if (auto it = kv.find("max_packet_bits"); it != kv.end()) {
    c.max_packet_bits =
        detail::parse_int<std::size_t>(it->second, Errc::BadSessionFile, "max_packet_bits");
  }
  out.carriers_path = kv["carriers"];
  fs::path carriers(out.carriers_path);
  if (carriers.is_relative()) carriers = base_dir / carriers;
  c.carriers = load_carriers(carriers);
  c.validate();
  return out;
}

inline SessionFile load_session(const fs::path& path) {
  return parse_session(read_file(path), path.parent_path());
}

inline std::string format_session(const SessionConfig& c, std::string_view carriers_path) {
  std::ostringstream out;
  out << "mac_key=" << to_hex(c.mac_key.bytes()) << "\n"
      << "sigma=" << c.sigma.str() << "\n"
      << "crypto=" << format_crypto(c.crypto) << "\n"
      << "scoring=" << c.scoring.match << " " << c.scoring.mismatch << " " << c.scoring.gap << "\n"
      << "n_packets=" << c.n_packets << "\n"
      << "total_message_bits=" << c.total_message_bits << "\n"
      << "template_policy=" << c.template_policy.str() << "\n"
      << "carriers=" << carriers_path << "\n";
  if (c.max_packet_bits) out << "max_packet_bits=" << *c.max_packet_bits << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// channel configuration
//
//   timeout_ms=500          # optional, before the first stanza
//   send_spacing_ms=1       # optional
//   [channel]
//   delay_ms=5-40
//   reorder=true
//   duplicate_prob=0
//   drop_prob=0
//   tamper_prob=0
//   seed=11

struct ChannelsFile {
  std::vector<ChannelSpec> channels;
  std::uint64_t timeout_ms = UINT64_MAX;
  std::uint64_t send_spacing_ms = 1;
};

inline ChannelsFile parse_channels(std::string_view text) {
  ChannelsFile out;
  ChannelSpec* cur = nullptr;
  std::size_t line_no = 0;
  for (std::string_view raw : detail::split_lines(text)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "[channel]") {
      cur = &out.channels.emplace_back();
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::BadConfig, "channels line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view val = detail::trim(line.substr(eq + 1));
    if (cur == nullptr) {
      if (key == "timeout_ms") {
        out.timeout_ms = detail::parse_int<std::uint64_t>(val, Errc::BadConfig, key);
      } else if (key == "send_spacing_ms") {
        out.send_spacing_ms = detail::parse_int<std::uint64_t>(val, Errc::BadConfig, key);
      } else {
        throw Error(Errc::BadConfig, "unknown global channels key '" + key + "'");
      }
      continue;
    }
    if (key == "delay_ms") {
      const std::size_t dash = val.find('-');
      cur->delay_min_ms = detail::parse_int<std::uint64_t>(val.substr(0, dash), Errc::BadConfig, key);
      cur->delay_max_ms = dash == std::string_view::npos
                              ? cur->delay_min_ms
                              : detail::parse_int<std::uint64_t>(val.substr(dash + 1),
                                                                 Errc::BadConfig, key);
    } else if (key == "reorder") {
      if (val != "true" && val != "false") throw Error(Errc::BadConfig, "reorder must be true|false");
      cur->reorder = val == "true";
    } else if (key == "duplicate_prob") {
      cur->duplicate_prob = detail::parse_probability(val, key);
    } else if (key == "drop_prob") {
      cur->drop_prob = detail::parse_probability(val, key);
    } else if (key == "tamper_prob") {
      cur->tamper_prob = detail::parse_probability(val, key);
    } else if (key == "seed") {
      cur->rng_seed = detail::parse_int<std::uint64_t>(val, Errc::BadConfig, key);
    } else {
      throw Error(Errc::BadConfig, "unknown channel key '" + key + "'");
    }
  }
  if (out.channels.empty()) throw Error(Errc::BadConfig, "no [channel] stanza");
  for (const auto& c : out.channels) c.validate();
  return out;
}

}  // namespace spatial
