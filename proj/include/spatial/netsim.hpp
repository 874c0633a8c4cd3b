#pragma once

// Envelope wire format and a virtual-clock multi-channel transport that
// delays, reorders, duplicates, drops and tampers with packets.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spatial/auth.hpp"
#include "spatial/codec.hpp"
#include "spatial/detail/rng.hpp"
#include "spatial/error.hpp"
#include "spatial/pipeline.hpp"

namespace spatial {

// ---------------------------------------------------------------------------
// wire format: four newline-terminated lines
//   SPATIAL/1
//   <seq bits as 0/1>
//   <sequence as A/C/G/T>
//   <MAC as 64 lowercase hex digits>

inline std::string serialize(const StegoEnvelope& e) {
  std::string out;
  out.reserve(e.version.size() + e.seq_bits.size() + e.sequence.size() + 68);
  out += e.version;
  out += '\n';
  out += e.seq_bits.str();
  out += '\n';
  out += e.sequence.str();
  out += '\n';
  out += to_hex(e.mac);
  out += '\n';
  return out;
}

inline StegoEnvelope parse(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < bytes.size() && lines.size() < 4) {
    const std::size_t nl = bytes.find('\n', start);
    if (nl == std::string_view::npos) break;
    lines.push_back(bytes.substr(start, nl - start));
    start = nl + 1;
  }
  if (!lines.empty() && lines[0] != kProtocolVersion) {
    throw Error(Errc::BadVersion, "unsupported version line '" + std::string(lines[0]) + "'");
  }
  if (lines.size() < 4) {
    throw Error(Errc::MissingLine, "expected 4 newline-terminated lines, found " +
                                       std::to_string(lines.size()));
  }
  if (start != bytes.size()) throw Error(Errc::MissingLine, "trailing data after MAC line");

  StegoEnvelope e;
  e.version = std::string(lines[0]);
  if (lines[1].empty()) throw Error(Errc::BadAlphabet, "empty sequence-number line");
  e.seq_bits = BitString(std::string(lines[1]));
  if (lines[2].empty()) throw Error(Errc::BadAlphabet, "empty sequence line");
  e.sequence = NucleotideSeq(std::string(lines[2]));
  if (lines[3].size() != 2 * e.mac.size()) {
    throw Error(Errc::BadTagLength, "MAC line has " + std::to_string(lines[3].size()) +
                                        " characters, expected 64");
  }
  if (lines[3].find_first_not_of("0123456789abcdef") != std::string_view::npos) {
    throw Error(Errc::BadAlphabet, "MAC must be lowercase hex");
  }
  Bytes tag;
  from_hex(lines[3], tag);
  std::copy(tag.begin(), tag.end(), e.mac.begin());
  return e;
}

// ---------------------------------------------------------------------------
// simulator

struct ChannelSpec {
  std::uint64_t delay_min_ms = 0;
  std::uint64_t delay_max_ms = 0;
  bool reorder = false;
  double duplicate_prob = 0.0;
  double drop_prob = 0.0;
  double tamper_prob = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (delay_min_ms > delay_max_ms) throw Error(Errc::BadConfig, "delay min exceeds max");
    for (double p : {duplicate_prob, drop_prob, tamper_prob}) {
      if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::BadConfig, "probability outside [0,1]");
    }
  }

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

struct SimEvent {
  enum class Kind { send, duplicate, drop, tamper, deliver };

  std::uint64_t time_ms = 0;
  Kind kind = Kind::send;
  std::string seq_bits;
  std::size_t channel = 0;

  static std::string_view kind_name(Kind k) {
    switch (k) {
      case Kind::send: return "send";
      case Kind::duplicate: return "duplicate";
      case Kind::drop: return "drop";
      case Kind::tamper: return "tamper";
      case Kind::deliver: return "deliver";
    }
    return "?";
  }

  /// "<virtual_time_ms> <event> <seq_bits> <channel_id>"
  std::string str() const {
    return std::to_string(time_ms) + " " + std::string(kind_name(kind)) + " " + seq_bits + " " +
           std::to_string(channel);
  }

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct Arrival {
  std::uint64_t time_ms = 0;
  std::size_t channel = 0;
  std::string wire;
  bool tampered = false;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

struct SimulationResult {
  std::vector<SimEvent> log;
  std::vector<Arrival> arrivals;  // in arrival order

  std::string log_text() const {
    std::string s;
    for (const auto& e : log) s += e.str() + "\n";
    return s;
  }
};

namespace detail {

/// Second line of a wire envelope, or "?" if the framing is broken.
inline std::string seq_line(std::string_view wire) {
  const std::size_t l1 = wire.find('\n');
  if (l1 == std::string_view::npos) return "?";
  const std::size_t l2 = wire.find('\n', l1 + 1);
  if (l2 == std::string_view::npos) return "?";
  return std::string(wire.substr(l1 + 1, l2 - l1 - 1));
}

// Substitutes one residue of the sequence line with a different nucleotide.
inline void tamper_wire(std::string& wire, std::mt19937_64& rng) {
  const std::size_t l1 = wire.find('\n');
  const std::size_t l2 = wire.find('\n', l1 + 1);
  const std::size_t l3 = wire.find('\n', l2 + 1);
  const std::size_t begin = l2 + 1;
  const std::size_t pos = begin + uniform_below(rng, l3 - begin);
  static constexpr std::string_view kAlphabet = "ACGT";
  std::string others;
  for (char c : kAlphabet) {
    if (c != wire[pos]) others.push_back(c);
  }
  wire[pos] = others[uniform_below(rng, others.size())];
}

}  // namespace detail

/// Envelope k is sent at virtual time k * send_spacing_ms on channel
/// k mod |channels|. Each channel draws from its own seeded RNG. Channels
/// without `reorder` deliver in FIFO order.
inline SimulationResult simulate_send(std::span<const StegoEnvelope> envelopes,
                                      std::span<const ChannelSpec> channels,
                                      std::uint64_t send_spacing_ms = 1) {
  if (channels.empty()) throw Error(Errc::BadConfig, "at least one channel required");
  for (const auto& c : channels) c.validate();

  std::vector<std::mt19937_64> rngs;
  for (const auto& c : channels) rngs.emplace_back(c.rng_seed);
  std::vector<std::uint64_t> fifo_tail(channels.size(), 0);

  // Both lists are stably sorted by time at the end, so ties keep emission order.
  std::vector<SimEvent> events;
  std::vector<Arrival> pending;
  auto emit = [&](std::uint64_t t, SimEvent::Kind kind, const std::string& seq, std::size_t ch) {
    events.push_back(SimEvent{t, kind, seq, ch});
  };

  for (std::size_t k = 0; k < envelopes.size(); ++k) {
    const std::size_t ch = k % channels.size();
    const ChannelSpec& spec = channels[ch];
    std::mt19937_64& rng = rngs[ch];
    const std::string seq = envelopes[k].seq_bits.str();
    const std::uint64_t t_send = k * send_spacing_ms;
    const std::string wire = serialize(envelopes[k]);

    emit(t_send, SimEvent::Kind::send, seq, ch);
    const std::size_t copies = detail::uniform_unit(rng) < spec.duplicate_prob ? 2 : 1;
    for (std::size_t copy = 0; copy < copies; ++copy) {
      if (copy > 0) emit(t_send, SimEvent::Kind::duplicate, seq, ch);
      if (detail::uniform_unit(rng) < spec.drop_prob) {
        emit(t_send, SimEvent::Kind::drop, seq, ch);
        continue;
      }
      std::uint64_t t_arrive =
          t_send + spec.delay_min_ms +
          detail::uniform_below(rng, spec.delay_max_ms - spec.delay_min_ms + 1);
      if (!spec.reorder) {
        t_arrive = std::max(t_arrive, fifo_tail[ch]);
        fifo_tail[ch] = t_arrive;
      }
      Arrival a{t_arrive, ch, wire, false};
      if (detail::uniform_unit(rng) < spec.tamper_prob) {
        detail::tamper_wire(a.wire, rng);
        a.tampered = true;
      }
      pending.push_back(std::move(a));
    }
  }

  std::stable_sort(pending.begin(), pending.end(), [](const Arrival& a, const Arrival& b) {
    return a.time_ms < b.time_ms;
  });
  SimulationResult out;
  for (auto& a : pending) {
    const std::string seq = detail::seq_line(a.wire);
    if (a.tampered) emit(a.time_ms, SimEvent::Kind::tamper, seq, a.channel);
    emit(a.time_ms, SimEvent::Kind::deliver, seq, a.channel);
    out.arrivals.push_back(std::move(a));
  }
  std::stable_sort(events.begin(), events.end(), [](const SimEvent& a, const SimEvent& b) {
    return a.time_ms < b.time_ms;
  });
  out.log = std::move(events);
  return out;
}

// ---------------------------------------------------------------------------
// receiver-side collection

/// Thread-safe collection buffer. Keeps the first MAC-valid copy of each
/// sequence number and records rejected ones.
class Reassembler {
 public:
  enum class Outcome { accepted, duplicate, rejected_mac, malformed };

  explicit Reassembler(SessionConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  Outcome offer(std::string_view wire) {
    StegoEnvelope env;
    try {
      env = parse(wire);
    } catch (const Error&) {
      std::lock_guard lock(mu_);
      rejected_.push_back(detail::seq_line(wire));
      return Outcome::malformed;
    }
    return offer(env);
  }

  Outcome offer(const StegoEnvelope& env) {
    const bool valid = env.version == kProtocolVersion &&
                       verify_mac(cfg_.mac_key, env.seq_bits, env.sequence, env.mac);
    std::lock_guard lock(mu_);
    if (!valid) {
      rejected_.push_back(env.seq_bits.str());
      return Outcome::rejected_mac;
    }
    auto [it, inserted] = accepted_.try_emplace(env.seq_bits.str(), env);
    if (!inserted) {
      ++duplicates_;
      return Outcome::duplicate;
    }
    return Outcome::accepted;
  }

  bool complete() const {
    std::lock_guard lock(mu_);
    return accepted_.size() >= cfg_.n_packets;
  }

  std::size_t accepted_count() const {
    std::lock_guard lock(mu_);
    return accepted_.size();
  }

  std::size_t duplicate_count() const {
    std::lock_guard lock(mu_);
    return duplicates_;
  }

  /// Sequence numbers of rejected copies, in the order they were offered.
  std::vector<std::string> rejected() const {
    std::lock_guard lock(mu_);
    return rejected_;
  }

  std::vector<StegoEnvelope> envelopes() const {
    std::lock_guard lock(mu_);
    std::vector<StegoEnvelope> out;
    for (const auto& [seq, env] : accepted_) out.push_back(env);
    return out;
  }

  /// Throws WrongCount until N distinct valid packets are present.
  std::string decode(const CarrierLayout& layout) const {
    const auto envs = envelopes();
    if (envs.size() != cfg_.n_packets) {
      throw Error(Errc::WrongCount, "have " + std::to_string(envs.size()) + " of " +
                                        std::to_string(cfg_.n_packets) + " packets");
    }
    return receiver_decode(envs, cfg_, layout);
  }

 private:
  SessionConfig cfg_;
  mutable std::mutex mu_;
  std::map<std::string, StegoEnvelope> accepted_;
  std::vector<std::string> rejected_;
  std::size_t duplicates_ = 0;
};

struct ReceiveReport {
  std::size_t arrivals_considered = 0;
  std::size_t accepted = 0;
  std::size_t duplicates = 0;
  std::vector<std::string> rejected;  // seq_bits of copies that failed MAC or parsing
  std::optional<std::string> plaintext;
  std::optional<Error> error;

  bool ok() const { return plaintext.has_value(); }
};

/// Feeds arrivals up to `timeout_ms` of virtual time into a Reassembler and
/// decodes. A packet that never arrives surfaces as WrongCount.
inline ReceiveReport receive(const SimulationResult& sim, const SessionConfig& cfg,
                             const CarrierLayout& layout,
                             std::uint64_t timeout_ms = UINT64_MAX) {
  Reassembler buffer(cfg);
  ReceiveReport report;
  for (const auto& a : sim.arrivals) {
    if (a.time_ms > timeout_ms) break;
    ++report.arrivals_considered;
    buffer.offer(a.wire);
  }
  report.accepted = buffer.accepted_count();
  report.duplicates = buffer.duplicate_count();
  report.rejected = buffer.rejected();
  try {
    report.plaintext = buffer.decode(layout);
  } catch (const Error& e) {
    report.error = e;
  }
  return report;
}

}  // namespace spatial
