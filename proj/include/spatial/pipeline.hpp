#pragma once

// Sender and receiver transforms over a shared session configuration.
//
// Sender:   text -> bits -> crypto map -> sigma -> tear -> frame -> embed -> MAC
// Receiver: MAC check -> align -> detect template -> extract -> deframe
//           -> join -> sigma^-1 -> crypto map -> text

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spatial/alignment.hpp"
#include "spatial/auth.hpp"
#include "spatial/codec.hpp"
#include "spatial/detail/rng.hpp"
#include "spatial/error.hpp"
#include "spatial/fragmentation.hpp"
#include "spatial/stego.hpp"

namespace spatial {

struct TemplatePolicy {
  enum class Kind { fixed, round_robin };
  Kind kind = Kind::round_robin;
  std::size_t index = 0;

  static TemplatePolicy fixed(std::size_t k) { return {Kind::fixed, k}; }
  static TemplatePolicy round_robin() { return {}; }

  std::size_t choose(std::size_t packet, std::size_t carrier_count) const {
    return kind == Kind::fixed ? index : packet % carrier_count;
  }

  std::string str() const {
    return kind == Kind::fixed ? "fixed:" + std::to_string(index) : "round_robin";
  }

  friend bool operator==(const TemplatePolicy&, const TemplatePolicy&) = default;
};

/// Everything both ends must share out of band.
struct SessionConfig {
  MacKey mac_key;
  SigmaMap sigma;
  CryptoMap crypto;
  std::vector<NucleotideSeq> carriers;
  ScoringScheme scoring;
  std::size_t n_packets = 2;
  std::size_t total_message_bits = 0;
  TemplatePolicy template_policy;
  std::optional<std::size_t> max_packet_bits;

  void validate() const {
    if (mac_key.bytes().size() < kMinMacKeyBytes) {
      throw Error(Errc::KeyTooShort, "session MAC key missing or shorter than 16 bytes");
    }
    if (crypto.kind() == CryptoMap::Kind::xor_keystream && crypto.key_material().empty()) {
      throw Error(Errc::EmptyKey, "xor keystream requires key material");
    }
    if (carriers.size() < 2) throw Error(Errc::TooFewCarriers, "need 2 or 3 carriers");
    if (carriers.size() > 3) throw Error(Errc::TooManyCarriers, "need 2 or 3 carriers");
    for (std::size_t i = 0; i < carriers.size(); ++i) {
      if (carriers[i].empty()) throw Error(Errc::BadConfig, "empty carrier");
      for (std::size_t j = i + 1; j < carriers.size(); ++j) {
        if (carriers[i] == carriers[j]) {
          throw Error(Errc::BadConfig, "carriers " + std::to_string(i) + " and " +
                                           std::to_string(j) + " are identical");
        }
      }
    }
    scoring.validate();
    if (n_packets < 2) throw Error(Errc::BadConfig, "packet count must be at least 2");
    if (total_message_bits == 0 || total_message_bits % 2 != 0) {
      throw Error(Errc::BadConfig, "total message bits must be even and positive");
    }
    if (n_packets > total_message_bits / 2) {
      throw Error(Errc::BadConfig, "more packets than message nucleotides");
    }
    if (template_policy.kind == TemplatePolicy::Kind::fixed &&
        template_policy.index >= carriers.size()) {
      throw Error(Errc::BadConfig, "fixed template index out of range");
    }
    if (max_packet_bits && total_message_bits > *max_packet_bits) {
      throw Error(Errc::BadConfig, "message exceeds max_packet_bits");
    }
  }

  FrameParams frame_params() const { return {sigma, crypto, n_packets, total_message_bits}; }
};

/// Alignment-derived embedding channel for a carrier set. Both ends compute
/// it from the shared carriers and scoring.
struct CarrierLayout {
  MsaResult msa;
  std::vector<VariablePositions> positions;

  friend bool operator==(const CarrierLayout&, const CarrierLayout&) = default;
};

inline CarrierLayout layout_carriers(std::span<const NucleotideSeq> carriers,
                                     const ScoringScheme& scoring) {
  CarrierLayout layout{star_msa(carriers, scoring), {}};
  for (std::size_t k = 0; k < carriers.size(); ++k) {
    layout.positions.push_back(variable_columns(layout.msa, k));
  }
  return layout;
}

inline CarrierLayout layout_carriers(const SessionConfig& cfg) {
  return layout_carriers(cfg.carriers, cfg.scoring);
}

struct StegoEnvelope {
  std::string version{kProtocolVersion};
  BitString seq_bits;
  NucleotideSeq sequence;
  AuthTag mac{};

  friend bool operator==(const StegoEnvelope&, const StegoEnvelope&) = default;
};

/// Sender-side record of one packet; `envelope` is what gets transmitted.
struct EncodedPacket {
  Fragment fragment;
  FramedStream stream;
  std::size_t template_index = 0;
  std::uint64_t filler_seed = 0;
  StegoEnvelope envelope;
};

inline std::vector<EncodedPacket> sender_encode_detailed(std::span<const std::uint8_t> plaintext,
                                                         const SessionConfig& cfg,
                                                         const TearPlan& plan,
                                                         std::uint64_t filler_seed,
                                                         const CarrierLayout& layout) {
  cfg.validate();
  if (plaintext.size() * 8 != cfg.total_message_bits) {
    throw Error(Errc::BadConfig,
                "plaintext is " + std::to_string(plaintext.size() * 8) + " bits, session expects " +
                    std::to_string(cfg.total_message_bits));
  }
  plan.validate();
  if (plan.leaf_count() != cfg.n_packets) {
    throw Error(Errc::PlanLengthMismatch, "plan has " + std::to_string(plan.leaf_count()) +
                                              " leaves, session expects " +
                                              std::to_string(cfg.n_packets));
  }
  const BitString cipher = crypto_apply(cfg.crypto, text_to_bits(plaintext));
  const NucleotideSeq encoded = sigma_encode(cfg.sigma, cipher);
  const FrameParams params = cfg.frame_params();

  std::vector<EncodedPacket> packets;
  for (Fragment& f : tear(encoded, plan)) {
    const std::size_t k = packets.size();
    EncodedPacket p;
    p.stream = frame(f, params);
    p.template_index = cfg.template_policy.choose(k, cfg.carriers.size());
    p.filler_seed = detail::derive_seed(filler_seed, k);
    StegoSequence stego = embed(cfg.carriers[p.template_index],
                                layout.positions[p.template_index], p.stream, p.filler_seed);
    p.envelope.seq_bits = encode_path(f.path, cfg.n_packets);
    p.envelope.sequence = std::move(stego.residues);
    p.envelope.mac = compute_mac(cfg.mac_key, p.envelope.seq_bits, p.envelope.sequence);
    p.fragment = std::move(f);
    packets.push_back(std::move(p));
  }
  return packets;
}

inline std::vector<StegoEnvelope> sender_encode(std::span<const std::uint8_t> plaintext,
                                                const SessionConfig& cfg, const TearPlan& plan,
                                                std::uint64_t filler_seed,
                                                const CarrierLayout& layout) {
  std::vector<StegoEnvelope> out;
  for (auto& p : sender_encode_detailed(plaintext, cfg, plan, filler_seed, layout)) {
    out.push_back(std::move(p.envelope));
  }
  return out;
}

inline std::vector<StegoEnvelope> sender_encode(std::span<const std::uint8_t> plaintext,
                                                const SessionConfig& cfg, const TearPlan& plan,
                                                std::uint64_t filler_seed) {
  cfg.validate();
  return sender_encode(plaintext, cfg, plan, filler_seed, layout_carriers(cfg));
}

inline std::vector<StegoEnvelope> sender_encode(std::string_view plaintext,
                                                const SessionConfig& cfg, const TearPlan& plan,
                                                std::uint64_t filler_seed) {
  return sender_encode(std::span<const std::uint8_t>(
                           reinterpret_cast<const std::uint8_t*>(plaintext.data()),
                           plaintext.size()),
                       cfg, plan, filler_seed);
}

/// Throws BadVersion or MacFailure (subject = seq_bits).
inline void authenticate(const StegoEnvelope& env, const SessionConfig& cfg) {
  if (env.version != kProtocolVersion) {
    throw Error(Errc::BadVersion, "unsupported version '" + env.version + "'", env.seq_bits.str());
  }
  if (!verify_mac(cfg.mac_key, env.seq_bits, env.sequence, env.mac)) {
    throw Error(Errc::MacFailure, "MAC mismatch for packet " + env.seq_bits.str(),
                env.seq_bits.str());
  }
}

/// Receiver-side view of one authenticated envelope.
struct OpenedPacket {
  std::size_t template_index = 0;
  NucleotideSeq extracted;  // everything read from the variable positions
  std::uint64_t size_field = 0;
  Fragment fragment;
};

/// Extraction and deframing of an envelope whose MAC is already verified.
inline OpenedPacket open_envelope(const StegoEnvelope& env, const SessionConfig& cfg,
                                  const CarrierLayout& layout) {
  TearPath declared;
  try {
    declared = decode_path(env.seq_bits, cfg.n_packets);
  } catch (const Error& e) {
    throw Error(Errc::BadPath, e.what(), env.seq_bits.str());
  }
  OpenedPacket out;
  out.template_index = detect_template(env.sequence, cfg.carriers, layout.positions);
  out.extracted = extract(env.sequence, layout.positions[out.template_index]);
  const FrameParams params = cfg.frame_params();
  out.fragment = deframe(out.extracted, params);
  out.size_field = out.fragment.payload.size() + params.trailer_nt();
  if (out.fragment.path != declared) {
    throw Error(Errc::SeqMismatch,
                "envelope says " + declared.str() + " but embedded trailer says " +
                    out.fragment.path.str(),
                env.seq_bits.str());
  }
  return out;
}

inline std::string receiver_decode(std::span<const StegoEnvelope> envelopes,
                                   const SessionConfig& cfg, const CarrierLayout& layout) {
  cfg.validate();
  for (const auto& env : envelopes) authenticate(env, cfg);
  if (envelopes.size() != cfg.n_packets) {
    throw Error(Errc::WrongCount, "received " + std::to_string(envelopes.size()) +
                                      " packets, expected " + std::to_string(cfg.n_packets));
  }
  std::vector<Fragment> fragments;
  fragments.reserve(envelopes.size());
  for (const auto& env : envelopes) {
    fragments.push_back(open_envelope(env, cfg, layout).fragment);
  }
  const NucleotideSeq encoded = join(fragments);
  if (encoded.size() * 2 != cfg.total_message_bits) {
    throw Error(Errc::TotalSizeMismatch,
                "reassembled " + std::to_string(encoded.size() * 2) + " bits, expected " +
                    std::to_string(cfg.total_message_bits));
  }
  return bits_to_text(crypto_apply(cfg.crypto, sigma_decode(cfg.sigma, encoded)));
}

inline std::string receiver_decode(std::span<const StegoEnvelope> envelopes,
                                   const SessionConfig& cfg) {
  cfg.validate();
  return receiver_decode(envelopes, cfg, layout_carriers(cfg));
}

}  // namespace spatial
