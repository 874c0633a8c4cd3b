#pragma once

// Implementations of the `spatial` subcommands. Each returns a process exit
// code and writes to the given streams, so tests can drive them in-process.
//
// Exit codes: 0 success, 2 MAC failure, 3 structural/format failure,
// 4 capacity/config failure.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "spatial/error.hpp"
#include "spatial/netsim.hpp"
#include "spatial/pipeline.hpp"
#include "spatial/session_io.hpp"

namespace spatial::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMac = 2;
inline constexpr int kExitStructural = 3;
inline constexpr int kExitConfig = 4;

inline int exit_code_for(Errc e) {
  switch (e) {
    case Errc::MacFailure:
      return kExitMac;
    case Errc::CapacityExceeded:
    case Errc::SizeOverflow:
    case Errc::BadConfig:
    case Errc::KeyTooShort:
    case Errc::EmptyKey:
    case Errc::PlanLengthMismatch:
    case Errc::BadPlan:
    case Errc::TooFewCarriers:
    case Errc::TooManyCarriers:
    case Errc::BadScoring:
    case Errc::BadSessionFile:
    case Errc::BadFasta:
      return kExitConfig;
    default:
      return kExitStructural;
  }
}

inline constexpr std::uint64_t kPlanStream = 0x504C414E;  // seed stream for default plans

inline Bytes read_bytes(const fs::path& p) {
  const std::string s = read_file(p);
  return {s.begin(), s.end()};
}

/// Default plan when none is given: the first of a seeded series of random
/// binary splits whose framed streams all fit their templates. If none of
/// the candidates fits, the first one is returned and encoding reports the
/// capacity error.
inline TearPlan default_plan(const SessionConfig& cfg, const CarrierLayout& layout,
                             std::uint64_t seed, std::size_t attempts = 256) {
  const std::size_t overhead = header_width_nt(cfg.total_message_bits) + cfg.n_packets - 1;
  const std::uint64_t stream = detail::derive_seed(seed, kPlanStream);
  for (std::size_t a = 0; a < attempts; ++a) {
    TearPlan plan = random_binary_plan(cfg.total_message_bits / 2, cfg.n_packets,
                                       detail::derive_seed(stream, a));
    const auto lengths = plan.leaf_lengths();
    bool fits = true;
    for (std::size_t k = 0; k < lengths.size() && fits; ++k) {
      const std::size_t t = cfg.template_policy.choose(k, cfg.carriers.size());
      fits = lengths[k] + overhead <= layout.positions[t].capacity();
    }
    if (fits) return plan;
  }
  return random_binary_plan(cfg.total_message_bits / 2, cfg.n_packets,
                            detail::derive_seed(stream, 0));
}

// ---------------------------------------------------------------------------

inline int cmd_keygen(const fs::path& out_path, std::size_t n_packets,
                      std::size_t total_message_bits, const fs::path& carriers_path,
                      std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  try {
    SessionConfig cfg;
    Bytes key(32);
    if (seed) {
      std::mt19937_64 rng(detail::derive_seed(*seed, 0x4B4559));
      for (auto& b : key) b = static_cast<std::uint8_t>(rng() >> 56);
    } else {
      std::random_device rd;
      for (auto& b : key) b = static_cast<std::uint8_t>(rd());
    }
    cfg.mac_key = MacKey(std::move(key));
    cfg.carriers = load_carriers(carriers_path);
    cfg.n_packets = n_packets;
    cfg.total_message_bits = total_message_bits;
    cfg.validate();

    const fs::path out_dir = fs::absolute(out_path).parent_path();
    const std::string rel = fs::relative(fs::absolute(carriers_path), out_dir).generic_string();
    write_file(out_path, format_session(cfg, rel));
    out << "wrote " << out_path.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "keygen: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

inline void print_capacity_report(const SessionConfig& cfg, const CarrierLayout& layout,
                                  const TearPlan& plan, std::ostream& out) {
  out << "carrier capacity (variable positions):\n";
  for (const auto& vp : layout.positions) {
    out << "  carrier " << vp.template_index << ": " << vp.capacity() << " of "
        << vp.template_length << " nt\n";
  }
  const auto lengths = plan.leaf_lengths();
  const std::size_t overhead = header_width_nt(cfg.total_message_bits) + cfg.n_packets - 1;
  out << "packets (header + payload + trailer -> template):\n";
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const std::size_t t = cfg.template_policy.choose(k, cfg.carriers.size());
    const std::size_t need = lengths[k] + overhead;
    out << "  packet " << k << ": " << need << " nt -> carrier " << t
        << (need > layout.positions[t].capacity() ? "  OVER CAPACITY" : "") << "\n";
  }
}

inline int cmd_encode(const fs::path& session_path, const fs::path& plaintext_path,
                      const fs::path& out_dir, std::uint64_t seed,
                      const std::optional<std::string>& plan_text, std::ostream& out,
                      std::ostream& err) {
  try {
    const SessionConfig cfg = load_session(session_path).config;
    const Bytes plaintext = read_bytes(plaintext_path);
    if (plaintext.empty()) throw Error(Errc::BadConfig, "plaintext is empty");
    const CarrierLayout layout = layout_carriers(cfg);
    const TearPlan plan = plan_text ? TearPlan::parse(*plan_text) : default_plan(cfg, layout, seed);
    print_capacity_report(cfg, layout, plan, out);

    // Everything is built before anything touches the output directory.
    const auto envelopes = sender_encode(plaintext, cfg, plan, seed, layout);
    fs::create_directories(out_dir);
    for (const auto& env : envelopes) {
      const fs::path file = out_dir / (env.seq_bits.str() + ".spkt");
      write_file(file, serialize(env));
      out << "wrote " << file.string() << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "encode: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "encode: " << e.what() << "\n";
    return kExitStructural;
  }
}

inline int cmd_decode(const fs::path& session_path, const std::vector<fs::path>& envelope_paths,
                      const std::optional<fs::path>& out_path, std::ostream& out,
                      std::ostream& err) {
  try {
    const SessionConfig cfg = load_session(session_path).config;
    std::vector<StegoEnvelope> envelopes;
    for (const auto& p : envelope_paths) {
      try {
        envelopes.push_back(parse(read_file(p)));
        authenticate(envelopes.back(), cfg);
      } catch (const Error& e) {
        err << "decode: " << p.string() << ": " << e.what() << "\n";
        return exit_code_for(e.code());
      }
    }
    const std::string plaintext = receiver_decode(envelopes, cfg);
    if (out_path) {
      write_file(*out_path, plaintext);
    } else {
      out << plaintext << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "decode: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

inline int cmd_simulate(const fs::path& session_path, const fs::path& plaintext_path,
                        const fs::path& channels_path, std::uint64_t seed, std::ostream& out,
                        std::ostream& err) {
  try {
    const SessionConfig cfg = load_session(session_path).config;
    const ChannelsFile channels = parse_channels(read_file(channels_path));
    const Bytes plaintext = read_bytes(plaintext_path);
    const CarrierLayout layout = layout_carriers(cfg);
    const auto envelopes = sender_encode(plaintext, cfg, default_plan(cfg, layout, seed), seed, layout);
    const SimulationResult sim = simulate_send(envelopes, channels.channels,
                                               channels.send_spacing_ms);
    out << sim.log_text();
    const ReceiveReport report = receive(sim, cfg, layout, channels.timeout_ms);
    out << "arrivals: " << report.arrivals_considered << ", accepted: " << report.accepted
        << ", duplicates: " << report.duplicates << "\n";
    out << "rejected:";
    for (const auto& s : report.rejected) out << " " << s;
    out << "\n";
    if (report.ok()) {
      out << "result: OK\n" << *report.plaintext << "\n";
      return kExitOk;
    }
    out << "result: FAILED " << report.error->what() << "\n";
    return report.rejected.empty() ? exit_code_for(report.error->code()) : kExitMac;
  } catch (const Error& e) {
    err << "simulate: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

inline int cmd_inspect(const fs::path& session_path, const fs::path& envelope_path,
                       std::ostream& out, std::ostream& err) {
  try {
    const SessionConfig cfg = load_session(session_path).config;
    const StegoEnvelope env = parse(read_file(envelope_path));
    const bool mac_ok = verify_mac(cfg.mac_key, env.seq_bits, env.sequence, env.mac);
    out << "version:   " << env.version << "\n"
        << "seq_bits:  " << env.seq_bits.str() << "\n"
        << "length:    " << env.sequence.size() << " nt\n"
        << "MAC:       " << (mac_ok ? "OK" : "FAILED") << "\n";

    const CarrierLayout layout = layout_carriers(cfg);
    OpenedPacket p;
    try {
      p = open_envelope(env, cfg, layout);
    } catch (const Error& e) {
      err << "inspect: " << e.what() << "\n";
      return mac_ok ? exit_code_for(e.code()) : kExitMac;
    }
    const std::size_t hn = cfg.frame_params().header_nt();
    const std::size_t used = hn + p.size_field;
    const std::string& x = p.extracted.str();
    out << "template:  carrier " << p.template_index << " ("
        << layout.positions[p.template_index].capacity() << " variable positions)\n"
        << "header:    " << x.substr(0, hn) << "\n"
        << "size:      " << p.size_field << "\n"
        << "payload:   " << p.fragment.payload.str() << "\n"
        << "trailer:   " << x.substr(used - (cfg.n_packets - 1), cfg.n_packets - 1) << "\n"
        << "path:      " << p.fragment.path.str() << "\n"
        << "filler:    " << x.substr(used) << "\n";
    return mac_ok ? kExitOk : kExitMac;
  } catch (const Error& e) {
    err << "inspect: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

}  // namespace spatial::cli
