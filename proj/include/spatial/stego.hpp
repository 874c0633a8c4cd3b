#pragma once

// Substitution embedding of a framed stream into a template carrier's
// variable positions, extraction, and template detection on receipt.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "spatial/alignment.hpp"
#include "spatial/codec.hpp"
#include "spatial/detail/rng.hpp"
#include "spatial/error.hpp"
#include "spatial/fragmentation.hpp"

namespace spatial {

struct StegoSequence {
  NucleotideSeq residues;
  std::size_t template_index = 0;

  friend bool operator==(const StegoSequence&, const StegoSequence&) = default;
};

/// Writes header, payload and trailer into the variable positions in
/// increasing order, then seeded-random nucleotides into the rest.
inline StegoSequence embed(const NucleotideSeq& tpl, const VariablePositions& vp,
                           const FramedStream& stream, std::uint64_t filler_seed) {
  if (tpl.size() != vp.template_length) {
    throw Error(Errc::LengthMismatch, "template length " + std::to_string(tpl.size()) +
                                          " does not match its variable positions (" +
                                          std::to_string(vp.template_length) + ")");
  }
  if (stream.size() > vp.capacity()) {
    throw Error(Errc::CapacityExceeded,
                "framed stream of " + std::to_string(stream.size()) + " nucleotides exceeds " +
                    std::to_string(vp.capacity()) + " variable positions of carrier " +
                    std::to_string(vp.template_index));
  }
  const std::string data = stream.joined().str();
  std::string out = tpl.str();
  std::mt19937_64 rng(filler_seed);
  for (std::size_t i = 0; i < vp.positions.size(); ++i) {
    out[vp.positions[i]] =
        i < data.size() ? data[i] : "ACGT"[detail::uniform_below(rng, 4)];
  }
  return StegoSequence{NucleotideSeq(std::move(out)), vp.template_index};
}

inline NucleotideSeq extract(const NucleotideSeq& stego, const VariablePositions& vp) {
  if (stego.size() != vp.template_length) {
    throw Error(Errc::LengthMismatch, "sequence length " + std::to_string(stego.size()) +
                                          " differs from template length " +
                                          std::to_string(vp.template_length));
  }
  std::string out;
  out.reserve(vp.positions.size());
  for (std::size_t p : vp.positions) out.push_back(stego[p]);
  return NucleotideSeq(std::move(out));
}

/// Unique carrier that `stego` could have been built from: same length and
/// identical outside that carrier's variable positions.
inline std::size_t detect_template(const NucleotideSeq& stego,
                                   std::span<const NucleotideSeq> carriers,
                                   std::span<const VariablePositions> vps) {
  if (carriers.empty()) throw Error(Errc::UnknownCarrier, "no carriers");
  if (vps.size() != carriers.size()) {
    throw Error(Errc::LengthMismatch, "one VariablePositions per carrier required");
  }
  std::vector<std::size_t> matches;
  for (std::size_t k = 0; k < carriers.size(); ++k) {
    const NucleotideSeq& c = carriers[k];
    if (c.size() != stego.size()) continue;
    const auto& pos = vps[k].positions;
    std::size_t next = 0;
    bool ok = true;
    for (std::size_t i = 0; i < c.size() && ok; ++i) {
      if (next < pos.size() && pos[next] == i) {
        ++next;
        continue;
      }
      ok = c[i] == stego[i];
    }
    if (ok) matches.push_back(k);
  }
  if (matches.empty()) throw Error(Errc::UnknownCarrier, "sequence matches no carrier");
  if (matches.size() > 1) {
    throw Error(Errc::AmbiguousTemplate,
                "sequence matches " + std::to_string(matches.size()) + " carriers");
  }
  return matches.front();
}

}  // namespace spatial
