#pragma once

// Deterministic global alignment (linear-gap Needleman-Wunsch), center-star
// multiple alignment of 2-3 carriers, and the variable columns that form the
// embedding channel. Sender and receiver must get bit-identical results from
// the same inputs, so every tie is broken by a fixed rule.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spatial/codec.hpp"
#include "spatial/error.hpp"

namespace spatial {

inline constexpr char kGap = '-';

struct ScoringScheme {
  int match = 1;
  int mismatch = -1;
  int gap = -2;

  void validate() const {
    if (match <= mismatch) throw Error(Errc::BadScoring, "match must exceed mismatch");
    if (gap >= 0) throw Error(Errc::BadScoring, "gap penalty must be negative");
  }

  int substitution(char a, char b) const { return a == b ? match : mismatch; }

  friend bool operator==(const ScoringScheme&, const ScoringScheme&) = default;
};

struct PairwiseAlignment {
  std::string row_a;
  std::string row_b;
  long score = 0;
};

/// Global alignment with traceback priority diagonal, then gap in `b`
/// (consume a residue of `a`), then gap in `a`.
inline PairwiseAlignment needleman_wunsch(const NucleotideSeq& a, const NucleotideSeq& b,
                                          const ScoringScheme& s) {
  s.validate();
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t w = m + 1;
  std::vector<long> h((n + 1) * w);
  auto at = [&](std::size_t i, std::size_t j) -> long& { return h[i * w + j]; };

  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<long>(i) * s.gap;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<long>(j) * s.gap;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::max({at(i - 1, j - 1) + s.substitution(a[i - 1], b[j - 1]),
                           at(i - 1, j) + s.gap, at(i, j - 1) + s.gap});
    }
  }

  PairwiseAlignment out;
  out.score = at(n, m);
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        at(i, j) == at(i - 1, j - 1) + s.substitution(a[i - 1], b[j - 1])) {
      out.row_a.push_back(a[--i]);
      out.row_b.push_back(b[--j]);
    } else if (i > 0 && at(i, j) == at(i - 1, j) + s.gap) {
      out.row_a.push_back(a[--i]);
      out.row_b.push_back(kGap);
    } else {
      out.row_a.push_back(kGap);
      out.row_b.push_back(b[--j]);
    }
  }
  std::reverse(out.row_a.begin(), out.row_a.end());
  std::reverse(out.row_b.begin(), out.row_b.end());
  return out;
}

/// Gapped rows, one per carrier, in carrier order.
struct MsaResult {
  std::vector<std::string> rows;

  std::size_t column_count() const { return rows.empty() ? 0 : rows.front().size(); }

  friend bool operator==(const MsaResult&, const MsaResult&) = default;
};

inline std::string degap(const std::string& row) {
  std::string out;
  out.reserve(row.size());
  std::copy_if(row.begin(), row.end(), std::back_inserter(out), [](char c) { return c != kGap; });
  return out;
}

namespace detail {

// Merges a pairwise alignment (center vs newcomer) into an existing MSA
// whose row `center` is the gapped center. Once a gap, always a gap: gap
// columns already in the MSA are kept, and the newcomer's insertions become
// new all-gap columns in the existing rows.
inline void merge_into(std::vector<std::string>& rows, std::size_t center,
                       const PairwiseAlignment& pair, std::string& newcomer) {
  const std::string& c_msa = rows[center];
  std::vector<std::string> merged(rows.size());
  std::string added;
  std::size_t p = 0;
  std::size_t q = 0;
  auto take_msa_column = [&](char newcomer_symbol) {
    for (std::size_t r = 0; r < rows.size(); ++r) merged[r].push_back(rows[r][p]);
    added.push_back(newcomer_symbol);
    ++p;
  };
  while (p < c_msa.size() || q < pair.row_a.size()) {
    if (p < c_msa.size() && c_msa[p] == kGap) {
      take_msa_column(kGap);
    } else if (q < pair.row_a.size() && pair.row_a[q] == kGap) {
      for (auto& r : merged) r.push_back(kGap);
      added.push_back(pair.row_b[q]);
      ++q;
    } else {
      take_msa_column(pair.row_b[q]);
      ++q;
    }
  }
  rows = std::move(merged);
  newcomer = std::move(added);
}

}  // namespace detail

/// K=2: the pairwise alignment. K=3: center-star, where the center maximizes
/// the sum of pairwise scores (lowest index on ties) and the others are merged
/// against it in index order.
inline MsaResult star_msa(std::span<const NucleotideSeq> carriers, const ScoringScheme& s) {
  if (carriers.size() < 2) throw Error(Errc::TooFewCarriers, "need at least 2 carriers");
  if (carriers.size() > 3) throw Error(Errc::TooManyCarriers, "at most 3 carriers are supported");
  for (const auto& c : carriers) {
    if (c.empty()) throw Error(Errc::BadConfig, "carrier sequences must be non-empty");
  }
  if (carriers.size() == 2) {
    auto pair = needleman_wunsch(carriers[0], carriers[1], s);
    return MsaResult{{std::move(pair.row_a), std::move(pair.row_b)}};
  }

  const std::size_t k = carriers.size();
  std::vector<std::vector<PairwiseAlignment>> pairs(k, std::vector<PairwiseAlignment>(k));
  std::vector<long> sums(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      pairs[i][j] = needleman_wunsch(carriers[i], carriers[j], s);
      sums[i] += pairs[i][j].score;
      sums[j] += pairs[i][j].score;
    }
  }
  const auto center = static_cast<std::size_t>(
      std::max_element(sums.begin(), sums.end()) - sums.begin());

  // Center-first alignments; for j < center the stored pair is (j, center).
  auto center_vs = [&](std::size_t j) {
    if (center < j) return pairs[center][j];
    const auto& p = pairs[j][center];
    return PairwiseAlignment{p.row_b, p.row_a, p.score};
  };

  std::vector<std::size_t> order{center};
  std::vector<std::string> rows{carriers[center].str()};
  for (std::size_t j = 0; j < k; ++j) {
    if (j == center) continue;
    std::string newcomer;
    detail::merge_into(rows, 0, center_vs(j), newcomer);
    rows.push_back(std::move(newcomer));
    order.push_back(j);
  }

  MsaResult out;
  out.rows.resize(k);
  for (std::size_t r = 0; r < k; ++r) out.rows[order[r]] = std::move(rows[r]);
  return out;
}

/// Embedding coordinates of one template: ungapped positions, strictly
/// increasing, of the columns where the carriers disagree.
struct VariablePositions {
  std::size_t template_index = 0;
  std::size_t template_length = 0;
  std::vector<std::size_t> positions;

  std::size_t capacity() const noexcept { return positions.size(); }

  friend bool operator==(const VariablePositions&, const VariablePositions&) = default;
};

inline VariablePositions variable_columns(const MsaResult& m, std::size_t template_index) {
  if (template_index >= m.rows.size()) {
    throw Error(Errc::UnknownCarrier, "template index " + std::to_string(template_index) +
                                          " out of range");
  }
  const std::string& tpl = m.rows[template_index];
  VariablePositions vp;
  vp.template_index = template_index;
  std::size_t coord = 0;
  for (std::size_t col = 0; col < tpl.size(); ++col) {
    if (tpl[col] == kGap) continue;
    const bool conserved = std::all_of(m.rows.begin(), m.rows.end(),
                                       [&](const std::string& r) { return r[col] == tpl[col]; });
    if (!conserved) vp.positions.push_back(coord);
    ++coord;
  }
  vp.template_length = coord;
  return vp;
}

}  // namespace spatial
