#include <gtest/gtest.h>

#include <random>

#include "spatial/alignment.hpp"
#include "support/oracles.hpp"

using namespace spatial;
using namespace spatial::testing;

namespace {

std::vector<NucleotideSeq> seqs(std::initializer_list<const char*> xs) {
  std::vector<NucleotideSeq> out;
  for (const char* x : xs) out.emplace_back(x);
  return out;
}

// Drops columns that are gaps in both rows.
std::pair<std::string, std::string> project(const std::string& a, const std::string& b) {
  std::pair<std::string, std::string> out;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (a[c] == kGap && b[c] == kGap) continue;
    out.first.push_back(a[c]);
    out.second.push_back(b[c]);
  }
  return out;
}

}  // namespace

TEST(NeedlemanWunsch, TrivialCases) {
  const ScoringScheme s;
  auto aa = needleman_wunsch(NucleotideSeq("A"), NucleotideSeq("A"), s);
  EXPECT_EQ(aa.row_a, "A");
  EXPECT_EQ(aa.row_b, "A");
  EXPECT_EQ(aa.score, s.match);

  auto gap = needleman_wunsch(NucleotideSeq("A"), NucleotideSeq(""), s);
  EXPECT_EQ(gap.row_a, "A");
  EXPECT_EQ(gap.row_b, "-");
  EXPECT_EQ(gap.score, s.gap);

  auto empty = needleman_wunsch(NucleotideSeq(""), NucleotideSeq(""), s);
  EXPECT_EQ(empty.row_a, "");
  EXPECT_EQ(empty.score, 0);
}

TEST(NeedlemanWunsch, GattGcatMatchesExhaustiveSearch) {
  const ScoringScheme s{1, -1, -2};
  const auto r = needleman_wunsch(NucleotideSeq("GATT"), NucleotideSeq("GCAT"), s);
  EXPECT_EQ(r.score, brute_force_alignment_score("GATT", "GCAT", s));
  EXPECT_EQ(score_rows(r.row_a, r.row_b, s), r.score);
}

TEST(NeedlemanWunsch, TieBreaksTowardDiagonalFirst) {
  // "AA" vs "A": gap-first and gap-last score the same; the traceback takes the
  // diagonal at the end, so the gap lands in front.
  const auto r = needleman_wunsch(NucleotideSeq("AA"), NucleotideSeq("A"), ScoringScheme{});
  EXPECT_EQ(r.row_a, "AA");
  EXPECT_EQ(r.row_b, "-A");
}

TEST(NeedlemanWunsch, AgreesWithBruteForceOnRandomShortPairs) {
  std::mt19937_64 rng(42);
  const std::vector<ScoringScheme> schemes = {{1, -1, -2}, {2, -1, -1}, {3, 0, -4}};
  for (int iter = 0; iter < 600; ++iter) {
    const ScoringScheme& s = schemes[iter % schemes.size()];
    const std::string a = random_nucleotides(rng, rng() % 7);
    const std::string b = random_nucleotides(rng, rng() % 7);
    const auto r = needleman_wunsch(NucleotideSeq(a), NucleotideSeq(b), s);
    ASSERT_EQ(r.score, brute_force_alignment_score(a, b, s)) << a << " / " << b;
    EXPECT_EQ(degap(r.row_a), a);
    EXPECT_EQ(degap(r.row_b), b);
    EXPECT_EQ(r.row_a.size(), r.row_b.size());
    EXPECT_EQ(score_rows(r.row_a, r.row_b, s), r.score);
  }
}

TEST(ScoringScheme, Validation) {
  EXPECT_THROW((ScoringScheme{1, 1, -2}.validate()), Error);
  EXPECT_THROW((ScoringScheme{1, -1, 0}.validate()), Error);
  EXPECT_NO_THROW(ScoringScheme{}.validate());
}

TEST(StarMsa, IdenticalTriple) {
  const auto c = seqs({"ACGTAC", "ACGTAC", "ACGTAC"});
  const MsaResult m = star_msa(c, ScoringScheme{});
  ASSERT_EQ(m.rows.size(), 3u);
  for (const auto& r : m.rows) EXPECT_EQ(r, "ACGTAC");
}

TEST(StarMsa, TwoCarriersIsThePairwiseAlignment) {
  const auto c = seqs({"GATTACA", "GCATGCT"});
  const auto pair = needleman_wunsch(c[0], c[1], ScoringScheme{});
  const MsaResult m = star_msa(c, ScoringScheme{});
  EXPECT_EQ(m.rows, (std::vector<std::string>{pair.row_a, pair.row_b}));
}

TEST(StarMsa, HandMergedCenterStar) {
  // Pairwise scores are all 1, so every sum is 2 and the center is carrier 0.
  // ACGT/AGT aligns as ACGT/A-GT and ACGT/ACT as ACGT/AC-T; neither adds a
  // column to the center.
  const MsaResult m = star_msa(seqs({"ACGT", "AGT", "ACT"}), ScoringScheme{});
  EXPECT_EQ(m.column_count(), 4u);
  EXPECT_EQ(m.rows, (std::vector<std::string>{"ACGT", "A-GT", "AC-T"}));
}

TEST(StarMsa, CenterNeedNotBeFirst) {
  // carrier 1 sits between the other two
  const auto c = seqs({"AAAAAAAA", "AAAACCCC", "CCCCCCCC"});
  const MsaResult m = star_msa(c, ScoringScheme{});
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(degap(m.rows[k]), c[k].str());
  // the center row's projections equal its pairwise alignments
  for (std::size_t j : {0u, 2u}) {
    const auto pair = needleman_wunsch(c[1], c[j], ScoringScheme{});
    const auto proj = project(m.rows[1], m.rows[j]);
    EXPECT_EQ(proj.first, pair.row_a);
    EXPECT_EQ(proj.second, pair.row_b);
  }
}

TEST(StarMsa, CarrierCountErrors) {
  try {
    star_msa(seqs({"ACGT"}), ScoringScheme{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TooFewCarriers);
  }
  try {
    star_msa(seqs({"A", "C", "G", "T"}), ScoringScheme{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TooManyCarriers);
  }
}

TEST(StarMsa, RandomTriplesDegapAndProjectOntoPairwise) {
  std::mt19937_64 rng(8);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<NucleotideSeq> c;
    for (int k = 0; k < 3; ++k) c.emplace_back(random_nucleotides(rng, 1 + rng() % 30));
    const ScoringScheme s{};
    const MsaResult m = star_msa(c, s);
    ASSERT_EQ(m.rows.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(m.rows[k].size(), m.column_count());
      EXPECT_EQ(degap(m.rows[k]), c[k].str());
    }
    // no all-gap columns
    for (std::size_t col = 0; col < m.column_count(); ++col) {
      EXPECT_FALSE(m.rows[0][col] == kGap && m.rows[1][col] == kGap && m.rows[2][col] == kGap);
    }
    // some row is a center whose projections reproduce pairwise scores
    bool found_center = false;
    for (std::size_t ctr = 0; ctr < 3 && !found_center; ++ctr) {
      bool all = true;
      for (std::size_t j = 0; j < 3; ++j) {
        if (j == ctr) continue;
        const auto proj = project(m.rows[ctr], m.rows[j]);
        all = all && score_rows(proj.first, proj.second, s) ==
                         needleman_wunsch(c[ctr], c[j], s).score;
      }
      found_center = all;
    }
    EXPECT_TRUE(found_center);
    EXPECT_EQ(star_msa(c, s), m);
  }
}

TEST(VariableColumns, Examples) {
  MsaResult identical{{"ACGT", "ACGT", "ACGT"}};
  EXPECT_TRUE(variable_columns(identical, 0).positions.empty());

  MsaResult gapped{{"AC-G", "ACTG"}};
  EXPECT_EQ(variable_columns(gapped, 1).positions, (std::vector<std::size_t>{2}));
  EXPECT_TRUE(variable_columns(gapped, 0).positions.empty());
  EXPECT_EQ(variable_columns(gapped, 0).template_length, 3u);
  EXPECT_EQ(variable_columns(gapped, 1).template_length, 4u);

  MsaResult tail{{"AAAA", "AAAT", "AAAC"}};
  EXPECT_EQ(variable_columns(tail, 0).positions, (std::vector<std::size_t>{3}));

  const MsaResult hand = star_msa(seqs({"ACGT", "AGT", "ACT"}), ScoringScheme{});
  EXPECT_EQ(variable_columns(hand, 0).positions, (std::vector<std::size_t>{1, 2}));
}

TEST(VariableColumns, FixtureCarriersAreDeterministicAndMonotone) {
  const auto c = fixture_carriers();
  const MsaResult m1 = star_msa(c, ScoringScheme{});
  const MsaResult m2 = star_msa(c, ScoringScheme{});
  EXPECT_EQ(m1, m2);
  for (std::size_t k = 0; k < c.size(); ++k) {
    EXPECT_EQ(degap(m1.rows[k]), c[k].str());
    const auto vp = variable_columns(m1, k);
    EXPECT_EQ(vp, variable_columns(m2, k));
    EXPECT_EQ(vp.template_length, c[k].size());
    EXPECT_TRUE(std::is_sorted(vp.positions.begin(), vp.positions.end()));
    EXPECT_EQ(std::adjacent_find(vp.positions.begin(), vp.positions.end()), vp.positions.end());
    ASSERT_FALSE(vp.positions.empty());
    EXPECT_LT(vp.positions.back(), c[k].size());
    EXPECT_GE(vp.capacity(), 39u);  // the largest demo framed stream
  }
}
