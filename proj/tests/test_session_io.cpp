#include <gtest/gtest.h>

#include "spatial/session_io.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace spatial;
using namespace spatial::testing;

namespace {

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::IoFailure;
}

std::string session_text(const std::string& extra = "") {
  return "# demo\n"
         "mac_key=" + std::string(64, 'a') + "\n"
         "sigma=ACGT\n"
         "crypto=complement\n"
         "scoring=1 -1 -2\n"
         "n_packets=4\n"
         "total_message_bits=144\n"
         "template_policy=round_robin\n"
         "carriers=carriers.fasta\n" + extra;
}

}  // namespace

TEST(Fasta, NormalizesCaseAndWhitespace) {
  const auto recs = parse_fasta(">one first\nacgt\n  AC gt \n\n>two\r\nTTTT\r\n");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].name, "one first");
  EXPECT_EQ(recs[0].sequence.str(), "ACGTACGT");
  EXPECT_EQ(recs[1].name, "two");
  EXPECT_EQ(recs[1].sequence.str(), "TTTT");
}

TEST(Fasta, Rejections) {
  EXPECT_EQ(code_of([] { parse_fasta("ACGT\n>x\nA\n"); }), Errc::BadFasta);
  EXPECT_EQ(code_of([] { parse_fasta(">x\nACNT\n"); }), Errc::BadFasta);
  EXPECT_EQ(code_of([] { parse_fasta(">x\n>y\nA\n"); }), Errc::BadFasta);
}

TEST(Fasta, FormatRoundTrip) {
  std::vector<FastaRecord> recs = {{"a", NucleotideSeq(std::string(130, 'G'))},
                                   {"b", NucleotideSeq("ACGT")}};
  const auto back = parse_fasta(format_fasta(recs));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].sequence, recs[0].sequence);
  EXPECT_EQ(back[1].name, "b");
}

TEST(Fasta, CarrierCountLimits) {
  TempDir dir;
  write_file(dir / "one.fa", ">a\nACGT\n");
  write_file(dir / "four.fa", ">a\nA\n>b\nC\n>c\nG\n>d\nT\n");
  EXPECT_EQ(code_of([&] { load_carriers(dir / "one.fa"); }), Errc::BadFasta);
  EXPECT_EQ(code_of([&] { load_carriers(dir / "four.fa"); }), Errc::BadFasta);
  EXPECT_EQ(code_of([&] { load_carriers(dir / "missing.fa"); }), Errc::IoFailure);
  EXPECT_EQ(fixture_carriers().size(), 3u);
}

TEST(Session, ParsesAndResolvesCarriers) {
  TempDir dir;
  write_file(dir / "carriers.fasta", read_file(data_dir() / "carriers.fasta"));
  const SessionFile s = parse_session(session_text(), dir.path());
  EXPECT_EQ(s.carriers_path, "carriers.fasta");
  EXPECT_EQ(s.config.carriers, fixture_carriers());
  EXPECT_EQ(s.config.n_packets, 4u);
  EXPECT_EQ(s.config.total_message_bits, 144u);
  EXPECT_EQ(Bytes(s.config.mac_key.bytes().begin(), s.config.mac_key.bytes().end()), Bytes(32, 0xAA));
  EXPECT_EQ(s.config.scoring.gap, -2);
  EXPECT_FALSE(s.config.max_packet_bits);
}

TEST(Session, FormatRoundTrip) {
  TempDir dir;
  write_file(dir / "c.fa", read_file(data_dir() / "carriers.fasta"));
  SessionConfig cfg = demo_config();
  cfg.sigma = SigmaMap("TGAC");
  cfg.crypto = CryptoMap::xor_keystream({0x01, 0xfe});
  cfg.scoring = ScoringScheme{2, -3, -4};
  cfg.template_policy = TemplatePolicy::fixed(2);
  cfg.max_packet_bits = 4096;
  write_file(dir / "s.txt", format_session(cfg, "c.fa"));
  const SessionConfig back = load_session(dir / "s.txt").config;
  EXPECT_EQ(format_session(back, "c.fa"), format_session(cfg, "c.fa"));
  EXPECT_EQ(back.carriers, cfg.carriers);
}

TEST(Session, Rejections) {
  TempDir dir;
  write_file(dir / "carriers.fasta", read_file(data_dir() / "carriers.fasta"));
  const auto code = [&](const std::string& text) {
    return code_of([&] { parse_session(text, dir.path()); });
  };
  EXPECT_EQ(code(session_text("colour=blue\n")), Errc::BadSessionFile);
  EXPECT_EQ(code(session_text("sigma=ACGT\n")), Errc::BadSessionFile);
  EXPECT_EQ(code(session_text("just words\n")), Errc::BadSessionFile);

  std::string no_scoring = session_text();
  no_scoring.erase(no_scoring.find("scoring="), 15);
  EXPECT_EQ(code(no_scoring), Errc::BadSessionFile);

  std::string bad_sigma = session_text();
  bad_sigma.replace(bad_sigma.find("sigma=ACGT"), 10, "sigma=AACT");
  EXPECT_EQ(code(bad_sigma), Errc::BadConfig);

  std::string short_key = session_text();
  short_key.replace(short_key.find(std::string(64, 'a')), 64, "abcd");
  EXPECT_EQ(code(short_key), Errc::KeyTooShort);

  std::string one_packet = session_text();
  one_packet.replace(one_packet.find("n_packets=4"), 11, "n_packets=1");
  EXPECT_EQ(code(one_packet), Errc::BadConfig);

  std::string empty_xor = session_text();
  empty_xor.replace(empty_xor.find("crypto=complement"), 17, "crypto=xor:");
  EXPECT_EQ(code(empty_xor), Errc::EmptyKey);
}

TEST(Session, ScoringAcceptsCommas) {
  const ScoringScheme s = parse_scoring("2, -1, -3");
  EXPECT_EQ(s.match, 2);
  EXPECT_EQ(s.mismatch, -1);
  EXPECT_EQ(s.gap, -3);
  EXPECT_THROW(parse_scoring("1 -1"), Error);
  EXPECT_THROW(parse_scoring("1 -1 -2 7"), Error);
}

TEST(Channels, ParsesStanzas) {
  const ChannelsFile f = parse_channels(
      "timeout_ms=250\nsend_spacing_ms=3\n"
      "[channel]\ndelay_ms=5-40\nreorder=true\nseed=11\n"
      "[channel]\ndelay_ms=7\ntamper_prob=1\nduplicate_prob=0.25\ndrop_prob=0.5\n");
  EXPECT_EQ(f.timeout_ms, 250u);
  EXPECT_EQ(f.send_spacing_ms, 3u);
  ASSERT_EQ(f.channels.size(), 2u);
  EXPECT_EQ(f.channels[0], (ChannelSpec{5, 40, true, 0, 0, 0, 11}));
  EXPECT_EQ(f.channels[1], (ChannelSpec{7, 7, false, 0.25, 0.5, 1.0, 0}));
}

TEST(Channels, Rejections) {
  EXPECT_THROW(parse_channels(""), Error);
  EXPECT_THROW(parse_channels("[channel]\ndrop_prob=2\n"), Error);
  EXPECT_THROW(parse_channels("[channel]\nreorder=yes\n"), Error);
  EXPECT_THROW(parse_channels("[channel]\njitter=4\n"), Error);
  EXPECT_THROW(parse_channels("[channel]\ndelay_ms=9-3\n"), Error);
  EXPECT_THROW(parse_channels("loss=1\n[channel]\n"), Error);
}
