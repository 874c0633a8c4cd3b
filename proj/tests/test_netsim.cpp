#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <thread>

#include "spatial/loopback.hpp"
#include "spatial/netsim.hpp"
#include "support/oracles.hpp"

using namespace spatial;
using namespace spatial::testing;

namespace {

Errc parse_error(const std::string& wire) {
  try {
    parse(wire);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parse accepted: " << wire;
  return Errc::IoFailure;
}

struct Demo {
  SessionConfig cfg = demo_config();
  CarrierLayout layout = layout_carriers(cfg);
  std::vector<StegoEnvelope> envs = sender_encode(kDemoPlaintext, cfg, demo_plan(), 5);
};

const Demo& demo() {
  static const Demo d;
  return d;
}

std::string good_wire() { return serialize(demo().envs[0]); }

}  // namespace

TEST(Wire, RoundTripAndLayout) {
  for (const auto& env : demo().envs) {
    const std::string w = serialize(env);
    EXPECT_EQ(parse(w), env);
    EXPECT_EQ(std::count(w.begin(), w.end(), '\n'), 4);
    EXPECT_EQ(w.rfind("SPATIAL/1\n", 0), 0u);
    const std::string mac_line = w.substr(w.size() - 65, 64);
    EXPECT_EQ(mac_line.find_first_not_of("0123456789abcdef"), std::string::npos);
  }
}

TEST(Wire, DistinctEnvelopesSerializeDistinctly) {
  std::set<std::string> seen;
  for (const auto& env : demo().envs) seen.insert(serialize(env));
  StegoEnvelope v = demo().envs[0];
  v.mac[31] ^= 1;
  seen.insert(serialize(v));
  EXPECT_EQ(seen.size(), demo().envs.size() + 1);
}

TEST(Wire, Rejections) {
  std::string w = good_wire();
  EXPECT_EQ(parse_error("SPATIAL/2" + w.substr(9)), Errc::BadVersion);

  std::string with_n = w;
  with_n[with_n.find('\n', 10) + 5] = 'N';
  EXPECT_EQ(parse_error(with_n), Errc::BadAlphabet);

  std::string bad_seq = w;
  bad_seq[10] = '2';
  EXPECT_EQ(parse_error(bad_seq), Errc::BadAlphabet);

  EXPECT_EQ(parse_error(w.substr(0, w.size() - 1)), Errc::MissingLine);
  EXPECT_EQ(parse_error("SPATIAL/1\n000001\n"), Errc::MissingLine);
  EXPECT_EQ(parse_error(w + "extra\n"), Errc::MissingLine);

  std::string short_tag = w;
  short_tag.erase(short_tag.size() - 3, 2);
  EXPECT_EQ(parse_error(short_tag), Errc::BadTagLength);

  std::string upper = w;
  upper[upper.size() - 2] = 'F';
  if (upper == w) upper[upper.size() - 2] = 'E';
  EXPECT_EQ(parse_error(upper), Errc::BadAlphabet);
}

TEST(Simulator, ZeroFaultChannelDeliversInOrder) {
  const std::vector<ChannelSpec> ch(1);
  const auto sim = simulate_send(demo().envs, ch);
  ASSERT_EQ(sim.arrivals.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(sim.arrivals[k].wire, serialize(demo().envs[k]));
  EXPECT_EQ(sim.log_text(),
            "0 send 000001 0\n0 deliver 000001 0\n1 send 001001 0\n1 deliver 001001 0\n"
            "2 send 101001 0\n2 deliver 101001 0\n3 send 101010 0\n3 deliver 101010 0\n");
  const auto report = receive(sim, demo().cfg, demo().layout);
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(*report.plaintext, kDemoPlaintext);
}

TEST(Simulator, FifoChannelPreservesOrderUnderDelay) {
  std::vector<ChannelSpec> ch(1);
  ch[0].delay_min_ms = 0;
  ch[0].delay_max_ms = 500;
  ch[0].rng_seed = 17;
  const auto sim = simulate_send(demo().envs, ch);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(sim.arrivals[k].wire, serialize(demo().envs[k]));
}

TEST(Simulator, SeededRunsAreIdentical) {
  std::vector<ChannelSpec> ch(3);
  for (std::size_t i = 0; i < 3; ++i) {
    ch[i] = ChannelSpec{1, 200, true, 0.3, 0.1, 0.2, 100 + i};
  }
  const auto a = simulate_send(demo().envs, ch);
  const auto b = simulate_send(demo().envs, ch);
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(a.arrivals, b.arrivals);
  ch[1].rng_seed = 999;
  EXPECT_NE(simulate_send(demo().envs, ch).log_text(), a.log_text());
}

TEST(Simulator, EventConservation) {
  std::mt19937_64 rng(3);
  for (int run = 0; run < 30; ++run) {
    std::vector<ChannelSpec> ch(1 + rng() % 3);
    for (auto& c : ch) {
      c = ChannelSpec{rng() % 5, 5 + rng() % 100, (rng() & 1) != 0, 0.4, 0.3, 0.3, rng()};
    }
    const auto sim = simulate_send(demo().envs, ch);
    std::size_t sends = 0, dups = 0, drops = 0, delivers = 0, tampers = 0;
    for (const auto& e : sim.log) {
      switch (e.kind) {
        case SimEvent::Kind::send: ++sends; break;
        case SimEvent::Kind::duplicate: ++dups; break;
        case SimEvent::Kind::drop: ++drops; break;
        case SimEvent::Kind::deliver: ++delivers; break;
        case SimEvent::Kind::tamper: ++tampers; break;
      }
    }
    EXPECT_EQ(sends, demo().envs.size());
    EXPECT_EQ(sends + dups, drops + delivers);
    EXPECT_EQ(delivers, sim.arrivals.size());
    EXPECT_EQ(tampers, static_cast<std::size_t>(std::count_if(
                           sim.arrivals.begin(), sim.arrivals.end(),
                           [](const Arrival& a) { return a.tampered; })));
    EXPECT_TRUE(std::is_sorted(sim.arrivals.begin(), sim.arrivals.end(),
                               [](const Arrival& x, const Arrival& y) { return x.time_ms < y.time_ms; }));
  }
}

TEST(Simulator, AlwaysDuplicate) {
  std::vector<ChannelSpec> ch(2);
  for (auto& c : ch) c.duplicate_prob = 1.0;
  ch[1].rng_seed = 1;
  const auto sim = simulate_send(demo().envs, ch);
  EXPECT_EQ(sim.arrivals.size(), 8u);
  const auto report = receive(sim, demo().cfg, demo().layout);
  EXPECT_EQ(report.accepted, 4u);
  EXPECT_EQ(report.duplicates, 4u);
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(*report.plaintext, kDemoPlaintext);
}

TEST(Simulator, AlwaysTamperChannelIsRejected) {
  std::vector<ChannelSpec> ch(2);
  ch[1].tamper_prob = 1.0;
  ch[1].rng_seed = 8;
  const auto sim = simulate_send(demo().envs, ch);
  const auto report = receive(sim, demo().cfg, demo().layout);
  EXPECT_FALSE(report.ok());
  // envelopes 1 and 3 travel on channel 1
  EXPECT_EQ(report.rejected, (std::vector<std::string>{kDemoSeqBits[1], kDemoSeqBits[3]}));
  EXPECT_EQ(report.accepted, 2u);
  ASSERT_TRUE(report.error);
  EXPECT_EQ(report.error->code(), Errc::WrongCount);
  for (const auto& a : sim.arrivals) {
    if (a.channel == 1) {
      EXPECT_TRUE(a.tampered);
      EXPECT_NE(a.wire, serialize(demo().envs[0]));
    }
  }
}

TEST(Simulator, DropSurfacesAsWrongCount) {
  std::vector<ChannelSpec> ch(1);
  ch[0].drop_prob = 1.0;
  const auto report = receive(simulate_send(demo().envs, ch), demo().cfg, demo().layout);
  EXPECT_EQ(report.arrivals_considered, 0u);
  ASSERT_TRUE(report.error);
  EXPECT_EQ(report.error->code(), Errc::WrongCount);
}

TEST(Simulator, TimeoutCutsLateArrivals) {
  std::vector<ChannelSpec> ch(2);
  ch[1].delay_min_ms = 1000;
  ch[1].delay_max_ms = 1000;
  const auto sim = simulate_send(demo().envs, ch);
  const auto late = receive(sim, demo().cfg, demo().layout, 500);
  EXPECT_EQ(late.arrivals_considered, 2u);
  EXPECT_EQ(late.error->code(), Errc::WrongCount);
  EXPECT_TRUE(receive(sim, demo().cfg, demo().layout, 2000).ok());
}

TEST(Simulator, InvalidChannels) {
  std::vector<ChannelSpec> none;
  EXPECT_THROW(simulate_send(demo().envs, none), Error);
  std::vector<ChannelSpec> bad(1);
  bad[0].drop_prob = 1.5;
  EXPECT_THROW(simulate_send(demo().envs, bad), Error);
  bad[0] = ChannelSpec{};
  bad[0].delay_min_ms = 10;
  EXPECT_THROW(simulate_send(demo().envs, bad), Error);
}

TEST(Reassembler, ConcurrentOffers) {
  Reassembler buffer(demo().cfg);
  std::vector<std::jthread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&buffer, t] {
      for (int rep = 0; rep < 25; ++rep) {
        const auto& env = demo().envs[(t + rep) % 4];
        buffer.offer(serialize(env));
      }
    });
  }
  threads.clear();
  EXPECT_EQ(buffer.accepted_count(), 4u);
  EXPECT_EQ(buffer.duplicate_count(), 8u * 25u - 4u);
  EXPECT_TRUE(buffer.complete());
  EXPECT_EQ(buffer.decode(demo().layout), kDemoPlaintext);
}

TEST(Reassembler, Outcomes) {
  Reassembler buffer(demo().cfg);
  EXPECT_EQ(buffer.offer(good_wire()), Reassembler::Outcome::accepted);
  EXPECT_EQ(buffer.offer(good_wire()), Reassembler::Outcome::duplicate);
  StegoEnvelope forged = demo().envs[1];
  forged.mac[0] ^= 0x80;
  EXPECT_EQ(buffer.offer(forged), Reassembler::Outcome::rejected_mac);
  EXPECT_EQ(buffer.offer(std::string("garbage")), Reassembler::Outcome::malformed);
  EXPECT_EQ(buffer.rejected().size(), 2u);
  EXPECT_FALSE(buffer.complete());
  try {
    buffer.decode(demo().layout);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::WrongCount);
  }
}

TEST(Loopback, ConcurrentTcpTransfer) {
  ReceiveReport report;
  try {
    report = loopback_transfer(demo().envs, demo().cfg, demo().layout);
  } catch (const Error& e) {
    GTEST_SKIP() << "loopback sockets unavailable: " << e.what();
  }
  if (report.accepted == 0) GTEST_SKIP() << "no loopback connection succeeded";
  ASSERT_TRUE(report.ok()) << report.error->what();
  EXPECT_EQ(*report.plaintext, kDemoPlaintext);
}
