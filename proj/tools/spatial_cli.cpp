#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spatial/commands.hpp"

namespace fs = std::filesystem;
using namespace spatial::cli;

int main(int argc, char** argv) {
  CLI::App app{"spatial: hide ciphered messages in alignment-variable positions of carrier genes"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string session;
  app.add_option("--seed", seed, "RNG seed (filler, tear plan, key generation)");
  app.add_option("--session", session, "session file");

  // keygen
  auto* keygen = app.add_subcommand("keygen", "write a fresh session file");
  std::string keygen_out;
  std::size_t n_packets = 0;
  std::size_t total_bits = 0;
  std::string carriers;
  keygen->add_option("--out,-o", keygen_out, "session file to write")->required();
  keygen->add_option("--n-packets,-n", n_packets, "packet count N (>= 2)")->required();
  keygen->add_option("--total-bits,-b", total_bits, "message size in bits")->required();
  keygen->add_option("--carriers,-c", carriers, "FASTA with 2-3 carrier sequences")->required();

  // encode
  auto* encode = app.add_subcommand("encode", "encode a plaintext file into envelope files");
  std::string plaintext;
  std::string out_dir;
  std::optional<std::string> plan;
  encode->add_option("--plaintext,-p", plaintext)->required();
  encode->add_option("--out-dir,-o", out_dir)->required();
  encode->add_option("--plan", plan, "tear plan, e.g. \"(23,(8,(9,32)))\"");

  // decode
  auto* decode = app.add_subcommand("decode", "recover the plaintext from envelope files");
  std::vector<std::string> envelope_files;
  std::optional<std::string> decode_out;
  decode->add_option("envelopes", envelope_files)->required();
  decode->add_option("--out,-o", decode_out, "write plaintext here instead of stdout");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "encode, send over simulated channels, decode");
  std::string channels;
  simulate->add_option("--plaintext,-p", plaintext)->required();
  simulate->add_option("--channels", channels, "channel configuration file")->required();

  // inspect
  auto* inspect = app.add_subcommand("inspect", "dump one envelope");
  std::string envelope;
  inspect->add_option("envelope", envelope)->required();

  for (auto* sub : {keygen, encode, decode, simulate, inspect}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  auto need_session = [&]() -> bool {
    if (session.empty()) {
      std::cerr << "--session is required\n";
      return false;
    }
    return true;
  };

  if (keygen->parsed()) {
    return cmd_keygen(keygen_out, n_packets, total_bits, carriers, seed, std::cout, std::cerr);
  }
  if (!need_session()) return kExitConfig;
  if (encode->parsed()) {
    return cmd_encode(session, plaintext, out_dir, seed.value_or(0), plan, std::cout, std::cerr);
  }
  if (decode->parsed()) {
    std::vector<fs::path> paths(envelope_files.begin(), envelope_files.end());
    std::optional<fs::path> out;
    if (decode_out) out = *decode_out;
    return cmd_decode(session, paths, out, std::cout, std::cerr);
  }
  if (simulate->parsed()) {
    return cmd_simulate(session, plaintext, channels, seed.value_or(0), std::cout, std::cerr);
  }
  return cmd_inspect(session, envelope, std::cout, std::cerr);
}
