#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sessio/codec.hpp"
#include "sessio/error.hpp"
#include "sessio/payload.hpp"
#include "sessio/protocol.hpp"

namespace sessio::apps {

struct Block {
  Bytes header;
  std::uint32_t difficulty = 0;  // required leading zero bits of the digest, at most 32

  friend bool operator==(const Block&, const Block&) = default;
};

}  // namespace sessio::apps

namespace sessio {

template <> struct payload_tag<apps::Block> { static std::string name() { return "block"; } };

template <> struct payload_json<apps::Block> {
  static Json to_json(const apps::Block& b) { return Json{{"header", detail::to_hex(b.header)}, {"difficulty", b.difficulty}}; }
  static apps::Block from_json(const Json& j) {
    if (!j.is_object() || !j.contains("header") || !j.contains("difficulty")) detail::bad_payload("block", j);
    apps::Block b{payload_json<Bytes>::from_json(j.at("header")), payload_json<std::uint32_t>::from_json(j.at("difficulty"))};
    if (b.difficulty > 32) detail::bad_payload("block", j);
    return b;
  }
};

}  // namespace sessio

namespace sessio::apps {

class NonceExhausted : public Error {
 public:
  NonceExhausted() : Error("nonce space exhausted") {}
};

using Digest = std::array<std::uint8_t, 32>;

// SHA-256 of header followed by the nonce in little-endian order.
Digest block_hash(const Bytes& header, std::uint32_t nonce);
unsigned leading_zero_bits(const Digest& d);
bool meets_difficulty(const Block& b, std::uint32_t nonce);

// Worker `id` of `stride` tests nonces id, id + stride, id + 2 * stride, ...
class MinerState {
 public:
  MinerState(Block block, std::uint32_t id, std::uint32_t stride = 1);

  struct Test {
    bool found;
    std::uint32_t nonce;
  };
  Test test_next_nonce();

  const Block& block() const noexcept { return block_; }
  std::uint64_t tested() const noexcept { return tested_; }

 private:
  Block block_;
  std::uint64_t next_;
  std::uint32_t stride_;
  std::uint64_t tested_ = 0;
};

// Client view of one worker session.
inline constexpr auto miner_protocol = [] {
  using namespace combinators;
  return select(send(val<Block>, deleg(recv(val<Unit>, end), offer(recv(val<std::uint32_t>, goto0), goto0))), end);
}();

struct MinedBlock {
  Block block;
  std::uint32_t nonce = 0;
};

struct MinerReport {
  std::vector<MinedBlock> mined;
  // Per worker, every nonce it tested, when recording was requested.
  std::vector<std::vector<std::uint32_t>> tested;
};

MinerReport run_miner(unsigned threads, const std::vector<Block>& blocks, bool record_tested = false);

// One header per line, hex encoded; blank lines are skipped.
std::vector<Block> parse_blocks(const std::string& text, std::uint32_t difficulty);

// Deterministic 80-byte sample headers.
std::vector<Block> sample_blocks(std::size_t count, std::uint32_t difficulty);

}  // namespace sessio::apps
