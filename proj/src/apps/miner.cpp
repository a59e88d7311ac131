#include "sessio/apps/miner.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cctype>
#include <stdexcept>
#include <sstream>

#include "sessio/apps/parallel.hpp"
#include "sessio/runtime.hpp"

namespace sessio::apps {

Digest block_hash(const Bytes& header, std::uint32_t nonce) {
  Bytes message(header);
  for (int shift = 0; shift < 32; shift += 8) message.push_back(static_cast<std::uint8_t>(nonce >> shift));
  Digest d;
  if (EVP_Digest(message.data(), message.size(), d.data(), nullptr, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  return d;
}

unsigned leading_zero_bits(const Digest& d) {
  unsigned bits = 0;
  for (auto byte : d) {
    if (byte != 0) return bits + static_cast<unsigned>(std::countl_zero(byte));
    bits += 8;
  }
  return bits;
}

bool meets_difficulty(const Block& b, std::uint32_t nonce) {
  return leading_zero_bits(block_hash(b.header, nonce)) >= b.difficulty;
}

MinerState::MinerState(Block block, std::uint32_t id, std::uint32_t stride)
    : block_(std::move(block)), next_(id), stride_(stride == 0 ? 1 : stride) {}

MinerState::Test MinerState::test_next_nonce() {
  if (next_ > 0xffffffffULL) throw NonceExhausted();
  const auto nonce = static_cast<std::uint32_t>(next_);
  next_ += stride_;
  ++tested_;
  return {meets_difficulty(block_, nonce), nonce};
}

MinerReport run_miner(unsigned threads, const std::vector<Block>& blocks, bool record_tested) {
  if (threads == 0) throw std::invalid_argument("miner needs at least one thread");
  MinerReport report;
  report.tested.resize(record_tested ? threads : 0);
  auto* tested = record_tested ? &report.tested : nullptr;

  std::vector<std::uint32_t> ids(threads);
  for (std::uint32_t i = 0; i < threads; ++i) ids[i] = i;

  auto workers = parallel(miner_protocol, ids, [threads, tested](auto server, std::uint32_t id) {
    auto ch = std::move(server);
    for (bool loop = true; loop;) {
      ch.offer(
          [&](auto start) {
            auto [block, ch2] = start.receive();
            auto [stop_ch, ch3] = ch2.deleg_recv();
            auto [stop, done] = stop_ch.receive_async();
            done.close();
            MinerState miner(std::move(block), id, threads);
            for (;;) {
              const auto t = miner.test_next_nonce();
              if (tested) (*tested)[id].push_back(t.nonce);
              if (t.found) {
                ch = ch3.select_left().send(t.nonce).jump();
                break;
              }
              if (stop.is_completed()) {
                ch = ch3.select_right().jump();
                break;
              }
            }
          },
          [&](auto finish) {
            finish.close();
            loop = false;
          });
    }
  });

  using Head = typename decltype(workers)::value_type;
  using Result = std::pair<Head, std::optional<std::uint32_t>>;

  for (const auto& block : blocks) {
    std::vector<CompletionToken<Result>> answers;
    std::vector<Session<Send<Unit, Eps>, Env<Send<Unit, Eps>>>> stops;
    for (auto& w : workers) {
      auto [rest, stop] = w.select_left().send(block).deleg_new();
      stops.push_back(std::move(stop));
      answers.push_back(rest.offer_async(
          [](auto found) {
            auto [nonce, next] = found.receive();
            return Result(next.jump(), nonce);
          },
          [](auto gave_up) { return Result(gave_up.jump(), std::nullopt); }));
    }
    const auto first = when_any(answers);
    for (auto& s : stops) s.send().close();

    std::vector<Head> next;
    std::optional<std::uint32_t> winner;
    for (std::size_t i = 0; i < answers.size(); ++i) {
      auto [head, nonce] = answers[i].take();
      if (i == first) winner = nonce;
      next.push_back(std::move(head));
    }
    if (!winner) throw ProtocolViolation("first worker to answer reported no nonce");
    report.mined.push_back({block, *winner});
    workers = std::move(next);
  }
  for (auto& w : workers) w.select_right().close();
  return report;
}

std::vector<Block> parse_blocks(const std::string& text, std::uint32_t difficulty) {
  if (difficulty > 32) throw std::invalid_argument("difficulty above 32 bits");
  std::vector<Block> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.empty()) continue;
    out.push_back(Block{detail::from_hex(line), difficulty});
  }
  return out;
}

std::vector<Block> sample_blocks(std::size_t count, std::uint32_t difficulty) {
  std::vector<Block> out;
  for (std::size_t i = 0; i < count; ++i) {
    Bytes header(80);
    for (std::size_t k = 0; k < header.size(); ++k) header[k] = static_cast<std::uint8_t>((k * 31 + i * 17 + 7) & 0xff);
    out.push_back(Block{std::move(header), difficulty});
  }
  return out;
}

}  // namespace sessio::apps
