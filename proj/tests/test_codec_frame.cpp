#include <gtest/gtest.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "sessio/apps/miner.hpp"
#include "sessio/net/frame.hpp"
#include "support.hpp"

using namespace sessio;
using sessio::net::Frame;
using sessio::net::FrameDecoder;
using sessio::net::Tag;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 r(424242);
  return r;
}

Bytes random_bytes(std::size_t max) {
  Bytes b(rng()() % (max + 1));
  for (auto& x : b) x = static_cast<std::uint8_t>(rng()());
  return b;
}

std::string random_string() {
  std::string s(rng()() % 40, ' ');
  for (auto& c : s) c = static_cast<char>(rng()() % 0x5f + 0x20);
  if (rng()() % 4 == 0) s += "\xc3\xa9\xe2\x82\xac";  // non-ASCII UTF-8
  return s;
}

double random_double() {
  switch (rng()() % 4) {
    case 0: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng());
    case 1: return std::ldexp(std::uniform_real_distribution<double>(-1, 1)(rng()), static_cast<int>(rng()() % 600) - 300);
    case 2: return static_cast<double>(static_cast<std::int32_t>(rng()()));
    default: {
      const double edge[] = {0.0, -0.0, std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
                             std::numeric_limits<double>::denorm_min(), 0.1, 1.0 / 3.0};
      return edge[rng()() % 7];
    }
  }
}

template <class V>
void expect_round_trip(const V& v) {
  for (const auto& codec : {Codec::json(), Codec::cbor()}) {
    const auto bytes = encode_payload(v, codec);
    const auto back = decode_payload<V>(bytes, codec);
    ASSERT_TRUE(back == v) << codec.name() << " " << payload_tag<V>::name();
  }
}

template <class Gen>
void property(Gen gen) {
  for (int i = 0; i < 1000; ++i) expect_round_trip(gen());
}

}  // namespace

TEST(Codec, UnitRoundTrip) { property([] { return unit; }); }
TEST(Codec, IntRoundTrip) { property([] { return static_cast<int>(rng()()); }); }
TEST(Codec, UintRoundTrip) { property([] { return static_cast<std::uint32_t>(rng()()); }); }
TEST(Codec, Int3RoundTrip) {
  property([] { return IntTriple{static_cast<int>(rng()()), static_cast<int>(rng()()), static_cast<int>(rng()())}; });
}
TEST(Codec, BytesRoundTrip) { property([] { return random_bytes(256); }); }
TEST(Codec, StringRoundTrip) { property(random_string); }
TEST(Codec, DecimalRoundTrip) {
  property([] {
    const auto mantissa = static_cast<std::int64_t>(rng()() % 1000000000000000000ULL) * (rng()() % 2 ? 1 : -1);
    return Decimal(mantissa, static_cast<std::uint8_t>(rng()() % 10));
  });
}
TEST(Codec, Vector2RoundTrip) { property([] { return Vector2{random_double(), random_double()}; }); }
TEST(Codec, OptionalBytesRoundTrip) {
  property([] { return rng()() % 3 == 0 ? std::optional<Bytes>() : std::optional<Bytes>(random_bytes(64)); });
}
TEST(Codec, BlockRoundTrip) {
  property([] { return apps::Block{random_bytes(80), static_cast<std::uint32_t>(rng()() % 33)}; });
}

TEST(Codec, DocumentedJsonMapping) {
  const auto json = Codec::json();
  auto text = [&](const Bytes& b) { return std::string(b.begin(), b.end()); };
  EXPECT_EQ(text(encode_payload(unit, json)), "null");
  EXPECT_EQ(text(encode_payload(IntTriple{16, 3, 2}, json)), "[16,3,2]");
  EXPECT_EQ(text(encode_payload(Bytes{0x00, 0xab}, json)), "\"00ab\"");
  EXPECT_EQ(text(encode_payload(Decimal::parse("90.00"), json)), "\"90.00\"");
  EXPECT_EQ(text(encode_payload(std::optional<Bytes>(), json)), "null");
  EXPECT_EQ(Decimal::parse("90.00").to_string(), "90.00");
  EXPECT_NE(Decimal::parse("90.00"), Decimal::parse("90.0"));
}

TEST(Codec, RejectsMalformedInput) {
  const auto json = Codec::json();
  auto bytes = [](const char* s) { return Bytes(s, s + std::strlen(s)); };
  EXPECT_THROW(decode_payload<int>(bytes("\"x\""), json), CodecError);
  EXPECT_THROW(decode_payload<int>(bytes("4294967296"), json), CodecError);
  EXPECT_THROW(decode_payload<std::uint32_t>(bytes("-1"), json), CodecError);
  EXPECT_THROW(decode_payload<IntTriple>(bytes("[1,2]"), json), CodecError);
  EXPECT_THROW(decode_payload<Bytes>(bytes("\"abc\""), json), CodecError);
  EXPECT_THROW(decode_payload<Decimal>(bytes("\"9x\""), json), CodecError);
  EXPECT_THROW(decode_payload<int>(bytes("{"), json), CodecError);
  EXPECT_THROW(decode_payload<apps::Block>(bytes("{\"header\":\"00\",\"difficulty\":40}"), json), CodecError);
}

TEST(Frame, EncodesBigEndianLengthAndTag) {
  const auto bytes = net::encode_frame(Frame{Tag::hello, {'a', 'b'}});
  EXPECT_EQ(bytes, (Bytes{0, 0, 0, 3, 0x05, 'a', 'b'}));
  EXPECT_EQ(net::encode_frame(Frame{Tag::close, {}}), (Bytes{0, 0, 0, 1, 0x03}));
}

TEST(Frame, DecoderRoundTripOnRandomChunking) {
  for (int i = 0; i < 1000; ++i) {
    std::vector<Frame> frames;
    Bytes stream;
    const int count = 1 + static_cast<int>(rng()() % 4);
    for (int k = 0; k < count; ++k) {
      frames.push_back(Frame{static_cast<Tag>(rng()() % 6), random_bytes(rng()() % 8 == 0 ? 5000 : 64)});
      const auto enc = net::encode_frame(frames.back());
      stream.insert(stream.end(), enc.begin(), enc.end());
    }
    FrameDecoder dec;
    std::vector<Frame> got;
    std::size_t pos = 0;
    while (pos < stream.size()) {
      const std::size_t chunk = std::min<std::size_t>(stream.size() - pos, 1 + rng()() % 97);
      dec.feed(std::span<const std::uint8_t>(stream.data() + pos, chunk));
      pos += chunk;
      while (auto f = dec.next()) got.push_back(std::move(*f));
    }
    ASSERT_EQ(got, frames);
    ASSERT_EQ(dec.buffered(), 0u);
  }
}

TEST(Frame, LargestBodyOverSocket) {
  int fds[2];
  ASSERT_EQ(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds), 0);
  const Frame big{Tag::value, random_bytes(0)};
  Frame f{Tag::value, Bytes((1u << 20) - 1)};
  for (auto& b : f.payload) b = static_cast<std::uint8_t>(rng()());
  auto writer = async_task([&] {
    net::write_frame(fds[0], f);
    net::write_frame(fds[0], big);
    ::shutdown(fds[0], SHUT_WR);
  });
  EXPECT_EQ(net::read_frame(fds[1]), f);
  EXPECT_EQ(net::read_frame(fds[1]), big);
  EXPECT_EQ(net::read_frame(fds[1]), std::nullopt);
  writer.wait();
  ::close(fds[0]);
  ::close(fds[1]);
}

TEST(Frame, RejectsBadInput) {
  FrameDecoder unknown;
  const Bytes bad_tag{0, 0, 0, 1, 0x09};
  unknown.feed(bad_tag);
  EXPECT_THROW(unknown.next(), FrameError);
  FrameDecoder empty;
  const Bytes zero{0, 0, 0, 0};
  empty.feed(zero);
  EXPECT_THROW(empty.next(), FrameError);

  int fds[2];
  ASSERT_EQ(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds), 0);
  const Bytes truncated{0, 0, 0, 9, 0x00, 1, 2};
  net::detail::write_all(fds[0], truncated);
  ::shutdown(fds[0], SHUT_WR);
  EXPECT_THROW(net::read_frame(fds[1]), FrameError);
  ::close(fds[0]);
  ::close(fds[1]);
}
