#pragma once

// Wire framing for the TCP transport.
//
//   +----------------+-----+-----------------+
//   | length (u32 BE)| tag | payload ...     |
//   +----------------+-----+-----------------+
//
// `length` counts the body, i.e. the tag byte plus the payload.

#include <sys/socket.h>
#include <sys/types.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>

#include "sessio/error.hpp"
#include "sessio/payload.hpp"

namespace sessio::net {

enum class Tag : std::uint8_t {
  value = 0x00,
  label_left = 0x01,
  label_right = 0x02,
  close = 0x03,
  cancel = 0x04,
  hello = 0x05,
};

inline constexpr std::size_t max_frame_body = std::size_t{16} << 20;

struct Frame {
  Tag tag = Tag::value;
  Bytes payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline bool valid_tag(std::uint8_t t) { return t <= static_cast<std::uint8_t>(Tag::hello); }

inline Bytes encode_frame(const Frame& f) {
  const std::size_t body = f.payload.size() + 1;
  if (body > max_frame_body) throw FrameError("frame body of " + std::to_string(body) + " bytes is too large");
  Bytes out;
  out.reserve(body + 4);
  const auto n = static_cast<std::uint32_t>(body);
  out.push_back(static_cast<std::uint8_t>(n >> 24));
  out.push_back(static_cast<std::uint8_t>(n >> 16));
  out.push_back(static_cast<std::uint8_t>(n >> 8));
  out.push_back(static_cast<std::uint8_t>(n));
  out.push_back(static_cast<std::uint8_t>(f.tag));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

// Incremental decoder for a byte stream.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes) { buffer_.insert(buffer_.end(), bytes.begin(), bytes.end()); }

  std::optional<Frame> next() {
    if (buffer_.size() - offset_ < 4) return std::nullopt;
    const auto* p = buffer_.data() + offset_;
    const std::uint32_t n = std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[2]} << 8 | p[3];
    if (n == 0) throw FrameError("empty frame body");
    if (n > max_frame_body) throw FrameError("frame length " + std::to_string(n) + " exceeds limit");
    if (buffer_.size() - offset_ < 4 + std::size_t{n}) return std::nullopt;
    if (!valid_tag(p[4])) throw FrameError("unknown frame tag " + std::to_string(p[4]));
    Frame f{static_cast<Tag>(p[4]), Bytes(p + 5, p + 4 + n)};
    offset_ += 4 + n;
    if (offset_ == buffer_.size()) {
      buffer_.clear();
      offset_ = 0;
    }
    return f;
  }

  std::size_t buffered() const noexcept { return buffer_.size() - offset_; }

 private:
  Bytes buffer_;
  std::size_t offset_ = 0;
};

namespace detail {

inline void write_all(int fd, std::span<const std::uint8_t> bytes) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto n = ::send(fd, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw FrameError(std::string("write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

// False on end of stream before the first byte.
inline bool read_exact(int fd, std::uint8_t* out, std::size_t size) {
  std::size_t done = 0;
  while (done < size) {
    const auto n = ::recv(fd, out + done, size - done, 0);
    if (n == 0) {
      if (done == 0) return false;
      throw FrameError("stream ended inside a frame");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw FrameError(std::string("read failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace detail

inline void write_frame(int fd, const Frame& f) { detail::write_all(fd, encode_frame(f)); }

// nullopt on a clean end of stream at a frame boundary.
inline std::optional<Frame> read_frame(int fd) {
  std::uint8_t header[4];
  if (!detail::read_exact(fd, header, 4)) return std::nullopt;
  const std::uint32_t n =
      std::uint32_t{header[0]} << 24 | std::uint32_t{header[1]} << 16 | std::uint32_t{header[2]} << 8 | header[3];
  if (n == 0) throw FrameError("empty frame body");
  if (n > max_frame_body) throw FrameError("frame length " + std::to_string(n) + " exceeds limit");
  Bytes body(n);
  if (!detail::read_exact(fd, body.data(), n)) throw FrameError("stream ended inside a frame");
  if (!valid_tag(body[0])) throw FrameError("unknown frame tag " + std::to_string(body[0]));
  return Frame{static_cast<Tag>(body[0]), Bytes(body.begin() + 1, body.end())};
}

}  // namespace sessio::net
