#pragma once

// Payload codecs for serializing transports.
//
// Every payload domain maps to a JSON value, and a Codec turns that JSON
// value into bytes. The mapping:
//
//   unit     null
//   int      number (32-bit signed)
//   uint     number (32-bit unsigned)
//   int3     [a, b, c]
//   bytes    lowercase hex string
//   string   string
//   decimal  string, e.g. "90.00" (exact, scale preserved)
//   vec2     [x, y]  (finite doubles, shortest round-trip form)
//   T?       null or the mapping of T
//
// Codec::json() writes compact JSON text; Codec::cbor() writes CBOR.
// Add a domain by specializing payload_json<V> next to payload_tag<V>.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "sessio/error.hpp"
#include "sessio/payload.hpp"

namespace sessio {

using Json = nlohmann::json;

template <class V>
struct payload_json;

template <class V>
concept JsonPayload = Payload<V> && requires(const V& v, const Json& j) {
  { payload_json<V>::to_json(v) } -> std::convertible_to<Json>;
  { payload_json<V>::from_json(j) } -> std::convertible_to<V>;
};

namespace detail {

[[noreturn]] inline void bad_payload(const std::string& tag, const Json& j) {
  throw CodecError("cannot decode " + tag + " from " + j.dump());
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 0x0f];
  }
  return out;
}

inline Bytes from_hex(std::string_view hex) {
  auto nibble = [&](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw CodecError("bad hex digit");
  };
  if (hex.size() % 2 != 0) throw CodecError("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return out;
}

template <class I>
I integer_from(const Json& j, const char* tag) {
  if (j.is_number_unsigned()) {
    const auto v = j.get<std::uint64_t>();
    if (v <= static_cast<std::uint64_t>(std::numeric_limits<I>::max())) return static_cast<I>(v);
  } else if (j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v >= static_cast<std::int64_t>(std::numeric_limits<I>::min()) &&
        v <= static_cast<std::int64_t>(std::numeric_limits<I>::max())) {
      return static_cast<I>(v);
    }
  }
  bad_payload(tag, j);
}

inline double finite_from(const Json& j) {
  if (!j.is_number()) bad_payload("vec2", j);
  const double d = j.get<double>();
  if (!std::isfinite(d)) bad_payload("vec2", j);
  return d;
}

}  // namespace detail

template <> struct payload_json<Unit> {
  static Json to_json(Unit) { return nullptr; }
  static Unit from_json(const Json& j) {
    if (!j.is_null()) detail::bad_payload("unit", j);
    return {};
  }
};
template <> struct payload_json<int> {
  static Json to_json(int v) { return v; }
  static int from_json(const Json& j) { return detail::integer_from<int>(j, "int"); }
};
template <> struct payload_json<std::uint32_t> {
  static Json to_json(std::uint32_t v) { return v; }
  static std::uint32_t from_json(const Json& j) { return detail::integer_from<std::uint32_t>(j, "uint"); }
};
template <> struct payload_json<IntTriple> {
  static Json to_json(const IntTriple& v) { return Json::array({std::get<0>(v), std::get<1>(v), std::get<2>(v)}); }
  static IntTriple from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) detail::bad_payload("int3", j);
    return {detail::integer_from<int>(j[0], "int3"), detail::integer_from<int>(j[1], "int3"),
            detail::integer_from<int>(j[2], "int3")};
  }
};
template <> struct payload_json<Bytes> {
  static Json to_json(const Bytes& v) { return detail::to_hex(v); }
  static Bytes from_json(const Json& j) {
    if (!j.is_string()) detail::bad_payload("bytes", j);
    return detail::from_hex(j.get_ref<const std::string&>());
  }
};
template <> struct payload_json<std::string> {
  static Json to_json(const std::string& v) { return v; }
  static std::string from_json(const Json& j) {
    if (!j.is_string()) detail::bad_payload("string", j);
    return j.get<std::string>();
  }
};
template <> struct payload_json<Decimal> {
  static Json to_json(const Decimal& v) { return v.to_string(); }
  static Decimal from_json(const Json& j) {
    if (!j.is_string()) detail::bad_payload("decimal", j);
    return Decimal::parse(j.get_ref<const std::string&>());
  }
};
template <> struct payload_json<Vector2> {
  static Json to_json(const Vector2& v) { return Json::array({v.x, v.y}); }
  static Vector2 from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) detail::bad_payload("vec2", j);
    return {detail::finite_from(j[0]), detail::finite_from(j[1])};
  }
};
template <class V>
struct payload_json<std::optional<V>> {
  static Json to_json(const std::optional<V>& v) { return v ? payload_json<V>::to_json(*v) : Json(nullptr); }
  static std::optional<V> from_json(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return payload_json<V>::from_json(j);
  }
};

class Codec {
 public:
  using Encoder = std::function<Bytes(const Json&)>;
  using Decoder = std::function<Json(std::span<const std::uint8_t>)>;

  Codec(std::string name, Encoder encode, Decoder decode)
      : name_(std::move(name)), encode_(std::move(encode)), decode_(std::move(decode)) {}

  static Codec json() {
    return Codec(
        "json",
        [](const Json& j) {
          const auto text = j.dump();
          return Bytes(text.begin(), text.end());
        },
        [](std::span<const std::uint8_t> bytes) { return Json::parse(bytes.begin(), bytes.end()); });
  }

  static Codec cbor() {
    return Codec(
        "cbor", [](const Json& j) { return Json::to_cbor(j); },
        [](std::span<const std::uint8_t> bytes) { return Json::from_cbor(bytes.begin(), bytes.end()); });
  }

  const std::string& name() const noexcept { return name_; }

  Bytes encode(const Json& j) const { return encode_(j); }
  Json decode(std::span<const std::uint8_t> bytes) const {
    try {
      return decode_(bytes);
    } catch (const Json::exception& e) {
      throw CodecError(name_ + " decode failed: " + e.what());
    }
  }

 private:
  std::string name_;
  Encoder encode_;
  Decoder decode_;
};

template <JsonPayload V>
Bytes encode_payload(const V& v, const Codec& codec) {
  return codec.encode(payload_json<V>::to_json(v));
}

template <JsonPayload V>
V decode_payload(std::span<const std::uint8_t> bytes, const Codec& codec) {
  try {
    return payload_json<V>::from_json(codec.decode(bytes));
  } catch (const Json::exception& e) {
    throw CodecError("cannot decode " + payload_tag<V>::name() + ": " + e.what());
  }
}

}  // namespace sessio
