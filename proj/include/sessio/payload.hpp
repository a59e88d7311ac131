#pragma once

#include <charconv>
#include <concepts>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "sessio/error.hpp"

namespace sessio {

struct Unit {
  friend constexpr bool operator==(Unit, Unit) noexcept { return true; }
};
inline constexpr Unit unit{};

using Bytes = std::vector<std::uint8_t>;
using IntTriple = std::tuple<int, int, int>;

struct Vector2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vector2&, const Vector2&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Vector2& v) {
    return os << '(' << v.x << ", " << v.y << ')';
  }
};

// Exact base-10 amount: mantissa * 10^-scale. "90.00" keeps its two places.
class Decimal {
 public:
  constexpr Decimal() = default;
  constexpr Decimal(std::int64_t mantissa, std::uint8_t scale) : mantissa_(mantissa), scale_(scale) {}

  static Decimal parse(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    const auto dot = body.find('.');
    std::string digits(body.substr(0, dot));
    std::uint8_t scale = 0;
    if (dot != std::string_view::npos) {
      const auto frac = body.substr(dot + 1);
      digits.append(frac);
      scale = static_cast<std::uint8_t>(frac.size());
    }
    if (digits.empty() || digits.size() > 18 || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw CodecError("malformed decimal: '" + std::string(text) + "'");
    }
    std::int64_t mantissa = 0;
    std::from_chars(digits.data(), digits.data() + digits.size(), mantissa);
    return Decimal(negative ? -mantissa : mantissa, scale);
  }

  std::string to_string() const {
    const bool negative = mantissa_ < 0;
    std::string digits = std::to_string(negative ? -mantissa_ : mantissa_);
    if (scale_ > 0) {
      if (digits.size() <= scale_) digits.insert(0, scale_ - digits.size() + 1, '0');
      digits.insert(digits.size() - scale_, 1, '.');
    }
    return negative ? "-" + digits : digits;
  }

  constexpr std::int64_t mantissa() const noexcept { return mantissa_; }
  constexpr std::uint8_t scale() const noexcept { return scale_; }

  friend bool operator==(const Decimal&, const Decimal&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Decimal& d) { return os << d.to_string(); }

 private:
  std::int64_t mantissa_ = 0;
  std::uint8_t scale_ = 0;
};

// Value-level identifier of a payload domain; the `V` of Send<V,S>.
struct PayloadDescriptor {
  std::string tag;

  friend bool operator==(const PayloadDescriptor&, const PayloadDescriptor&) = default;
};

// Specialize with `static std::string name()` to make a type sendable.
template <class V>
struct payload_tag;

template <> struct payload_tag<Unit> { static std::string name() { return "unit"; } };
template <> struct payload_tag<int> { static std::string name() { return "int"; } };
template <> struct payload_tag<std::uint32_t> { static std::string name() { return "uint"; } };
template <> struct payload_tag<IntTriple> { static std::string name() { return "int3"; } };
template <> struct payload_tag<Bytes> { static std::string name() { return "bytes"; } };
template <> struct payload_tag<std::string> { static std::string name() { return "string"; } };
template <> struct payload_tag<Decimal> { static std::string name() { return "decimal"; } };
template <> struct payload_tag<Vector2> { static std::string name() { return "vec2"; } };

// Nullable variant of any domain, e.g. "bytes?".
template <class V>
struct payload_tag<std::optional<V>> {
  static std::string name() { return payload_tag<V>::name() + "?"; }
};

template <class V>
concept Payload = std::movable<V> && std::copy_constructible<V> && std::equality_comparable<V> && requires {
  { payload_tag<V>::name() } -> std::convertible_to<std::string>;
};

template <Payload V>
PayloadDescriptor payload_of() {
  return PayloadDescriptor{payload_tag<V>::name()};
}

}  // namespace sessio
