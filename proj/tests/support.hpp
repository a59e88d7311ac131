#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "sessio/sessio.hpp"

namespace testing_support {

using sessio::DualWitness;
using sessio::PayloadDescriptor;

inline const std::vector<std::string>& tags() {
  static const std::vector<std::string> t = {"unit", "int", "uint", "int3", "bytes", "string", "decimal", "vec2", "bytes?"};
  return t;
}

// Random witness built bottom-up by the value-level combinators, depth <= max_depth.
inline DualWitness random_witness(std::mt19937_64& rng, int max_depth) {
  std::uniform_int_distribution<int> pick(0, max_depth <= 1 ? 1 : 7);
  auto tag = [&] { return PayloadDescriptor{tags()[rng() % tags().size()]}; };
  switch (pick(rng)) {
    case 0: return DualWitness::end();
    case 1: return DualWitness::goto0();
    case 2: return DualWitness::send(tag(), random_witness(rng, max_depth - 1));
    case 3: return DualWitness::recv(tag(), random_witness(rng, max_depth - 1));
    case 4: return DualWitness::select(random_witness(rng, max_depth - 1), random_witness(rng, max_depth - 1));
    case 5: return DualWitness::offer(random_witness(rng, max_depth - 1), random_witness(rng, max_depth - 1));
    case 6: return DualWitness::deleg(random_witness(rng, max_depth - 1), random_witness(rng, max_depth - 1));
    default: return DualWitness::deleg_recv(random_witness(rng, max_depth - 1), random_witness(rng, max_depth - 1));
  }
}

// Dualizes a rendering textually: flips every step marker outside carried
// sessions, leaves carried sessions as they are.
inline std::string dual_rendering(const std::string& r) {
  std::string out;
  std::size_t i = 0;
  auto starts = [&](const char* s) { return r.compare(i, std::char_traits<char>::length(s), s) == 0; };
  auto copy_carried = [&] {
    int depth = 1;
    while (depth > 0) {
      const char c = r.at(i++);
      if (c == '(') ++depth;
      if (c == ')') --depth;
      out += c;
    }
  };
  while (i < r.size()) {
    if (starts("delegrecv(")) {
      out += "deleg(";
      i += 10;
      copy_carried();
    } else if (starts("deleg(")) {
      out += "delegrecv(";
      i += 6;
      copy_carried();
    } else if (r[i] == '!' || r[i] == '?') {
      out += r[i] == '!' ? '?' : '!';
      ++i;
      while (r[i] != '.') out += r[i++];  // tag, which may end in '?'
    } else if (starts("+{")) {
      out += "&{";
      i += 2;
    } else if (starts("&{")) {
      out += "+{";
      i += 2;
    } else {
      out += r[i++];
    }
  }
  return out;
}

template <class Pred>
bool eventually(Pred pred, std::chrono::milliseconds limit = std::chrono::seconds(5)) {
  const auto deadline = std::chrono::steady_clock::now() + limit;
  while (!pred()) {
    if (std::chrono::steady_clock::now() > deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  return true;
}

// Quiets leak warnings for tests that leak on purpose.
struct QuietScope {
  QuietScope() { sessio::diagnostics::set_quiet(true); }
  ~QuietScope() { sessio::diagnostics::set_quiet(false); }
};

}  // namespace testing_support
