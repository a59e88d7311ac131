#pragma once

// Session fidelity tracing.
//
// When tracing is enabled, every transport side created afterwards gets a
// TraceLog holding its starting shape, its environment and the sequence of
// operations performed through it. Events serialize one per line as
//
//   dir,variant,domain
//
// where dir is `out` or `in`, variant is one of value|left|right|deleg|close
// and domain is the payload tag for `value` events (empty otherwise).
// check_trace() runs a log against the automaton induced by its shape.

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sessio/shape.hpp"

namespace sessio {

enum class Direction : std::uint8_t { out, in };
enum class Variant : std::uint8_t { value, left, right, deleg, close };

struct TraceEvent {
  Direction dir;
  Variant variant;
  std::string domain;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

inline std::string to_csv(const TraceEvent& e) {
  static constexpr const char* variants[] = {"value", "left", "right", "deleg", "close"};
  std::string line = e.dir == Direction::out ? "out," : "in,";
  line += variants[static_cast<int>(e.variant)];
  line += ',';
  line += e.domain;
  return line;
}

inline std::string to_csv(std::span<const TraceEvent> events) {
  std::string out;
  for (const auto& e : events) {
    out += to_csv(e);
    out += '\n';
  }
  return out;
}

inline TraceEvent parse_trace_line(std::string_view line) {
  const auto c1 = line.find(',');
  const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
  if (c2 == std::string_view::npos) throw std::invalid_argument("trace line needs three fields");
  const auto dir = line.substr(0, c1);
  const auto var = line.substr(c1 + 1, c2 - c1 - 1);
  TraceEvent e{};
  if (dir == "out") e.dir = Direction::out;
  else if (dir == "in") e.dir = Direction::in;
  else throw std::invalid_argument("bad trace direction: " + std::string(dir));
  if (var == "value") e.variant = Variant::value;
  else if (var == "left") e.variant = Variant::left;
  else if (var == "right") e.variant = Variant::right;
  else if (var == "deleg") e.variant = Variant::deleg;
  else if (var == "close") e.variant = Variant::close;
  else throw std::invalid_argument("bad trace variant: " + std::string(var));
  e.domain = std::string(line.substr(c2 + 1));
  return e;
}

inline std::vector<TraceEvent> parse_trace(std::string_view text) {
  std::vector<TraceEvent> out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    if (!line.empty()) out.push_back(parse_trace_line(line));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

class TraceLog {
 public:
  TraceLog(std::uint64_t session, std::string side, Shape start, std::vector<Shape> env)
      : session_(session), side_(std::move(side)), start_(std::move(start)), env_(std::move(env)) {}

  void append(TraceEvent e) {
    std::lock_guard lock(mu_);
    events_.push_back(std::move(e));
  }
  std::vector<TraceEvent> events() const {
    std::lock_guard lock(mu_);
    return events_;
  }

  std::uint64_t session() const noexcept { return session_; }
  const std::string& side() const noexcept { return side_; }
  const Shape& start() const noexcept { return start_; }
  const std::vector<Shape>& env() const noexcept { return env_; }

 private:
  std::uint64_t session_;
  std::string side_;
  Shape start_;
  std::vector<Shape> env_;
  mutable std::mutex mu_;
  std::vector<TraceEvent> events_;
};

// Process-wide collection of logs for transports created while enabled.
class TraceRegistry {
 public:
  static TraceRegistry& global() {
    static TraceRegistry* r = new TraceRegistry();
    return *r;
  }

  void enable(bool on = true) { enabled_ = on; }
  bool enabled() const noexcept { return enabled_; }

  std::shared_ptr<TraceLog> open(std::uint64_t session, std::string side, Shape start, std::vector<Shape> env) {
    if (!enabled_) return nullptr;
    auto log = std::make_shared<TraceLog>(session, std::move(side), std::move(start), std::move(env));
    std::lock_guard lock(mu_);
    logs_.push_back(log);
    return log;
  }

  std::vector<std::shared_ptr<TraceLog>> logs() const {
    std::lock_guard lock(mu_);
    return logs_;
  }
  void clear() {
    std::lock_guard lock(mu_);
    logs_.clear();
  }

 private:
  std::atomic<bool> enabled_{false};
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<TraceLog>> logs_;
};

// Enables tracing for the current scope and restores the previous setting.
class TraceScope {
 public:
  TraceScope() : previous_(TraceRegistry::global().enabled()) {
    TraceRegistry::global().clear();
    TraceRegistry::global().enable(true);
  }
  ~TraceScope() { TraceRegistry::global().enable(previous_); }
  TraceScope(const TraceScope&) = delete;
  TraceScope& operator=(const TraceScope&) = delete;

  std::vector<std::shared_ptr<TraceLog>> logs() const { return TraceRegistry::global().logs(); }

 private:
  bool previous_;
};

struct TraceVerdict {
  bool accepted = false;
  std::size_t consumed = 0;  // events matched before the verdict
  std::string reason;

  explicit operator bool() const noexcept { return accepted; }
};

// Walks `events` through the automaton of `start` (goto<0> jumps to env[0]
// when the env has one slot; goto<i> to env[i-1]). Accepts when every event
// matches and the walk ends at a close.
inline TraceVerdict check_trace(const Shape& start, std::span<const Shape> env, std::span<const TraceEvent> events) {
  using K = Shape::Kind;
  TraceVerdict v;
  Shape at = start;
  bool closed = false;
  auto fail = [&](std::string why) {
    v.accepted = false;
    v.reason = "event " + std::to_string(v.consumed) + ": " + std::move(why);
    return v;
  };
  for (const auto& e : events) {
    // Resolve jumps; each jump must land on a slot, and a chain of more
    // jumps than slots cannot make progress.
    std::size_t hops = 0;
    while (at.kind() == K::jump) {
      const auto i = at.index();
      std::size_t slot;
      if (i == 0 && env.size() == 1) slot = 0;
      else if (i >= 1 && i <= env.size()) slot = i - 1;
      else return fail("goto<" + std::to_string(i) + "> outside environment");
      at = env[slot];
      if (++hops > env.size()) return fail("jump cycle without communication");
    }
    if (closed) return fail("event after close: " + to_csv(e));
    const bool out = e.dir == Direction::out;
    switch (at.kind()) {
      case K::send:
      case K::recv:
        if (e.variant != Variant::value || out != (at.kind() == K::send) || e.domain != at.payload().tag) {
          return fail("expected " + std::string(at.kind() == K::send ? "out" : "in") + ",value," +
                      at.payload().tag + " got " + to_csv(e));
        }
        at = at.cont();
        break;
      case K::select:
      case K::offer:
        if (out != (at.kind() == K::select) || (e.variant != Variant::left && e.variant != Variant::right)) {
          return fail("expected a label got " + to_csv(e));
        }
        at = e.variant == Variant::left ? at.left() : at.right();
        break;
      case K::deleg:
      case K::deleg_recv:
        if (e.variant != Variant::deleg || out != (at.kind() == K::deleg)) {
          return fail("expected a delegation got " + to_csv(e));
        }
        at = at.cont();
        break;
      case K::end:
        if (e.variant != Variant::close || !out) return fail("expected close got " + to_csv(e));
        closed = true;
        break;
      case K::jump: break;
    }
    ++v.consumed;
  }
  if (!closed) {
    v.accepted = false;
    v.reason = "trace ends before close at " + render(at);
    return v;
  }
  v.accepted = true;
  return v;
}

inline TraceVerdict check_trace(const TraceLog& log) {
  const auto events = log.events();
  return check_trace(log.start(), log.env(), events);
}

}  // namespace sessio
