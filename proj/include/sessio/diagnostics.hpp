#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <iostream>
#include <mutex>
#include <string>

namespace sessio::diagnostics {

namespace detail {

struct Counters {
  std::atomic<std::uint64_t> leaks{0};
  std::atomic<std::int64_t> live_ports{0};
  std::atomic<std::int64_t> pending_receptions{0};
  std::atomic<bool> quiet{false};
};

// Never destroyed: threads still running at exit may touch it.
inline Counters& counters() {
  static Counters* c = new Counters();
  return *c;
}

}  // namespace detail

// Endpoints disposed without being used to the end of their protocol step.
inline std::uint64_t leak_count() { return detail::counters().leaks.load(); }
// Transport sides currently alive (in-memory and TCP).
inline std::int64_t live_ports() { return detail::counters().live_ports.load(); }
// Delayed receptions that have not completed yet.
inline std::int64_t pending_receptions() { return detail::counters().pending_receptions.load(); }

// Suppresses warning output (leaks, failed activities). Counters still run.
inline void set_quiet(bool quiet) { detail::counters().quiet = quiet; }

inline void warn(const std::string& message) {
  if (!detail::counters().quiet) std::clog << "sessio: " << message << '\n';
}

}  // namespace sessio::diagnostics
