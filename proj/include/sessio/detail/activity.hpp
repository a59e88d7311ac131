#pragma once

#include <chrono>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <system_error>
#include <thread>
#include <utility>

#include "sessio/diagnostics.hpp"
#include "sessio/error.hpp"

namespace sessio {

namespace detail {

// Tracks detached threads spawned for session bodies and transport readers.
class ActivityTable {
 public:
  static ActivityTable& instance() {
    static ActivityTable* table = new ActivityTable();
    return *table;
  }

  void enter() {
    std::lock_guard lock(mu_);
    ++running_;
  }
  void leave() {
    std::lock_guard lock(mu_);
    if (--running_ == 0) idle_.notify_all();
  }
  bool wait_idle(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    return idle_.wait_for(lock, timeout, [&] { return running_ == 0; });
  }
  std::size_t running() {
    std::lock_guard lock(mu_);
    return running_;
  }

 private:
  std::mutex mu_;
  std::condition_variable idle_;
  std::size_t running_ = 0;
};

// Gives running activities a grace period at process exit and reports
// receptions that never completed.
struct ExitGuard {
  ~ExitGuard() {
    if (!ActivityTable::instance().wait_idle(std::chrono::seconds(2))) {
      diagnostics::warn(std::to_string(ActivityTable::instance().running()) +
                        " session activities still running at exit");
    }
    if (const auto pending = diagnostics::pending_receptions(); pending > 0) {
      diagnostics::warn(std::to_string(pending) + " delayed receptions never completed");
    }
  }
};
inline ExitGuard exit_guard;

template <class F>
void spawn(F&& fn) {
  auto& table = ActivityTable::instance();
  table.enter();
  try {
    std::thread([fn = std::forward<F>(fn)]() mutable {
      try {
        fn();
      } catch (const std::exception& e) {
        diagnostics::warn(std::string("activity terminated by exception: ") + e.what());
      } catch (...) {
        diagnostics::warn("activity terminated by unknown exception");
      }
      ActivityTable::instance().leave();
    }).detach();
  } catch (const std::system_error& e) {
    table.leave();
    throw SpawnError(std::string("cannot start session activity: ") + e.what());
  }
}

}  // namespace detail

// Blocks until every spawned session activity has finished, or the timeout
// elapses. Returns true when idle.
inline bool wait_idle(std::chrono::milliseconds timeout = std::chrono::seconds(30)) {
  return detail::ActivityTable::instance().wait_idle(timeout);
}

}  // namespace sessio
