#pragma once

#include <atomic>
#include <condition_variable>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "sessio/detail/activity.hpp"
#include "sessio/payload.hpp"

namespace sessio {

namespace detail {

class CompletionState {
 public:
  bool is_completed() const noexcept { return done_.load(std::memory_order_acquire); }

  void wait() const {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return done_.load(std::memory_order_relaxed); });
  }

  // Runs `cb` once completed; immediately if already so.
  void on_complete(std::function<void()> cb) {
    {
      std::lock_guard lock(mu_);
      if (!done_.load(std::memory_order_relaxed)) {
        callbacks_.push_back(std::move(cb));
        return;
      }
    }
    cb();
  }

 protected:
  template <class Store>
  bool complete(Store&& store) {
    std::vector<std::function<void()>> callbacks;
    {
      std::lock_guard lock(mu_);
      if (done_.load(std::memory_order_relaxed)) return false;
      store();
      done_.store(true, std::memory_order_release);
      callbacks.swap(callbacks_);
    }
    cv_.notify_all();
    for (auto& cb : callbacks) cb();
    return true;
  }

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;

 private:
  std::atomic<bool> done_{false};
  std::vector<std::function<void()>> callbacks_;
};

template <class T>
class TokenState : public CompletionState {
 public:
  bool set_value(T v) {
    return complete([&] { value_.emplace(std::move(v)); });
  }
  bool set_error(std::exception_ptr e) {
    return complete([&] { error_ = std::move(e); });
  }

  T& value() {
    wait();
    if (error_) std::rethrow_exception(error_);
    return *value_;
  }
  bool has_error() const {
    std::lock_guard lock(mu_);
    return error_ != nullptr;
  }

 private:
  std::optional<T> value_;
  std::exception_ptr error_;
};

}  // namespace detail

// Handle on a value that arrives later: a delayed reception or an
// asynchronous task. Completes exactly once, with a value or an error.
template <class T>
class CompletionToken {
 public:
  CompletionToken() = default;

  bool valid() const noexcept { return state_ != nullptr; }

  // Non-blocking.
  bool is_completed() const noexcept { return state_ && state_->is_completed(); }

  // Blocks until completion; rethrows the error if the token failed.
  const T& wait() const { return checked().value(); }

  // Blocks, then moves the value out. The token is empty afterwards.
  T take() {
    auto state = std::move(state_);
    if (!state) throw std::logic_error("completion token is empty");
    return std::move(state->value());
  }

  bool failed() const { return is_completed() && state_->has_error(); }

  void on_complete(std::function<void()> cb) const { checked().on_complete(std::move(cb)); }

 private:
  template <class>
  friend class CompletionSource;

  explicit CompletionToken(std::shared_ptr<detail::TokenState<T>> s) : state_(std::move(s)) {}

  detail::TokenState<T>& checked() const {
    if (!state_) throw std::logic_error("completion token is empty");
    return *state_;
  }

  std::shared_ptr<detail::TokenState<T>> state_;
};

template <class T>
class CompletionSource {
 public:
  CompletionSource() : state_(std::make_shared<detail::TokenState<T>>()) {}

  CompletionToken<T> token() const { return CompletionToken<T>(state_); }
  bool set_value(T v) const { return state_->set_value(std::move(v)); }
  bool set_error(std::exception_ptr e) const { return state_->set_error(std::move(e)); }

 private:
  std::shared_ptr<detail::TokenState<T>> state_;
};

// Index of the first token found completed; blocks until one is.
template <class T>
std::size_t when_any(std::span<const CompletionToken<T>> tokens) {
  if (tokens.empty()) throw std::invalid_argument("when_any over no tokens");
  struct Shared {
    std::mutex mu;
    std::condition_variable cv;
    bool fired = false;
  };
  auto shared = std::make_shared<Shared>();
  for (const auto& t : tokens) {
    t.on_complete([shared] {
      {
        std::lock_guard lock(shared->mu);
        shared->fired = true;
      }
      shared->cv.notify_all();
    });
  }
  for (;;) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].is_completed()) return i;
    }
    std::unique_lock lock(shared->mu);
    shared->cv.wait(lock, [&] { return shared->fired; });
    shared->fired = false;
  }
}

template <class T>
std::size_t when_any(const std::vector<CompletionToken<T>>& tokens) {
  return when_any(std::span<const CompletionToken<T>>(tokens));
}

// Runs `fn` on a new activity; the token completes with its result.
template <class F>
auto async_task(F&& fn) {
  using R = std::invoke_result_t<std::decay_t<F>&>;
  using V = std::conditional_t<std::is_void_v<R>, Unit, R>;
  CompletionSource<V> source;
  auto token = source.token();
  detail::spawn([source, fn = std::forward<F>(fn)]() mutable {
    try {
      if constexpr (std::is_void_v<R>) {
        fn();
        source.set_value(Unit{});
      } else {
        source.set_value(fn());
      }
    } catch (...) {
      source.set_error(std::current_exception());
    }
  });
  return token;
}

}  // namespace sessio
