#pragma once

#include <any>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sessio/codec.hpp"
#include "sessio/diagnostics.hpp"
#include "sessio/error.hpp"
#include "sessio/shape.hpp"
#include "sessio/trace.hpp"

namespace sessio::detail {

class Port;

inline std::uint64_t next_session_id() {
  static std::atomic<std::uint64_t> next{1};
  return next.fetch_add(1);
}

inline std::uint64_t next_endpoint_id() {
  static std::atomic<std::uint64_t> next{1};
  return next.fetch_add(1);
}

struct Message {
  enum class Kind : std::uint8_t { value, left, right, transfer };

  Kind kind = Kind::value;
  // In-process values travel boxed; serializing transports call `encode`.
  std::any boxed;
  Bytes (*encode)(const std::any&, const Codec&) = nullptr;
  // Values that arrived from the wire, still encoded.
  std::optional<Bytes> wire;
  // Endpoint transfer.
  std::shared_ptr<Port> carried;
  std::optional<Shape> carried_shape;

  static Message label(bool left) {
    Message m;
    m.kind = left ? Kind::left : Kind::right;
    return m;
  }
};

// Inbound half of one transport direction: FIFO queue plus the delayed
// receptions waiting on it. A delayed reception always claims the next
// message ahead of any blocking take().
class Mailbox {
 public:
  using Fulfill = std::function<void(Message)>;
  using Fail = std::function<void(std::exception_ptr)>;

  void deliver(Message m) {
    Pending claimed;
    std::function<void()> drained;
    {
      std::lock_guard lock(mu_);
      if (cancelled_) throw SessionCancelled(reason_);
      if (!pending_.empty()) {
        claimed = std::move(pending_.front());
        pending_.pop_front();
        if (pending_.empty()) drained = std::move(on_drained_);
      } else {
        queue_.push_back(std::move(m));
      }
    }
    cv_.notify_all();
    if (claimed.fulfill) claimed.fulfill(std::move(m));
    if (drained) drained();
  }

  Message take() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return cancelled_ || peer_closed_ || (pending_.empty() && !queue_.empty()); });
    if (cancelled_) throw SessionCancelled(reason_);
    if (pending_.empty() && !queue_.empty()) {
      Message m = std::move(queue_.front());
      queue_.pop_front();
      return m;
    }
    throw SessionCancelled("peer closed the session");
  }

  void take_async(Fulfill fulfill, Fail fail) {
    std::unique_lock lock(mu_);
    if (cancelled_ || peer_closed_) {
      const auto why = cancelled_ ? reason_ : std::string("peer closed the session");
      lock.unlock();
      fail(std::make_exception_ptr(SessionCancelled(why)));
      return;
    }
    if (pending_.empty() && !queue_.empty()) {
      Message m = std::move(queue_.front());
      queue_.pop_front();
      lock.unlock();
      fulfill(std::move(m));
      return;
    }
    pending_.push_back(Pending{std::move(fulfill), std::move(fail)});
  }

  // Teardown: blocked and future operations raise SessionCancelled.
  void cancel(const std::string& reason) {
    std::deque<Pending> failed;
    std::function<void()> drained;
    {
      std::lock_guard lock(mu_);
      if (cancelled_) return;
      cancelled_ = true;
      reason_ = reason;
      failed.swap(pending_);
      drained = std::move(on_drained_);
    }
    cv_.notify_all();
    fail_all(failed, reason);
    if (drained) drained();
  }

  // The sender will not send anything more.
  void peer_close() {
    std::deque<Pending> failed;
    std::function<void()> drained;
    {
      std::lock_guard lock(mu_);
      peer_closed_ = true;
      failed.swap(pending_);
      if (!failed.empty()) drained = std::move(on_drained_);
    }
    cv_.notify_all();
    fail_all(failed, "peer closed before a delayed reception completed");
    if (drained) drained();
  }

  bool has_pending() const {
    std::lock_guard lock(mu_);
    return !pending_.empty();
  }
  bool cancelled() const {
    std::lock_guard lock(mu_);
    return cancelled_;
  }

  // Runs `cb` once no delayed reception is pending.
  void when_drained(std::function<void()> cb) {
    {
      std::lock_guard lock(mu_);
      if (!pending_.empty()) {
        on_drained_ = std::move(cb);
        return;
      }
    }
    cb();
  }

 private:
  struct Pending {
    Fulfill fulfill;
    Fail fail;
  };

  static void fail_all(std::deque<Pending>& failed, const std::string& reason) {
    for (auto& p : failed) p.fail(std::make_exception_ptr(SessionCancelled(reason)));
  }

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> queue_;
  std::deque<Pending> pending_;
  std::function<void()> on_drained_;
  bool cancelled_ = false;
  bool peer_closed_ = false;
  std::string reason_;
};

// One side of a duplex transport.
class Port : public std::enable_shared_from_this<Port> {
 public:
  explicit Port(std::uint64_t session) : session_(session) { ++diagnostics::detail::counters().live_ports; }
  virtual ~Port() { --diagnostics::detail::counters().live_ports; }
  Port(const Port&) = delete;
  Port& operator=(const Port&) = delete;

  std::uint64_t session() const noexcept { return session_; }

  // Non-blocking.
  void post(Message m) {
    if (cancelled()) throw SessionCancelled(cancel_reason());
    do_post(std::move(m));
    posted_.fetch_add(1, std::memory_order_relaxed);
  }

  Message take() { return inbox().take(); }

  void take_async(Mailbox::Fulfill fulfill, Mailbox::Fail fail) {
    inbox().take_async(std::move(fulfill), std::move(fail));
  }

  // Ends this side. A delayed reception still pending keeps the transport
  // alive until it completes.
  void close() {
    if (cancelled()) throw SessionCancelled(cancel_reason());
    closed_ = true;
    do_close();
    if (inbox().has_pending()) {
      self_hold_ = shared_from_this();
      inbox().when_drained([this] { auto keep = std::move(self_hold_); });
    }
  }

  // Idempotent teardown of both directions.
  void cancel(const std::string& reason = "cancelled") {
    bool expected = false;
    if (!cancel_requested_.compare_exchange_strong(expected, true)) return;
    do_cancel(reason);
  }

  bool cancelled() const { return cancel_requested_ || inbox().cancelled(); }
  bool closed() const noexcept { return closed_; }
  std::uint64_t posted() const noexcept { return posted_.load(std::memory_order_relaxed); }

  virtual bool supports_transfer() const = 0;
  virtual const Codec* codec() const { return nullptr; }

  void set_trace(std::shared_ptr<TraceLog> log) { trace_ = std::move(log); }
  void record(TraceEvent e) {
    if (trace_) trace_->append(std::move(e));
  }

 protected:
  virtual Mailbox& inbox() = 0;
  virtual const Mailbox& inbox() const = 0;
  virtual void do_post(Message m) = 0;
  virtual void do_close() = 0;
  virtual void do_cancel(const std::string& reason) = 0;
  virtual std::string cancel_reason() const { return "transport torn down"; }

 private:
  std::uint64_t session_;
  std::atomic<bool> cancel_requested_{false};
  std::atomic<bool> closed_{false};
  std::atomic<std::uint64_t> posted_{0};
  std::shared_ptr<TraceLog> trace_;
  std::shared_ptr<Port> self_hold_;
};

// In-memory side: delivers straight into the peer's mailbox.
class LocalPort final : public Port {
 public:
  LocalPort(std::uint64_t session, std::shared_ptr<Mailbox> in, std::shared_ptr<Mailbox> out)
      : Port(session), in_(std::move(in)), out_(std::move(out)) {}

  bool supports_transfer() const override { return true; }

 protected:
  Mailbox& inbox() override { return *in_; }
  const Mailbox& inbox() const override { return *in_; }
  void do_post(Message m) override { out_->deliver(std::move(m)); }
  void do_close() override { out_->peer_close(); }
  void do_cancel(const std::string& reason) override {
    in_->cancel(reason);
    out_->cancel(reason);
  }

 private:
  std::shared_ptr<Mailbox> in_;
  std::shared_ptr<Mailbox> out_;
};

struct SideSpec {
  const char* side;
  const Shape& start;
  const std::vector<Shape>& env;
};

inline std::shared_ptr<TraceLog> open_trace(std::uint64_t session, const SideSpec& spec) {
  auto& registry = TraceRegistry::global();
  if (!registry.enabled()) return nullptr;
  return registry.open(session, spec.side, spec.start, spec.env);
}

inline std::pair<std::shared_ptr<Port>, std::shared_ptr<Port>> make_local_pair(const SideSpec& a,
                                                                                const SideSpec& b) {
  const auto session = next_session_id();
  auto ab = std::make_shared<Mailbox>();
  auto ba = std::make_shared<Mailbox>();
  auto pa = std::make_shared<LocalPort>(session, ba, ab);
  auto pb = std::make_shared<LocalPort>(session, ab, ba);
  pa->set_trace(open_trace(session, a));
  pb->set_trace(open_trace(session, b));
  return {std::move(pa), std::move(pb)};
}

}  // namespace sessio::detail
