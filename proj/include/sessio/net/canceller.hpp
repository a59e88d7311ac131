#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "sessio/detail/port.hpp"
#include "sessio/error.hpp"
#include "sessio/session.hpp"

namespace sessio {

// Tears down every registered session when disposed or destroyed, e.g. when
// the scope owning it unwinds after one of the sessions failed. Sessions
// that were closed normally are left alone.
class SessionCanceller {
 public:
  SessionCanceller() = default;
  SessionCanceller(const SessionCanceller&) = delete;
  SessionCanceller& operator=(const SessionCanceller&) = delete;
  ~SessionCanceller() { dispose(); }

  // Registration is not a protocol step: the endpoint stays usable and
  // every continuation derived from it stays covered.
  template <class S, class E>
  Session<S, E>& add(Session<S, E>& ep) {
    if (!ep.valid()) throw LinearityError(LinearityError::Kind::reuse, ep.id());
    std::lock_guard lock(mu_);
    if (disposed_) throw CancellerDisposed();
    ports_.push_back(ep.port_);
    return ep;
  }

  template <class S, class E>
  Session<S, E> add(Session<S, E>&& ep) {
    add(ep);
    return std::move(ep);
  }

  // Idempotent.
  void dispose() {
    std::vector<std::weak_ptr<detail::Port>> ports;
    {
      std::lock_guard lock(mu_);
      if (disposed_) return;
      disposed_ = true;
      ports.swap(ports_);
    }
    for (auto& weak : ports) {
      if (auto port = weak.lock(); port && !port->closed()) port->cancel("session canceller disposed");
    }
  }

  bool disposed() const {
    std::lock_guard lock(mu_);
    return disposed_;
  }

 private:
  mutable std::mutex mu_;
  bool disposed_ = false;
  std::vector<std::weak_ptr<detail::Port>> ports_;
};

}  // namespace sessio
