#pragma once

#include <any>
#include <atomic>
#include <concepts>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <type_traits>
#include <utility>

#include "sessio/codec.hpp"
#include "sessio/detail/port.hpp"
#include "sessio/error.hpp"
#include "sessio/protocol.hpp"
#include "sessio/token.hpp"
#include "sessio/trace.hpp"

namespace sessio {

template <class S, class E>
class Session;

class SessionCanceller;

namespace detail {

template <class V>
Message make_value(V v) {
  Message m;
  m.kind = Message::Kind::value;
  m.boxed = std::move(v);
  if constexpr (JsonPayload<V>) {
    m.encode = [](const std::any& boxed, const Codec& codec) {
      return encode_payload<V>(std::any_cast<const V&>(boxed), codec);
    };
  }
  return m;
}

template <class V>
V unpack_value(Message& m, const Codec* codec) {
  if (m.kind != Message::Kind::value) throw ProtocolViolation("expected a " + payload_tag<V>::name() + " value");
  if (m.wire) {
    if constexpr (JsonPayload<V>) {
      if (codec == nullptr) throw CodecError("encoded value on a transport without codec");
      return decode_payload<V>(*m.wire, *codec);
    } else {
      throw CodecError("payload " + payload_tag<V>::name() + " has no wire mapping");
    }
  }
  if (auto* v = std::any_cast<V>(&m.boxed)) return std::move(*v);
  throw ShapeMismatch("value of unexpected domain, wanted " + payload_tag<V>::name());
}

struct session_access {
  template <class S, class E>
  static Session<S, E> make(std::shared_ptr<Port> port) {
    return Session<S, E>(std::move(port));
  }
  template <class S, class E>
  static const std::shared_ptr<Port>& port_of(const Session<S, E>& s) {
    return s.port_;
  }
};

// Tears the transport down when a protocol error escapes an operation, so
// the peer does not block forever.
template <class F>
decltype(auto) guarded(const std::shared_ptr<Port>& port, F&& fn) {
  try {
    return fn();
  } catch (const SessionCancelled&) {
    throw;
  } catch (const std::exception& e) {
    port->cancel(e.what());
    throw;
  }
}

}  // namespace detail

// A linear channel endpoint. S is the current session type, E the session
// environment that goto steps index into.
//
// Every operation consumes the endpoint it is called on and, where the
// protocol continues, returns a fresh endpoint at the next step. Calling an
// operation on a consumed (or moved-from) endpoint throws
// LinearityError(reuse). Destroying an endpoint that was never used counts
// as a leak: it is reported through diagnostics::leak_count() and the
// transport is torn down so that the peer sees SessionCancelled.
template <class S, class E>
class Session {
  static_assert(is_env_v<E>, "second parameter must be an Env<...>");

 public:
  using state_type = S;
  using env_type = E;

  Session(Session&& other) noexcept
      : port_(std::move(other.port_)), id_(other.id_), used_(other.used_.exchange(true)) {}

  Session& operator=(Session&& other) noexcept {
    if (this != &other) {
      abandon();
      port_ = std::move(other.port_);
      id_ = other.id_;
      used_ = other.used_.exchange(true);
    }
    return *this;
  }

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  ~Session() { abandon(); }

  bool valid() const noexcept { return !used_.load(); }
  std::uint64_t id() const noexcept { return id_; }
  std::uint64_t session_id() const noexcept { return port_ ? port_->session() : 0; }

  static const Shape& shape() { return shape_of<S>(); }
  static const std::vector<Shape>& env() { return env_shapes_of<E>(); }

  // ---- output ----

  auto send(payload_t<S> v) requires is_send_v<S> {
    using V = typename S::payload;
    auto port = consume();
    port->post(detail::make_value<V>(std::move(v)));
    port->record({Direction::out, Variant::value, payload_tag<V>::name()});
    return next<typename S::next>(std::move(port));
  }

  auto send() requires is_send_v<S> && std::same_as<payload_t<S>, Unit> { return send(Unit{}); }

  // ---- input ----

  // Blocks for the value; returns it with the continuation.
  auto receive() requires is_recv_v<S> {
    using V = typename S::payload;
    auto port = consume();
    V v = detail::guarded(port, [&] {
      auto m = port->take();
      return detail::unpack_value<V>(m, port->codec());
    });
    port->record({Direction::in, Variant::value, payload_tag<V>::name()});
    return std::pair<V, Session<typename S::next, E>>(std::move(v), next<typename S::next>(std::move(port)));
  }

  auto receive(payload_t<S>& out) requires is_recv_v<S> {
    auto [v, cont] = receive();
    out = std::move(v);
    return std::move(cont);
  }

  // Schedules the reception and returns at once. The token completes when
  // the value arrives. Later blocking operations on the continuation never
  // consume a message ahead of this reception.
  auto receive_async() requires is_recv_v<S> {
    using V = typename S::payload;
    auto port = consume();
    CompletionSource<V> source;
    auto token = source.token();
    const Codec* codec = port->codec();
    auto& pending = diagnostics::detail::counters().pending_receptions;
    ++pending;
    port->take_async(
        [source, codec, &pending](detail::Message m) {
          try {
            source.set_value(detail::unpack_value<V>(m, codec));
          } catch (...) {
            source.set_error(std::current_exception());
          }
          --pending;
        },
        [source, &pending](std::exception_ptr e) {
          source.set_error(std::move(e));
          --pending;
        });
    port->record({Direction::in, Variant::value, payload_tag<V>::name()});
    return std::pair<CompletionToken<V>, Session<typename S::next, E>>(std::move(token),
                                                                       next<typename S::next>(std::move(port)));
  }

  auto receive_async(CompletionToken<payload_t<S>>& out) requires is_recv_v<S> {
    auto [token, cont] = receive_async();
    out = std::move(token);
    return std::move(cont);
  }

  // ---- choice ----

  auto select_left() requires is_select_v<S> { return choose<true, typename S::left>(); }
  auto select_right() requires is_select_v<S> { return choose<false, typename S::right>(); }

  // Blocks for the peer's label and runs the matching handler with the
  // continuation. Both handlers must return the same type.
  template <class L, class R>
  auto offer(L&& on_left, R&& on_right) requires is_offer_v<S> {
    using SL = Session<typename S::left, E>;
    using SR = Session<typename S::right, E>;
    static_assert(std::is_invocable_v<L, SL>, "left handler must accept the left continuation");
    static_assert(std::is_invocable_v<R, SR>, "right handler must accept the right continuation");
    static_assert(std::is_same_v<std::invoke_result_t<L, SL>, std::invoke_result_t<R, SR>>,
                  "offer handlers must return the same type");
    auto port = consume();
    const bool left = detail::guarded(port, [&] {
      auto m = port->take();
      if (m.kind == detail::Message::Kind::left) return true;
      if (m.kind == detail::Message::Kind::right) return false;
      throw ProtocolViolation("offer expected a label");
    });
    port->record({Direction::in, left ? Variant::left : Variant::right, {}});
    if (left) return std::invoke(std::forward<L>(on_left), next<typename S::left>(std::move(port)));
    return std::invoke(std::forward<R>(on_right), next<typename S::right>(std::move(port)));
  }

  // offer() on a separate activity; the token yields the handler's result.
  template <class L, class R>
  auto offer_async(L on_left, R on_right) requires is_offer_v<S> {
    Session self(consume());
    return async_task([self = std::move(self), l = std::move(on_left), r = std::move(on_right)]() mutable {
      return self.offer(std::move(l), std::move(r));
    });
  }

  // ---- end and recursion ----

  void close() requires std::same_as<S, Eps> {
    auto port = consume();
    port->close();
    port->record({Direction::out, Variant::close, {}});
  }

  // No communication: continue at the environment slot the goto names.
  auto jump() requires is_goto_v<S> {
    constexpr std::size_t index = S::index;
    if constexpr (index == 0) {
      static_assert(E::size == 1, "goto0 requires a single-slot environment");
      return next<env_slot_t<0, E>>(consume());
    } else {
      static_assert(index <= E::size, "goto index beyond the session environment");
      return next<env_slot_t<index - 1, E>>(consume());
    }
  }

  // ---- delegation ----

  template <class C, class E2>
  auto deleg(Session<C, E2>& carried) requires is_deleg_v<S> {
    using S0 = typename S::carried;
    static_assert(std::is_same_v<C, carried_current_t<S0>> && std::is_same_v<E2, carried_env_t<S0>>,
                  "delegated endpoint does not match the carried session type");
    if (!valid()) throw LinearityError(LinearityError::Kind::reuse, id_);
    if (!carried.valid()) throw LinearityError(LinearityError::Kind::reuse, carried.id());
    if (!port_->supports_transfer()) throw UnsupportedTransfer();
    auto port = consume();
    detail::Message m;
    m.kind = detail::Message::Kind::transfer;
    m.carried = carried.consume();
    m.carried_shape = shape_of<C>();
    port->post(std::move(m));
    port->record({Direction::out, Variant::deleg, {}});
    return next<typename S::next>(std::move(port));
  }

  template <class C, class E2>
  auto deleg(Session<C, E2>&& carried) requires is_deleg_v<S> {
    return deleg(carried);
  }

  // Bound output: creates a fresh session, sends one end, keeps the dual.
  // Returns (continuation, retained end).
  auto deleg_new() requires is_deleg_v<S> {
    using SC = carried_current_t<typename S::carried>;
    using SE = carried_env_t<typename S::carried>;
    using TC = carried_current_t<typename S::carried_dual>;
    using TE = carried_env_t<typename S::carried_dual>;
    if (!valid()) throw LinearityError(LinearityError::Kind::reuse, id_);
    if (!port_->supports_transfer()) throw UnsupportedTransfer();
    auto port = consume();
    auto [sent, kept] = detail::make_local_pair({"carried", shape_of<SC>(), env_shapes_of<SE>()},
                                                {"retained", shape_of<TC>(), env_shapes_of<TE>()});
    detail::Message m;
    m.kind = detail::Message::Kind::transfer;
    m.carried = std::move(sent);
    m.carried_shape = shape_of<SC>();
    port->post(std::move(m));
    port->record({Direction::out, Variant::deleg, {}});
    return std::pair<Session<typename S::next, E>, Session<TC, TE>>(next<typename S::next>(std::move(port)),
                                                                    Session<TC, TE>(std::move(kept)));
  }

  // Blocks for a delegated endpoint. Returns (received endpoint, continuation).
  auto deleg_recv() requires is_deleg_recv_v<S> {
    using SC = carried_current_t<typename S::carried>;
    using SE = carried_env_t<typename S::carried>;
    if (!valid()) throw LinearityError(LinearityError::Kind::reuse, id_);
    if (!port_->supports_transfer()) throw UnsupportedTransfer();
    auto port = consume();
    auto carried = detail::guarded(port, [&] {
      auto m = port->take();
      if (m.kind != detail::Message::Kind::transfer || !m.carried) {
        throw ProtocolViolation("expected a delegated endpoint");
      }
      if (!(*m.carried_shape == shape_of<SC>())) {
        m.carried->cancel("shape mismatch");
        throw ShapeMismatch("delegated endpoint at " + render(*m.carried_shape) + ", expected " +
                            render(shape_of<SC>()));
      }
      return std::move(m.carried);
    });
    port->record({Direction::in, Variant::deleg, {}});
    return std::pair<Session<SC, SE>, Session<typename S::next, E>>(Session<SC, SE>(std::move(carried)),
                                                                    next<typename S::next>(std::move(port)));
  }

 private:
  template <class, class>
  friend class Session;
  friend struct detail::session_access;
  friend class SessionCanceller;

  explicit Session(std::shared_ptr<detail::Port> port)
      : port_(std::move(port)), id_(detail::next_endpoint_id()), used_(port_ == nullptr) {}

  template <class K>
  static Session<K, E> next(std::shared_ptr<detail::Port> port) {
    return Session<K, E>(std::move(port));
  }

  std::shared_ptr<detail::Port> consume() {
    if (used_.exchange(true)) throw LinearityError(LinearityError::Kind::reuse, id_);
    return std::move(port_);
  }

  template <bool Left, class K>
  Session<K, E> choose() {
    auto port = consume();
    port->post(detail::Message::label(Left));
    port->record({Direction::out, Left ? Variant::left : Variant::right, {}});
    return next<K>(std::move(port));
  }

  void abandon() noexcept {
    if (!used_.exchange(true) && port_) {
      ++diagnostics::detail::counters().leaks;
      diagnostics::warn("endpoint #" + std::to_string(id_) + " at " + render(shape()) + " leaked");
      port_->cancel("peer endpoint abandoned");
      port_.reset();
    }
  }

  std::shared_ptr<detail::Port> port_;
  std::uint64_t id_ = 0;
  std::atomic<bool> used_{true};
};

}  // namespace sessio
