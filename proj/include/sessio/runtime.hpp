#pragma once

#include <type_traits>
#include <utility>

#include "sessio/detail/activity.hpp"
#include "sessio/detail/port.hpp"
#include "sessio/protocol.hpp"
#include "sessio/session.hpp"

namespace sessio {

template <class S>
using Endpoint = Session<S, Env<S>>;

// Both ends of a fresh in-memory session, (client, server).
template <class S, class T>
auto session_pair(const Dual<S, T>&) {
  static_assert(is_closed_v<S>, "a top-level protocol may not contain free goto steps");
  auto [a, b] = detail::make_local_pair({"client", shape_of<S>(), env_shapes_of<Env<S>>()},
                                        {"server", shape_of<T>(), env_shapes_of<Env<T>>()});
  return std::pair<Session<S, Env<S>>, Session<T, Env<T>>>(
      detail::session_access::make<S, Env<S>>(std::move(a)), detail::session_access::make<T, Env<T>>(std::move(b)));
}

template <class SS, class TT>
auto session_pair(const DualEnv<SS, TT>&) {
  using W = DualEnv<SS, TT>;
  using S = typename W::first_mine;
  using T = typename W::first_theirs;
  auto [a, b] = detail::make_local_pair({"client", shape_of<S>(), env_shapes_of<SS>()},
                                        {"server", shape_of<T>(), env_shapes_of<TT>()});
  return std::pair<Session<S, SS>, Session<T, TT>>(detail::session_access::make<S, SS>(std::move(a)),
                                                   detail::session_access::make<T, TT>(std::move(b)));
}

// Runs `body` with the server end on a new activity; returns the client end.
template <class W, class F>
auto fork_thread(const W& w, F&& body) {
  auto [client, server] = session_pair(w);
  using Server = decltype(server);
  static_assert(std::is_invocable_v<std::decay_t<F>&, Server>, "body must accept the server endpoint by value");
  detail::spawn([server = std::move(server), body = std::forward<F>(body)]() mutable { body(std::move(server)); });
  return std::move(client);
}

}  // namespace sessio
