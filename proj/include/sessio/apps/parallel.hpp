#pragma once

#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "sessio/runtime.hpp"

namespace sessio {

// One fresh session per parameter, each served by its own activity running
// body(server, param). Client ends come back in parameter order.
template <class W, class P, class F>
auto parallel(const W& w, std::vector<P> params, F body) {
  if (params.empty()) throw std::invalid_argument("parallel needs at least one parameter");
  using Client = decltype(session_pair(w).first);
  std::vector<Client> clients;
  clients.reserve(params.size());
  for (auto& p : params) {
    clients.push_back(fork_thread(w, [body, p = std::move(p)](auto server) mutable { body(std::move(server), std::move(p)); }));
  }
  return clients;
}

template <class W, class F>
auto parallel(const W& w, std::size_t count, F body) {
  std::vector<std::size_t> ids(count);
  for (std::size_t i = 0; i < count; ++i) ids[i] = i;
  return parallel(w, std::move(ids), [body](auto server, std::size_t) mutable { body(std::move(server)); });
}

// A chain of stage activities. Stage i runs body(prev, next, stage) where
// prev is the server end of the session from stage i-1 and next the client
// end of the session to stage i+1. Returns (client end into the first
// stage, server end out of the last stage).
template <class W, class P, class F>
auto pipeline(const W& w, std::vector<P> stages, F body) {
  if (stages.empty()) throw std::invalid_argument("pipeline needs at least one stage");
  auto [in, prev] = session_pair(w);
  for (auto& stage : stages) {
    auto [next, next_server] = session_pair(w);
    detail::spawn([body, prev = std::move(prev), next = std::move(next), stage = std::move(stage)]() mutable {
      body(std::move(prev), std::move(next), std::move(stage));
    });
    prev = std::move(next_server);
  }
  return std::pair(std::move(in), std::move(prev));
}

}  // namespace sessio
