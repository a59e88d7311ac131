#pragma once

// One reuse attempt per endpoint operation. Each case performs the
// operation once, legitimately, then again on the consumed endpoint, and
// reports whether the second call raised LinearityError(reuse). Every
// session is driven to completion so that nothing leaks.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sessio/sessio.hpp"

namespace linearity_cases {

using namespace sessio;
using namespace sessio::combinators;

template <class F>
bool raises_reuse(F&& f) {
  try {
    f();
  } catch (const LinearityError& e) {
    return e.kind() == LinearityError::Kind::reuse;
  } catch (...) {
    return false;
  }
  return false;
}

inline auto close_both = [](auto ep) { ep.close(); };

inline bool send_twice() {
  auto [c, s] = session_pair(send(val<int>, end));
  auto c2 = c.send(1);
  const bool ok = raises_reuse([&] { (void)c.send(2); });
  auto [v, s2] = s.receive();
  s2.close();
  c2.close();
  return ok && v == 1;
}

inline bool receive_twice() {
  auto [c, s] = session_pair(recv(val<int>, end));
  auto s2 = s.send(5);
  auto [v, c2] = c.receive();
  const bool ok = raises_reuse([&] { (void)c.receive(); });
  c2.close();
  s2.close();
  return ok && v == 5;
}

inline bool receive_async_twice() {
  auto [c, s] = session_pair(recv(val<int>, end));
  auto [token, c2] = c.receive_async();
  const bool ok = raises_reuse([&] { (void)c.receive_async(); });
  s.send(3).close();
  c2.close();
  return ok && token.wait() == 3;
}

inline bool select_left_twice() {
  auto [c, s] = session_pair(select(end, end));
  auto c2 = c.select_left();
  const bool ok = raises_reuse([&] { (void)c.select_left(); });
  c2.close();
  const int branch = s.offer([](auto l) { l.close(); return 0; }, [](auto r) { r.close(); return 1; });
  return ok && branch == 0;
}

inline bool select_right_twice() {
  auto [c, s] = session_pair(select(end, end));
  auto c2 = c.select_right();
  const bool ok = raises_reuse([&] { (void)c.select_right(); });
  c2.close();
  const int branch = s.offer([](auto l) { l.close(); return 0; }, [](auto r) { r.close(); return 1; });
  return ok && branch == 1;
}

inline bool offer_twice() {
  auto [c, s] = session_pair(offer(end, end));
  s.select_left().close();
  c.offer(close_both, close_both);
  return raises_reuse([&] { c.offer(close_both, close_both); });
}

inline bool offer_async_twice() {
  auto [c, s] = session_pair(offer(end, end));
  auto token = c.offer_async(close_both, close_both);
  const bool ok = raises_reuse([&] { (void)c.offer_async(close_both, close_both); });
  s.select_right().close();
  token.wait();
  return ok;
}

inline bool close_twice() {
  auto [c, s] = session_pair(end);
  c.close();
  const bool ok = raises_reuse([&] { c.close(); });
  s.close();
  return ok;
}

inline bool jump_twice() {
  auto [c, s] = session_pair(select(send(val<int>, goto0), end));
  auto g = c.select_left().send(7);
  auto head = g.jump();
  const bool ok = raises_reuse([&] { (void)g.jump(); });
  head.select_right().close();
  int got = 0;
  auto s1 = std::move(s);
  s1.offer(
      [&](auto l) {
        auto [v, k] = l.receive();
        got = v;
        k.jump().offer([](auto) { throw std::logic_error("unexpected"); }, close_both);
      },
      [](auto) { throw std::logic_error("unexpected"); });
  return ok && got == 7;
}

inline bool deleg_twice() {
  auto [c, s] = session_pair(deleg(recv(val<Unit>, end), end));
  auto [a, b] = session_pair(recv(val<Unit>, end));
  auto c2 = c.deleg(a);
  const bool ok = raises_reuse([&] { (void)c.deleg(a); });
  auto [carried, s2] = s.deleg_recv();
  b.send().close();
  carried.receive().second.close();
  c2.close();
  s2.close();
  return ok;
}

inline bool deleg_new_twice() {
  auto [c, s] = session_pair(deleg(recv(val<Unit>, end), end));
  auto [c2, kept] = c.deleg_new();
  const bool ok = raises_reuse([&] { (void)c.deleg_new(); });
  auto [carried, s2] = s.deleg_recv();
  kept.send().close();
  carried.receive().second.close();
  c2.close();
  s2.close();
  return ok;
}

inline bool deleg_recv_twice() {
  auto [c, s] = session_pair(deleg(recv(val<Unit>, end), end));
  auto [c2, kept] = c.deleg_new();
  auto [carried, s2] = s.deleg_recv();
  const bool ok = raises_reuse([&] { (void)s.deleg_recv(); });
  kept.send().close();
  carried.receive().second.close();
  c2.close();
  s2.close();
  return ok;
}

struct Case {
  std::string name;
  std::function<bool()> run;
};

inline std::vector<Case> all() {
  return {{"send", send_twice},
          {"receive", receive_twice},
          {"receive_async", receive_async_twice},
          {"select_left", select_left_twice},
          {"select_right", select_right_twice},
          {"offer", offer_twice},
          {"offer_async", offer_async_twice},
          {"close", close_twice},
          {"jump", jump_twice},
          {"deleg", deleg_twice},
          {"deleg_new", deleg_new_twice},
          {"deleg_recv", deleg_recv_twice}};
}

}  // namespace linearity_cases
