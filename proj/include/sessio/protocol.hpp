#pragma once

// Compile-time session types, duality witnesses and protocol combinators.
//
// A protocol is written from the client's point of view with the combinators
// in sessio::combinators:
//
//   using namespace sessio::combinators;
//   constexpr auto tak = send(val<IntTriple>,
//                             deleg(recv(val<Unit>, end),
//                                   offer(recv(val<int>, end), end)));
//
// The result is a Dual<S, T>; S is the client's session type and T the
// server's. Dual values can only be produced by the combinators, each of
// which pairs a session type with its reciprocal, so holding a Dual<S, T> is
// proof that T is the dual of S.

#include <cstddef>
#include <tuple>
#include <type_traits>
#include <vector>

#include "sessio/payload.hpp"
#include "sessio/shape.hpp"
#include "sessio/witness.hpp"

namespace sessio {

// ---- session types --------------------------------------------------------

template <class V, class S>
struct Send {
  using payload = V;
  using next = S;
};

template <class V, class S>
struct Recv {
  using payload = V;
  using next = S;
};

template <class L, class R>
struct Select {
  using left = L;
  using right = R;
};

template <class L, class R>
struct Offer {
  using left = L;
  using right = R;
};

struct Eps {};

template <std::size_t I>
struct Goto {
  static constexpr std::size_t index = I;
};

// Delegate an endpoint whose session is S0 (T0 is its dual), then do S.
template <class S0, class T0, class S>
struct Deleg {
  using carried = S0;
  using carried_dual = T0;
  using next = S;
};

template <class S0, class S>
struct DelegRecv {
  using carried = S0;
  using next = S;
};

// Session environment: the slots goto<i> jumps into.
template <class... Slots>
struct Env {
  static constexpr std::size_t size = sizeof...(Slots);
};

// A carried endpoint that is already inside its session: current step C,
// environment E.
template <class C, class E>
struct Mid {};

// ---- classification -------------------------------------------------------

template <class S> inline constexpr bool is_send_v = false;
template <class V, class K> inline constexpr bool is_send_v<Send<V, K>> = true;
template <class S> inline constexpr bool is_recv_v = false;
template <class V, class K> inline constexpr bool is_recv_v<Recv<V, K>> = true;
template <class S> inline constexpr bool is_select_v = false;
template <class L, class R> inline constexpr bool is_select_v<Select<L, R>> = true;
template <class S> inline constexpr bool is_offer_v = false;
template <class L, class R> inline constexpr bool is_offer_v<Offer<L, R>> = true;
template <class S> inline constexpr bool is_goto_v = false;
template <std::size_t I> inline constexpr bool is_goto_v<Goto<I>> = true;
template <class S> inline constexpr bool is_deleg_v = false;
template <class S0, class T0, class K> inline constexpr bool is_deleg_v<Deleg<S0, T0, K>> = true;
template <class S> inline constexpr bool is_deleg_recv_v = false;
template <class S0, class K> inline constexpr bool is_deleg_recv_v<DelegRecv<S0, K>> = true;
template <class E> inline constexpr bool is_env_v = false;
template <class... Ss> inline constexpr bool is_env_v<Env<Ss...>> = true;

namespace detail {

// Placeholder parameter type for operations that do not apply to a state.
struct NotApplicable {
  NotApplicable() = delete;
};

template <class S> struct payload_of_state { using type = NotApplicable; };
template <class V, class K> struct payload_of_state<Send<V, K>> { using type = V; };
template <class V, class K> struct payload_of_state<Recv<V, K>> { using type = V; };

// Carried sessions come in three spellings: a plain session type S0 (resumes
// at S0 with environment Env<S0>), an Env<...> (starts at slot 1), or
// Mid<C, Env<...>> (resumes mid-session).
template <class C> struct carried {
  using current = C;
  using env = Env<C>;
};
template <class S1, class... Ss> struct carried<Env<S1, Ss...>> {
  using current = S1;
  using env = Env<S1, Ss...>;
};
template <class C, class... Ss> struct carried<Mid<C, Env<Ss...>>> {
  using current = C;
  using env = Env<Ss...>;
};

template <std::size_t I, class E> struct env_slot;
template <std::size_t I, class... Ss> struct env_slot<I, Env<Ss...>> {
  using type = std::tuple_element_t<I, std::tuple<Ss...>>;
};

// Largest goto index and goto<0> use, ignoring carried sessions.
template <class S> struct jumps {
  static constexpr std::size_t max = 0;
  static constexpr bool zero = false;
};
template <std::size_t I> struct jumps<Goto<I>> {
  static constexpr std::size_t max = I;
  static constexpr bool zero = I == 0;
};
template <class A, class B> struct jumps2 {
  static constexpr std::size_t max = jumps<A>::max > jumps<B>::max ? jumps<A>::max : jumps<B>::max;
  static constexpr bool zero = jumps<A>::zero || jumps<B>::zero;
};
template <class V, class K> struct jumps<Send<V, K>> : jumps<K> {};
template <class V, class K> struct jumps<Recv<V, K>> : jumps<K> {};
template <class L, class R> struct jumps<Select<L, R>> : jumps2<L, R> {};
template <class L, class R> struct jumps<Offer<L, R>> : jumps2<L, R> {};
template <class S0, class T0, class K> struct jumps<Deleg<S0, T0, K>> : jumps<K> {};
template <class S0, class K> struct jumps<DelegRecv<S0, K>> : jumps<K> {};

}  // namespace detail

template <class S>
using payload_t = typename detail::payload_of_state<S>::type;
template <class C>
using carried_current_t = typename detail::carried<C>::current;
template <class C>
using carried_env_t = typename detail::carried<C>::env;
template <std::size_t I, class E>
using env_slot_t = typename detail::env_slot<I, E>::type;

// A session type is closed when it only loops via goto<0>.
template <class S>
inline constexpr bool is_closed_v = detail::jumps<S>::max == 0;

// ---- type-level dual ------------------------------------------------------

template <class S> struct dual;
template <class S> using dual_t = typename dual<S>::type;
template <class C> struct dual_carried { using type = dual_t<C>; };
template <class... Ss> struct dual_carried<Env<Ss...>> { using type = Env<dual_t<Ss>...>; };
template <class C, class... Ss> struct dual_carried<Mid<C, Env<Ss...>>> {
  using type = Mid<dual_t<C>, Env<dual_t<Ss>...>>;
};
template <class C> using dual_carried_t = typename dual_carried<C>::type;

template <class V, class K> struct dual<Send<V, K>> { using type = Recv<V, dual_t<K>>; };
template <class V, class K> struct dual<Recv<V, K>> { using type = Send<V, dual_t<K>>; };
template <class L, class R> struct dual<Select<L, R>> { using type = Offer<dual_t<L>, dual_t<R>>; };
template <class L, class R> struct dual<Offer<L, R>> { using type = Select<dual_t<L>, dual_t<R>>; };
template <> struct dual<Eps> { using type = Eps; };
template <std::size_t I> struct dual<Goto<I>> { using type = Goto<I>; };
template <class S0, class T0, class K> struct dual<Deleg<S0, T0, K>> { using type = DelegRecv<S0, dual_t<K>>; };
template <class S0, class K> struct dual<DelegRecv<S0, K>> {
  using type = Deleg<S0, dual_carried_t<S0>, dual_t<K>>;
};

// ---- value-level reflection -----------------------------------------------

template <class S>
const Shape& shape_of();

namespace detail {

template <class S> struct shape_builder;
template <> struct shape_builder<Eps> {
  static Shape make() { return Shape::end(); }
};
template <std::size_t I> struct shape_builder<Goto<I>> {
  static Shape make() { return Shape::jump(I); }
};
template <class V, class K> struct shape_builder<Send<V, K>> {
  static Shape make() { return Shape::send(payload_of<V>(), shape_of<K>()); }
};
template <class V, class K> struct shape_builder<Recv<V, K>> {
  static Shape make() { return Shape::recv(payload_of<V>(), shape_of<K>()); }
};
template <class L, class R> struct shape_builder<Select<L, R>> {
  static Shape make() { return Shape::select(shape_of<L>(), shape_of<R>()); }
};
template <class L, class R> struct shape_builder<Offer<L, R>> {
  static Shape make() { return Shape::offer(shape_of<L>(), shape_of<R>()); }
};
template <class S0, class T0, class K> struct shape_builder<Deleg<S0, T0, K>> {
  static Shape make() {
    return Shape::deleg(shape_of<carried_current_t<S0>>(), shape_of<carried_current_t<T0>>(), shape_of<K>());
  }
};
template <class S0, class K> struct shape_builder<DelegRecv<S0, K>> {
  static Shape make() { return Shape::deleg_recv(shape_of<carried_current_t<S0>>(), shape_of<K>()); }
};

template <class E> struct env_builder;
template <class... Ss> struct env_builder<Env<Ss...>> {
  static std::vector<Shape> make() { return {shape_of<Ss>()...}; }
};

}  // namespace detail

template <class S>
const Shape& shape_of() {
  static const Shape shape = detail::shape_builder<S>::make();
  return shape;
}

template <class E>
const std::vector<Shape>& env_shapes_of() {
  static const std::vector<Shape> shapes = detail::env_builder<E>::make();
  return shapes;
}

// ---- witnesses ------------------------------------------------------------

namespace detail {
struct combinator_access;
}

template <class S, class T>
class Dual {
 public:
  using mine_type = S;
  using theirs_type = T;

  static const Shape& mine() { return shape_of<S>(); }
  static const Shape& theirs() { return shape_of<T>(); }
  static DualWitness witness() { return DualWitness(mine(), theirs()); }

 private:
  friend struct detail::combinator_access;
  constexpr Dual() = default;
};

template <class SS, class TT>
class DualEnv;

template <class... Ss, class... Ts>
class DualEnv<Env<Ss...>, Env<Ts...>> {
 public:
  using mine_type = Env<Ss...>;
  using theirs_type = Env<Ts...>;
  using first_mine = std::tuple_element_t<0, std::tuple<Ss...>>;
  using first_theirs = std::tuple_element_t<0, std::tuple<Ts...>>;

  static const std::vector<Shape>& mine() { return env_shapes_of<mine_type>(); }
  static const std::vector<Shape>& theirs() { return env_shapes_of<theirs_type>(); }
  static EnvDualWitness witness() { return EnvDualWitness::arrange({Dual<Ss, Ts>::witness()...}); }

 private:
  friend struct detail::combinator_access;
  constexpr DualEnv() = default;
};

namespace detail {

struct combinator_access {
  template <class S, class T>
  static constexpr Dual<S, T> make() {
    return Dual<S, T>();
  }
  template <class SS, class TT>
  static constexpr DualEnv<SS, TT> make_env() {
    return DualEnv<SS, TT>();
  }
};

// Carried witnesses: Dual<S0,T0>, DualEnv<Env..,Env..>, or the result of resume().
template <class W> struct carried_witness;
template <class S0, class T0> struct carried_witness<Dual<S0, T0>> {
  using mine = S0;
  using theirs = T0;
};
template <class SS, class TT> struct carried_witness<DualEnv<SS, TT>> {
  using mine = SS;
  using theirs = TT;
};

}  // namespace detail

// ---- combinators ----------------------------------------------------------

namespace combinators {

template <class V>
struct Val {};
template <Payload V>
inline constexpr Val<V> val{};

inline constexpr auto end = detail::combinator_access::make<Eps, Eps>();
inline constexpr auto goto0 = detail::combinator_access::make<Goto<0>, Goto<0>>();
// Slot references for arrange(); slot numbering starts at one.
inline constexpr auto goto1 = detail::combinator_access::make<Goto<1>, Goto<1>>();
inline constexpr auto goto2 = detail::combinator_access::make<Goto<2>, Goto<2>>();
inline constexpr auto goto3 = detail::combinator_access::make<Goto<3>, Goto<3>>();
inline constexpr auto goto4 = detail::combinator_access::make<Goto<4>, Goto<4>>();
inline constexpr auto goto5 = detail::combinator_access::make<Goto<5>, Goto<5>>();
inline constexpr auto goto6 = detail::combinator_access::make<Goto<6>, Goto<6>>();
inline constexpr auto goto7 = detail::combinator_access::make<Goto<7>, Goto<7>>();
inline constexpr auto goto8 = detail::combinator_access::make<Goto<8>, Goto<8>>();

template <Payload V, class S, class T>
constexpr auto send(Val<V>, Dual<S, T>) {
  return detail::combinator_access::make<Send<V, S>, Recv<V, T>>();
}

template <Payload V, class S, class T>
constexpr auto recv(Val<V>, Dual<S, T>) {
  return detail::combinator_access::make<Recv<V, S>, Send<V, T>>();
}

template <class SL, class TL, class SR, class TR>
constexpr auto select(Dual<SL, TL>, Dual<SR, TR>) {
  return detail::combinator_access::make<Select<SL, SR>, Offer<TL, TR>>();
}

template <class SL, class TL, class SR, class TR>
constexpr auto offer(Dual<SL, TL>, Dual<SR, TR>) {
  return detail::combinator_access::make<Offer<SL, SR>, Select<TL, TR>>();
}

template <class W, class S, class T>
constexpr auto deleg(W, Dual<S, T>) {
  using C = detail::carried_witness<W>;
  return detail::combinator_access::make<Deleg<typename C::mine, typename C::theirs, S>,
                                         DelegRecv<typename C::mine, T>>();
}

template <class W, class S, class T>
constexpr auto deleg_recv(W, Dual<S, T>) {
  using C = detail::carried_witness<W>;
  return detail::combinator_access::make<DelegRecv<typename C::mine, S>,
                                         Deleg<typename C::mine, typename C::theirs, T>>();
}

template <class... Ss, class... Ts>
constexpr auto arrange(Dual<Ss, Ts>...) {
  static_assert(sizeof...(Ss) >= 1 && sizeof...(Ss) <= max_env_arity, "arrange takes 1..8 slots");
  static_assert(((!detail::jumps<Ss>::zero) && ...), "goto0 is reserved for single-cycle sessions");
  static_assert(((detail::jumps<Ss>::max <= sizeof...(Ss)) && ...), "goto index beyond arrange arity");
  return detail::combinator_access::make_env<Env<Ss...>, Env<Ts...>>();
}

// Carried witness for a session delegated in the middle: the endpoint sits
// at `at`, with `root` (or an arranged environment) as its environment.
template <class S, class T, class R, class Q>
constexpr auto resume(Dual<S, T>, Dual<R, Q>) {
  return detail::combinator_access::make<Mid<S, Env<R>>, Mid<T, Env<Q>>>();
}
template <class S, class T, class SS, class TT>
constexpr auto resume(Dual<S, T>, DualEnv<SS, TT>) {
  return detail::combinator_access::make<Mid<S, SS>, Mid<T, TT>>();
}

}  // namespace combinators

// Mid<..> only appears as a carried session; reflect its current step.
namespace detail {
template <class C, class E> struct shape_builder<Mid<C, E>> {
  static Shape make() { return shape_of<C>(); }
};
}  // namespace detail

}  // namespace sessio
