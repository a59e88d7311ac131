#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sessio/payload.hpp"

namespace sessio {

// Value-level session type. Immutable; copies share structure.
//
// Textual rendering (used for diagnostics and the TCP handshake):
//
//   shape := "end"
//          | "goto<" index ">"
//          | "!" tag "." shape                  send
//          | "?" tag "." shape                  receive
//          | "+{L:" shape ", R:" shape "}"      select (internal choice)
//          | "&{L:" shape ", R:" shape "}"      offer (external choice)
//          | "deleg(" shape ")." shape          delegate an endpoint at the carried shape
//          | "delegrecv(" shape ")." shape      accept a delegated endpoint
//   env   := shape                              single slot
//          | "rec[" shape (" | " shape)* "]"    two or more slots
class Shape {
 public:
  enum class Kind : std::uint8_t { send, recv, select, offer, end, jump, deleg, deleg_recv };

  static Shape end() { return Shape(Kind::end, {}, 0, {}); }
  static Shape jump(std::size_t index) { return Shape(Kind::jump, {}, index, {}); }
  static Shape send(PayloadDescriptor payload, Shape cont) {
    return Shape(Kind::send, std::move(payload), 0, {std::move(cont)});
  }
  static Shape recv(PayloadDescriptor payload, Shape cont) {
    return Shape(Kind::recv, std::move(payload), 0, {std::move(cont)});
  }
  static Shape select(Shape left, Shape right) {
    return Shape(Kind::select, {}, 0, {std::move(left), std::move(right)});
  }
  static Shape offer(Shape left, Shape right) {
    return Shape(Kind::offer, {}, 0, {std::move(left), std::move(right)});
  }
  // Throws std::invalid_argument unless carried_dual is the dual of carried.
  static Shape deleg(Shape carried, Shape carried_dual, Shape cont);
  static Shape deleg_recv(Shape carried, Shape cont) {
    return Shape(Kind::deleg_recv, {}, 0, {std::move(carried), std::move(cont)});
  }

  Kind kind() const noexcept { return node_->kind; }
  const PayloadDescriptor& payload() const { return node_->payload; }
  std::size_t index() const noexcept { return node_->index; }

  // send, recv: cont = child 0. deleg: carried, carried_dual, cont.
  // deleg_recv: carried, cont. select/offer: left, right.
  const Shape& cont() const {
    switch (kind()) {
      case Kind::send:
      case Kind::recv: return child(0);
      case Kind::deleg: return child(2);
      case Kind::deleg_recv: return child(1);
      default: throw std::logic_error("shape has no continuation");
    }
  }
  const Shape& left() const { return branch(0); }
  const Shape& right() const { return branch(1); }
  const Shape& carried() const {
    if (kind() != Kind::deleg && kind() != Kind::deleg_recv) throw std::logic_error("shape carries no endpoint");
    return child(0);
  }
  const Shape& carried_dual() const {
    if (kind() != Kind::deleg) throw std::logic_error("shape has no carried dual");
    return child(1);
  }

  std::size_t depth() const noexcept { return node_->depth; }

  // Largest goto index reachable without entering a carried shape.
  std::size_t max_jump() const {
    if (kind() == Kind::jump) return index();
    std::size_t best = 0;
    for_each_step([&](const Shape& s) { best = std::max(best, s.max_jump()); });
    return best;
  }
  bool uses_jump(std::size_t idx) const {
    if (kind() == Kind::jump) return index() == idx;
    bool found = false;
    for_each_step([&](const Shape& s) { found = found || s.uses_jump(idx); });
    return found;
  }

  friend bool operator==(const Shape& a, const Shape& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.index() != b.index() || !(a.payload() == b.payload())) return false;
    const auto& ka = a.node_->children;
    const auto& kb = b.node_->children;
    return std::equal(ka.begin(), ka.end(), kb.begin(), kb.end());
  }

 private:
  struct Node {
    Kind kind;
    PayloadDescriptor payload;
    std::size_t index;
    std::vector<Shape> children;
    std::size_t depth;
  };

  Shape(Kind kind, PayloadDescriptor payload, std::size_t index, std::vector<Shape> children) {
    std::size_t depth = 0;
    for (const auto& c : children) depth = std::max(depth, c.depth());
    node_ = std::make_shared<const Node>(Node{kind, std::move(payload), index, std::move(children), depth + 1});
  }

  const Shape& child(std::size_t i) const { return node_->children[i]; }
  const Shape& branch(std::size_t i) const {
    if (kind() != Kind::select && kind() != Kind::offer) throw std::logic_error("shape is not a choice");
    return child(i);
  }

  // Visits the children that continue this session (not carried shapes).
  template <class F>
  void for_each_step(F&& f) const {
    switch (kind()) {
      case Kind::select:
      case Kind::offer:
        f(child(0));
        f(child(1));
        break;
      case Kind::send:
      case Kind::recv:
      case Kind::deleg:
      case Kind::deleg_recv: f(cont()); break;
      default: break;
    }
  }

  std::shared_ptr<const Node> node_;
};

inline Shape dual_of(const Shape& s) {
  using K = Shape::Kind;
  switch (s.kind()) {
    case K::send: return Shape::recv(s.payload(), dual_of(s.cont()));
    case K::recv: return Shape::send(s.payload(), dual_of(s.cont()));
    case K::select: return Shape::offer(dual_of(s.left()), dual_of(s.right()));
    case K::offer: return Shape::select(dual_of(s.left()), dual_of(s.right()));
    case K::end: return s;
    case K::jump: return s;
    case K::deleg: return Shape::deleg_recv(s.carried(), dual_of(s.cont()));
    case K::deleg_recv: return Shape::deleg(s.carried(), dual_of(s.carried()), dual_of(s.cont()));
  }
  throw std::logic_error("unreachable shape kind");
}

inline Shape Shape::deleg(Shape carried, Shape carried_dual, Shape cont) {
  if (!(dual_of(carried) == carried_dual)) {
    throw std::invalid_argument("deleg: carried dual is not the dual of the carried shape");
  }
  return Shape(Kind::deleg, {}, 0, {std::move(carried), std::move(carried_dual), std::move(cont)});
}

namespace detail {

inline void render_into(std::string& out, const Shape& s) {
  using K = Shape::Kind;
  switch (s.kind()) {
    case K::end: out += "end"; return;
    case K::jump:
      out += "goto<";
      out += std::to_string(s.index());
      out += '>';
      return;
    case K::send:
    case K::recv:
      out += s.kind() == K::send ? '!' : '?';
      out += s.payload().tag;
      out += '.';
      render_into(out, s.cont());
      return;
    case K::select:
    case K::offer:
      out += s.kind() == K::select ? "+{L:" : "&{L:";
      render_into(out, s.left());
      out += ", R:";
      render_into(out, s.right());
      out += '}';
      return;
    case K::deleg:
    case K::deleg_recv:
      out += s.kind() == K::deleg ? "deleg(" : "delegrecv(";
      render_into(out, s.carried());
      out += ").";
      render_into(out, s.cont());
      return;
  }
}

}  // namespace detail

inline std::string render(const Shape& s) {
  std::string out;
  detail::render_into(out, s);
  return out;
}

inline std::string render_env(std::span<const Shape> slots) {
  if (slots.size() == 1) return render(slots.front());
  std::string out = "rec[";
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i > 0) out += " | ";
    detail::render_into(out, slots[i]);
  }
  out += ']';
  return out;
}

inline std::vector<Shape> dual_of(std::span<const Shape> slots) {
  std::vector<Shape> out;
  out.reserve(slots.size());
  for (const auto& s : slots) out.push_back(dual_of(s));
  return out;
}

}  // namespace sessio
