#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sessio/error.hpp"
#include "sessio/shape.hpp"

namespace sessio {

inline constexpr std::size_t max_env_arity = 8;

// A pair of shapes that are dual by construction. The only way to obtain one
// is through the factories below, each of which mirrors one combinator and
// assembles both halves side by side.
class DualWitness {
 public:
  static DualWitness end() { return {Shape::end(), Shape::end()}; }
  static DualWitness goto0() { return jump(0); }
  // goto<i> with i >= 1 addresses an arrange() slot; such witnesses are only
  // meaningful inside arrange().
  static DualWitness jump(std::size_t index) { return {Shape::jump(index), Shape::jump(index)}; }

  static DualWitness send(PayloadDescriptor v, const DualWitness& p) {
    return {Shape::send(v, p.mine_), Shape::recv(v, p.theirs_)};
  }
  static DualWitness recv(PayloadDescriptor v, const DualWitness& p) {
    return {Shape::recv(v, p.mine_), Shape::send(v, p.theirs_)};
  }
  static DualWitness select(const DualWitness& l, const DualWitness& r) {
    return {Shape::select(l.mine_, r.mine_), Shape::offer(l.theirs_, r.theirs_)};
  }
  static DualWitness offer(const DualWitness& l, const DualWitness& r) {
    return {Shape::offer(l.mine_, r.mine_), Shape::select(l.theirs_, r.theirs_)};
  }
  static DualWitness deleg(const DualWitness& carried, const DualWitness& p) {
    return {Shape::deleg(carried.mine_, carried.theirs_, p.mine_), Shape::deleg_recv(carried.mine_, p.theirs_)};
  }
  static DualWitness deleg_recv(const DualWitness& carried, const DualWitness& p) {
    return {Shape::deleg_recv(carried.mine_, p.mine_), Shape::deleg(carried.mine_, carried.theirs_, p.theirs_)};
  }

  const Shape& mine() const noexcept { return mine_; }
  const Shape& theirs() const noexcept { return theirs_; }

  // True when no goto<i>, i >= 1, occurs outside carried shapes.
  bool closed() const { return mine_.max_jump() == 0; }

 private:
  template <class S, class T>
  friend class Dual;

  DualWitness(Shape mine, Shape theirs) : mine_(std::move(mine)), theirs_(std::move(theirs)) {}

  Shape mine_;
  Shape theirs_;
};

// Pointwise-dual shape lists forming a session environment.
class EnvDualWitness {
 public:
  // Slot i (0-based) is addressed by goto<i+1>. goto<0> is rejected inside an
  // environment, as is any index beyond the arity.
  static EnvDualWitness arrange(std::span<const DualWitness> slots) {
    if (slots.empty() || slots.size() > max_env_arity) {
      throw ArityError("arrange: arity " + std::to_string(slots.size()) + " outside 1.." +
                       std::to_string(max_env_arity));
    }
    EnvDualWitness out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const auto& w = slots[i];
      if (w.mine().uses_jump(0)) {
        throw DanglingGoto("arrange: slot " + std::to_string(i + 1) + " uses goto<0>");
      }
      if (w.mine().max_jump() > slots.size()) {
        throw DanglingGoto("arrange: slot " + std::to_string(i + 1) + " jumps to goto<" +
                           std::to_string(w.mine().max_jump()) + "> beyond arity " +
                           std::to_string(slots.size()));
      }
      out.mine_.push_back(w.mine());
      out.theirs_.push_back(w.theirs());
    }
    return out;
  }
  static EnvDualWitness arrange(std::initializer_list<DualWitness> slots) {
    return arrange(std::span<const DualWitness>(slots.begin(), slots.size()));
  }

  const std::vector<Shape>& mine() const noexcept { return mine_; }
  const std::vector<Shape>& theirs() const noexcept { return theirs_; }
  std::size_t size() const noexcept { return mine_.size(); }

 private:
  EnvDualWitness() = default;

  std::vector<Shape> mine_;
  std::vector<Shape> theirs_;
};

}  // namespace sessio
