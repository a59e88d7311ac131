#include <gtest/gtest.h>

#include <map>
#include <tuple>

#include "sessio/apps/tak.hpp"
#include "support.hpp"

using namespace sessio;
using namespace std::chrono_literals;

namespace {

int closed_form(int x, int y, int z) {
  if (x <= y) return y;
  if (y <= z) return z;
  return x;
}

// Same recursion, memoized. The naive call tree explodes past |args| = 6.
struct MemoTarai {
  std::map<std::tuple<int, int, int>, int> memo;

  int operator()(int a, int b, int c) {
    if (a <= b) return b;
    const auto key = std::tuple(a, b, c);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const int r = (*this)((*this)(a - 1, b, c), (*this)(b - 1, c, a), (*this)(c - 1, a, b));
    memo.emplace(key, r);
    return r;
  }
};

}  // namespace

TEST(Tarai, Examples) {
  EXPECT_EQ(apps::tarai(2, 3, 1), 3);
  EXPECT_EQ(apps::tarai(4, 2, 0), closed_form(4, 2, 0));
  EXPECT_EQ(apps::tarai(4, 2, 0), 4);
  EXPECT_EQ(apps::tarai(16, 3, 2), closed_form(16, 3, 2));
  EXPECT_EQ(apps::tarai(16, 3, 2), 16);
}

TEST(Tarai, ClosedFormOverTheFullGrid) {
  MemoTarai memo;
  for (int x = -8; x <= 8; ++x)
    for (int y = -8; y <= 8; ++y)
      for (int z = -8; z <= 8; ++z) ASSERT_EQ(memo(x, y, z), closed_form(x, y, z)) << x << ' ' << y << ' ' << z;
}

TEST(Tarai, LibraryRecursionMatchesClosedForm) {
  for (int x = -5; x <= 5; ++x)
    for (int y = -5; y <= 5; ++y)
      for (int z = -5; z <= 5; ++z) ASSERT_EQ(apps::tarai(x, y, z), closed_form(x, y, z)) << x << ' ' << y << ' ' << z;
}

TEST(Tarai, CancellableVariant) {
  CompletionSource<Unit> never;
  for (int x = -4; x <= 4; ++x)
    for (int y = -4; y <= 4; ++y)
      for (int z = -4; z <= 4; ++z) ASSERT_EQ(apps::tarai(x, y, z, never.token()), closed_form(x, y, z));

  CompletionSource<Unit> fired;
  fired.set_value(unit);
  EXPECT_THROW(apps::tarai(20, 10, 0, fired.token()), apps::Cancelled);
  EXPECT_THROW(apps::tarai(1, 2, 3, fired.token()), apps::Cancelled);
}

TEST(RunTak, ResultBeatsTimeout) {
  const auto report = apps::run_tak(4, 2, 0, 10s);
  ASSERT_FALSE(report.cancelled());
  EXPECT_EQ(*report.value, closed_form(4, 2, 0));
  EXPECT_TRUE(report.dummy_cancel_sent);
  EXPECT_LT(report.elapsed, 10s);
}

TEST(RunTak, TimeoutCancels) {
  const auto report = apps::run_tak(20, 10, 0, 50ms);
  EXPECT_TRUE(report.cancelled());
  EXPECT_FALSE(report.dummy_cancel_sent);
  EXPECT_LT(report.elapsed, 10s);
}

TEST(RunTak, NoLeaksEitherWay) {
  const auto before = diagnostics::leak_count();
  apps::run_tak(4, 2, 0, 10s);
  apps::run_tak(20, 10, 0, 50ms);
  ASSERT_TRUE(wait_idle(5s));
  EXPECT_EQ(diagnostics::leak_count(), before);
}

TEST(RunTak, TracesFollowTheProtocol) {
  for (const bool cancel : {false, true}) {
    TraceScope scope;
    const auto report = cancel ? apps::run_tak(20, 10, 0, 50ms) : apps::run_tak(4, 2, 0, 10s);
    EXPECT_EQ(report.cancelled(), cancel);
    ASSERT_TRUE(wait_idle(5s));
    const auto logs = scope.logs();
    ASSERT_GE(logs.size(), 2u);
    bool saw_branch = false;
    for (const auto& log : logs) {
      const auto verdict = check_trace(*log);
      EXPECT_TRUE(verdict) << log->side() << ": " << verdict.reason << "\n" << to_csv(log->events());
      for (const auto& e : log->events()) {
        if (e.variant == (cancel ? Variant::right : Variant::left)) saw_branch = true;
      }
    }
    EXPECT_TRUE(saw_branch);
  }
}
