#include <gtest/gtest.h>

#include "sessio/apps/tak.hpp"
#include "support.hpp"

using namespace sessio;
using namespace sessio::combinators;

namespace {

const Shape& tak_client() { return decltype(apps::tak_protocol)::mine(); }

std::vector<Shape> single(const Shape& s) { return {s}; }

}  // namespace

TEST(Trace, CsvRoundTrip) {
  const std::vector<TraceEvent> events = {{Direction::out, Variant::value, "int3"},
                                          {Direction::out, Variant::deleg, ""},
                                          {Direction::in, Variant::left, ""},
                                          {Direction::in, Variant::value, "int"},
                                          {Direction::out, Variant::close, ""}};
  const auto text = to_csv(events);
  EXPECT_EQ(text, "out,value,int3\nout,deleg,\nin,left,\nin,value,int\nout,close,\n");
  EXPECT_EQ(parse_trace(text), events);
  EXPECT_THROW(parse_trace_line("sideways,value,int"), std::invalid_argument);
  EXPECT_THROW(parse_trace_line("out,value"), std::invalid_argument);
}

TEST(Trace, AcceptsBothTakBranches) {
  const auto env = single(tak_client());
  EXPECT_TRUE(check_trace(tak_client(), env, parse_trace("out,value,int3\nout,deleg,\nin,left,\nin,value,int\nout,close,\n")));
  EXPECT_TRUE(check_trace(tak_client(), env, parse_trace("out,value,int3\nout,deleg,\nin,right,\nout,close,\n")));
}

TEST(Trace, RejectsDeviations) {
  const auto env = single(tak_client());
  EXPECT_FALSE(check_trace(tak_client(), env, parse_trace("out,value,int\nout,deleg,\nin,right,\nout,close,\n")));
  EXPECT_FALSE(check_trace(tak_client(), env, parse_trace("out,value,int3\nout,deleg,\nin,right,\n")));
  EXPECT_FALSE(check_trace(tak_client(), env, parse_trace("out,value,int3\nin,deleg,\nin,right,\nout,close,\n")));
  EXPECT_FALSE(check_trace(tak_client(), env,
                           parse_trace("out,value,int3\nout,deleg,\nin,right,\nout,close,\nout,close,\n")));
  const auto v = check_trace(tak_client(), env, parse_trace("out,value,int3\nout,left,\n"));
  EXPECT_EQ(v.consumed, 1u);
  EXPECT_FALSE(v.reason.empty());
}

TEST(Trace, ResolvesGotosThroughTheEnvironment) {
  constexpr auto w = arrange(send(val<int>, goto2), recv(val<int>, select(goto1, end)));
  const auto& env = decltype(w)::mine();
  EXPECT_TRUE(check_trace(env[0], env, parse_trace("out,value,int\nin,value,int\nout,left,\nout,value,int\nin,value,int\nout,right,\nout,close,\n")));
  EXPECT_FALSE(check_trace(env[0], env, parse_trace("out,value,int\nout,value,int\n")));
}

TEST(Trace, RecordsLiveSessions) {
  TraceScope scope;
  constexpr auto w = select(send(val<int>, goto0), end);
  auto c = fork_thread(w, [](auto s) {
    auto cur = std::move(s);
    for (bool loop = true; loop;) {
      cur.offer(
          [&](auto more) { cur = more.receive().second.jump(); },
          [&](auto stop) {
            stop.close();
            loop = false;
          });
    }
  });
  for (int i = 0; i < 3; ++i) c = c.select_left().send(i).jump();
  c.select_right().close();
  ASSERT_TRUE(wait_idle(std::chrono::seconds(5)));

  const auto logs = scope.logs();
  ASSERT_EQ(logs.size(), 2u);
  for (const auto& log : logs) {
    const auto verdict = check_trace(*log);
    EXPECT_TRUE(verdict) << log->side() << ": " << verdict.reason << "\n" << to_csv(log->events());
    EXPECT_EQ(log->events().size(), 3u * 2 + 2);
  }
}
