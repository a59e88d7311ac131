#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

#include "sessio/error.hpp"
#include "sessio/protocol.hpp"
#include "sessio/token.hpp"

namespace sessio::apps {

// Raised inside the cancellable computation once its token has completed.
class Cancelled : public Error {
 public:
  Cancelled() : Error("computation cancelled") {}
};

// Takeuchi function, plain recursion.
int tarai(int a, int b, int c);

// Same recursion, but every call first checks `cancel` and throws
// Cancelled once it has completed.
int tarai(int a, int b, int c, const CompletionToken<Unit>& cancel);

// Client view: send the arguments, hand over a cancellation channel, then
// either receive the result or learn that the server gave up.
inline constexpr auto tak_protocol = [] {
  using namespace combinators;
  return send(val<IntTriple>, deleg(recv(val<Unit>, end), offer(recv(val<int>, end), end)));
}();

struct TakReport {
  std::optional<int> value;  // empty when cancelled
  bool dummy_cancel_sent = false;
  std::chrono::milliseconds elapsed{0};

  bool cancelled() const noexcept { return !value.has_value(); }
};

// Runs a tak server on its own activity and a client that cancels after
// `timeout`. When the result wins, the cancellation is still sent (and
// ignored by the server) so that the channel is used up.
TakReport run_tak(int x, int y, int z, std::chrono::milliseconds timeout);

}  // namespace sessio::apps
