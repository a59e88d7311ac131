#include "sessio/apps/tak.hpp"

#include <condition_variable>
#include <mutex>

#include "sessio/runtime.hpp"

namespace sessio::apps {

int tarai(int a, int b, int c) {
  if (a <= b) return b;
  return tarai(tarai(a - 1, b, c), tarai(b - 1, c, a), tarai(c - 1, a, b));
}

int tarai(int a, int b, int c, const CompletionToken<Unit>& cancel) {
  if (cancel.is_completed()) throw Cancelled();
  if (a <= b) return b;
  return tarai(tarai(a - 1, b, c, cancel), tarai(b - 1, c, a, cancel), tarai(c - 1, a, b, cancel));
}

TakReport run_tak(int x, int y, int z, std::chrono::milliseconds timeout) {
  const auto start = std::chrono::steady_clock::now();

  auto client = fork_thread(tak_protocol, [](auto server) {
    auto [args, server2] = server.receive();
    auto [cancel_ch, server3] = server2.deleg_recv();
    auto [cancel, done] = cancel_ch.receive_async();
    done.close();
    const auto [a, b, c] = args;
    try {
      const int result = tarai(a, b, c, cancel);
      server3.select_left().send(result).close();
    } catch (const Cancelled&) {
      server3.select_right().close();
    }
  });

  auto [rest, cancel_ch] = client.send(IntTriple{x, y, z}).deleg_new();

  struct Timer {
    std::mutex mu;
    std::condition_variable cv;
    bool answered = false;
  };
  auto timer = std::make_shared<Timer>();
  auto fired = async_task([timer, timeout, cancel_ch = std::move(cancel_ch)]() mutable {
    {
      std::unique_lock lock(timer->mu);
      timer->cv.wait_for(lock, timeout, [&] { return timer->answered; });
    }
    cancel_ch.send().close();
  });

  TakReport report;
  report.value = rest.offer(
      [](auto left) -> std::optional<int> {
        auto [v, done] = left.receive();
        done.close();
        return v;
      },
      [](auto right) -> std::optional<int> {
        right.close();
        return std::nullopt;
      });
  {
    std::lock_guard lock(timer->mu);
    timer->answered = true;
  }
  timer->cv.notify_all();
  fired.wait();
  report.dummy_cancel_sent = report.value.has_value();
  report.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return report;
}

}  // namespace sessio::apps
