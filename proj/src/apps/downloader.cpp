#include "sessio/apps/downloader.hpp"

#include <httplib.h>

#include <stdexcept>

#include "sessio/apps/parallel.hpp"
#include "sessio/runtime.hpp"

namespace sessio::apps {

std::optional<Bytes> http_fetch(const std::string& url) {
  static const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) return std::nullopt;
  const auto slash = url.find('/', scheme.size());
  const auto authority = url.substr(scheme.size(), slash == std::string::npos ? std::string::npos : slash - scheme.size());
  const auto path = slash == std::string::npos ? std::string("/") : url.substr(slash);
  httplib::Client client(scheme + authority);
  client.set_connection_timeout(5);
  client.set_read_timeout(10);
  auto res = client.Get(path);
  if (!res || res->status < 200 || res->status >= 300) return std::nullopt;
  return Bytes(res->body.begin(), res->body.end());
}

std::vector<FetchResult> run_downloader(const std::vector<std::string>& urls, unsigned workers, Fetcher fetcher) {
  if (workers == 0) throw std::invalid_argument("downloader needs at least one worker");

  auto heads = parallel(downloader_protocol, static_cast<std::size_t>(workers), [fetcher](auto server) {
    auto ch = std::move(server);
    for (bool loop = true; loop;) {
      ch.offer(
          [&](auto job) {
            auto [url, ch2] = job.receive();
            std::optional<Bytes> data;
            try {
              data = fetcher(url);
            } catch (...) {
              data.reset();
            }
            ch = ch2.send(std::move(data)).jump();
          },
          [&](auto stop) {
            stop.close();
            loop = false;
          });
    }
  });

  using Head = typename decltype(heads)::value_type;
  using Busy = decltype(std::declval<Head>().select_left().send(std::string()).receive_async().second);
  struct Working {
    std::size_t index;
    CompletionToken<std::optional<Bytes>> data;
    Busy rest;
  };

  std::vector<FetchResult> results(urls.size());
  std::vector<Working> working;
  std::vector<CompletionToken<std::optional<Bytes>>> tokens;

  auto dispatch = [&](Head head, std::size_t index) {
    results[index].url = urls[index];
    auto [data, rest] = head.select_left().send(urls[index]).receive_async();
    tokens.push_back(data);
    working.push_back({index, std::move(data), std::move(rest)});
  };
  auto finish = [&](std::size_t slot) {
    auto w = std::move(working[slot]);
    working.erase(working.begin() + static_cast<std::ptrdiff_t>(slot));
    tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(slot));
    results[w.index].body = w.data.take();
    return w.rest.jump();
  };

  std::size_t next = 0;
  for (auto& head : heads) {
    if (next < urls.size()) {
      dispatch(std::move(head), next++);
    } else {
      head.select_right().close();
    }
  }
  while (next < urls.size()) {
    const auto slot = when_any(tokens);
    dispatch(finish(slot), next++);
  }
  while (!working.empty()) {
    const auto slot = when_any(tokens);
    finish(slot).select_right().close();
  }
  return results;
}

}  // namespace sessio::apps
