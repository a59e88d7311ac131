#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sessio/payload.hpp"
#include "sessio/protocol.hpp"

namespace sessio::apps {

// Returns the body, or nullopt on any failure. May also throw; a throwing
// fetch counts as a failure.
using Fetcher = std::function<std::optional<Bytes>(const std::string& url)>;

// Plain HTTP GET ("http://host[:port]/path"). Non-2xx statuses fail.
std::optional<Bytes> http_fetch(const std::string& url);

// Client view of one worker: hand it a URL and get the body back, or stop it.
inline constexpr auto downloader_protocol = [] {
  using namespace combinators;
  return select(send(val<std::string>, recv(val<std::optional<Bytes>>, goto0)), end);
}();

struct FetchResult {
  std::string url;
  std::optional<Bytes> body;
};

// Results come back in URL order. Each URL goes to whichever worker frees
// up first; workers without work are stopped straight away.
std::vector<FetchResult> run_downloader(const std::vector<std::string>& urls, unsigned workers,
                                        Fetcher fetcher = http_fetch);

}  // namespace sessio::apps
