// Command-line driver for the example programs.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "sessio/apps/clip.hpp"
#include "sessio/apps/downloader.hpp"
#include "sessio/apps/miner.hpp"
#include "sessio/apps/tak.hpp"
#include "sessio/apps/travel.hpp"
#include "sessio/codec.hpp"
#include "sessio/error.hpp"

namespace {

using namespace sessio;
using namespace sessio::apps;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

[[noreturn]] void serve_forever() {
  for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Session-typed channel examples"};
  app.require_subcommand(1);

  auto* tak = app.add_subcommand("tak", "cancellable Takeuchi function with a timeout");
  int x = 16, y = 3, z = 2;
  unsigned timeout_ms = 10000;
  tak->add_option("--x", x);
  tak->add_option("--y", y);
  tak->add_option("--z", z);
  tak->add_option("--timeout-ms", timeout_ms)->check(CLI::PositiveNumber);

  auto* miner = app.add_subcommand("miner", "parallel proof-of-work search");
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint32_t difficulty = 16;
  std::string blocks_file;
  miner->add_option("--threads", threads)->check(CLI::PositiveNumber);
  miner->add_option("--difficulty", difficulty)->check(CLI::Range(0, 32));
  miner->add_option("--blocks-file", blocks_file, "hex header per line (default: two sample blocks)");

  auto* clip = app.add_subcommand("clip", "polygon clipping pipeline");
  std::string subject_file, clipper_file;
  clip->add_option("--subject-file", subject_file)->required();
  clip->add_option("--clipper-file", clipper_file)->required();

  auto* fetch = app.add_subcommand("fetch", "parallel HTTP downloader");
  std::string urls_file;
  unsigned workers = 4;
  fetch->add_option("--urls-file", urls_file)->required();
  fetch->add_option("--workers", workers)->check(CLI::PositiveNumber);

  auto* travel = app.add_subcommand("travel", "travel agency over TCP");
  std::string role, listen_at, peer, dest = "Lisbon";
  unsigned rejections = 0, delay_ms = 0;
  bool quit = false;
  travel->add_option("--role", role)->required()->check(CLI::IsMember({"customer", "agency", "airline"}));
  travel->add_option("--listen", listen_at, "host:port to serve on")->envname("SESSIO_BIND");
  travel->add_option("--peer", peer, "host:port to connect to")->envname("SESSIO_PEER");
  travel->add_option("--dest", dest);
  travel->add_option("--rejections", rejections, "customer: quotes to reject before deciding");
  travel->add_flag("--quit", quit, "customer: reject the last quote too and quit");
  travel->add_option("--delay-ms", delay_ms, "airline: hold each booking this long");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tak) {
      const auto r = run_tak(x, y, z, std::chrono::milliseconds(timeout_ms));
      if (r.value) {
        std::cout << "tak(" << x << "," << y << "," << z << ") = " << *r.value << "\n";
      } else {
        std::cout << "Cancelled\n";
      }
    } else if (*miner) {
      const auto blocks = blocks_file.empty() ? sample_blocks(2, difficulty) : parse_blocks(slurp(blocks_file), difficulty);
      const auto report = run_miner(threads, blocks);
      for (std::size_t i = 0; i < report.mined.size(); ++i) {
        const auto& m = report.mined[i];
        std::cout << "block " << i << " nonce " << m.nonce << " hash "
                  << sessio::detail::to_hex(block_hash(m.block.header, m.nonce)) << "\n";
      }
    } else if (*clip) {
      const auto result = run_clip(parse_polygon(slurp(subject_file)), parse_polygon(slurp(clipper_file)));
      std::cout.precision(17);
      for (const auto& v : result) std::cout << v.x << " " << v.y << "\n";
    } else if (*fetch) {
      const auto results = run_downloader(lines_of(slurp(urls_file)), workers);
      for (const auto& r : results) {
        if (r.body) {
          std::cout << r.url << " " << r.body->size() << " bytes\n";
        } else {
          std::cout << r.url << " failed\n";
        }
      }
    } else if (*travel) {
      if (role == "airline") {
        auto l = start_airline(net::Address::parse(listen_at.empty() ? "127.0.0.1:9999" : listen_at),
                               std::chrono::milliseconds(delay_ms));
        std::cout << "airline listening on " << l.port() << std::endl;
        serve_forever();
      } else if (role == "agency") {
        auto l = start_agency(net::Address::parse(listen_at.empty() ? "127.0.0.1:8888" : listen_at),
                              net::Address::parse(peer.empty() ? "127.0.0.1:9999" : peer));
        std::cout << "agency listening on " << l.port() << std::endl;
        serve_forever();
      } else {
        try {
          const auto r = run_customer(net::Address::parse(peer.empty() ? "127.0.0.1:8888" : peer), dest, rejections, !quit);
          for (const auto& q : r.quotes) std::cout << "quote " << q.to_string() << "\n";
          std::cout << (r.date ? "date " + *r.date : std::string("quit")) << "\n";
        } catch (const SessionCancelled& e) {
          std::cout << "cancelled: " << e.what() << "\n";
          return 2;
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "sessio: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
