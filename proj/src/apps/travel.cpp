#include "sessio/apps/travel.hpp"

#include <thread>

#include "sessio/net/canceller.hpp"

namespace sessio::apps {

std::string booking_date(const std::string& dest) {
  unsigned h = 0;
  for (unsigned char c : dest) h = h * 31 + c;
  const unsigned month = 1 + h % 12;
  const unsigned day = 1 + (h / 12) % 28;
  std::string out = "2027-";
  out += (month < 10 ? "0" : "") + std::to_string(month) + "-";
  out += (day < 10 ? "0" : "") + std::to_string(day);
  return out;
}

net::Listener start_airline(const net::Address& bind, std::chrono::milliseconds delay) {
  return net::listen(agency_airline_protocol, bind, [delay](auto ch) {
    auto [dest, ch2] = ch.receive();
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    ch2.send(booking_date(dest)).close();
  });
}

net::Listener start_agency(const net::Address& bind, const net::Address& airline) {
  return net::listen(customer_agency_protocol, bind, [airline](auto srv) {
    SessionCanceller c;
    c.add(srv);
    for (bool loop = true; loop;) {
      srv.offer(
          [&](auto quote) {
            auto [dest, reply] = quote.receive();
            reply.send(quoted_price)
                .offer(
                    [&](auto accept) {
                      auto cli = net::connect(agency_airline_protocol, airline);
                      c.add(cli);
                      auto [date, done] = cli.send(dest).receive();
                      done.close();
                      accept.send(date).close();
                      loop = false;
                    },
                    [&](auto reject) { srv = reject.jump(); });
          },
          [&](auto quit) {
            quit.close();
            loop = false;
          });
    }
  });
}

CustomerReport run_customer(const net::Address& agency, const std::string& dest, unsigned rejections, bool accept) {
  CustomerReport report;
  auto ch = net::connect(customer_agency_protocol, agency);
  for (unsigned i = 0;; ++i) {
    auto [price, decide] = ch.select_left().send(dest).receive();
    report.quotes.push_back(price);
    if (i == rejections && accept) {
      auto [date, done] = decide.select_left().receive();
      done.close();
      report.date = date;
      return report;
    }
    ch = decide.select_right().jump();
    if (i == rejections) break;
  }
  ch.select_right().close();
  return report;
}

}  // namespace sessio::apps
