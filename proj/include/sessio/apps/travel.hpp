#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "sessio/net/tcp.hpp"
#include "sessio/payload.hpp"
#include "sessio/protocol.hpp"

namespace sessio::apps {

// Customer to agency: ask for a quote on a destination, then accept it and
// receive the travel date, or reject it and start over; or quit.
inline constexpr auto customer_agency_protocol = [] {
  using namespace combinators;
  return select(send(val<std::string>, recv(val<Decimal>, select(recv(val<std::string>, end), goto0))), end);
}();

// Agency to airline: book the destination, receive the date.
inline constexpr auto agency_airline_protocol = [] {
  using namespace combinators;
  return send(val<std::string>, recv(val<std::string>, end));
}();

inline const Decimal quoted_price = Decimal::parse("90.00");

// Date the airline books for a destination.
std::string booking_date(const std::string& dest);

// `delay` holds each booking before answering.
net::Listener start_airline(const net::Address& bind, std::chrono::milliseconds delay = {});

// Serves customers; on acceptance books with the airline at `airline`.
// If either connection fails, the other one is torn down too.
net::Listener start_agency(const net::Address& bind, const net::Address& airline);

struct CustomerReport {
  std::vector<Decimal> quotes;
  std::optional<std::string> date;  // empty when the customer quit
};

// Asks for `rejections + 1` quotes, rejecting all but the last. With
// `accept` false the last quote is rejected as well and the customer quits.
CustomerReport run_customer(const net::Address& agency, const std::string& dest, unsigned rejections = 0,
                            bool accept = true);

}  // namespace sessio::apps
