#pragma once

// TCP transport.
//
// A connection starts with a handshake: the connecting side sends HELLO
// carrying the rendering of the environment it expects its peer to run,
// the listening side compares it with its own and answers HELLO with the
// rendering it expects in turn, or CANCEL on mismatch. After that, each
// endpoint operation maps to one frame. Both sides must use the same codec.
// Delegation is not available over TCP.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>

#include "sessio/codec.hpp"
#include "sessio/detail/activity.hpp"
#include "sessio/detail/port.hpp"
#include "sessio/error.hpp"
#include "sessio/net/frame.hpp"
#include "sessio/protocol.hpp"
#include "sessio/session.hpp"

namespace sessio::net {

struct Address {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  // Accepts "host:port", ":port" or "port". An empty host or "*" means
  // every interface.
  static Address parse(std::string_view text) {
    Address a;
    const auto colon = text.rfind(':');
    std::string_view port = text;
    if (colon != std::string_view::npos) {
      a.host = std::string(text.substr(0, colon));
      port = text.substr(colon + 1);
    }
    if (a.host.empty() || a.host == "*") a.host = "0.0.0.0";
    unsigned value = 0;
    const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc() || end != port.data() + port.size() || value > 65535) {
      throw std::invalid_argument("bad address: " + std::string(text));
    }
    a.port = static_cast<std::uint16_t>(value);
    return a;
  }

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

inline constexpr auto handshake_timeout = std::chrono::seconds(5);

namespace detail {

using sessio::detail::Mailbox;
using sessio::detail::Message;

inline std::string errno_text() { return std::strerror(errno); }

inline sockaddr_in resolve(const Address& a) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(a.port);
  if (::inet_pton(AF_INET, a.host.c_str(), &sa.sin_addr) == 1) return sa;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (::getaddrinfo(a.host.c_str(), nullptr, &hints, &found) != 0 || found == nullptr) {
    throw ConnectError("cannot resolve " + a.host);
  }
  sa.sin_addr = reinterpret_cast<sockaddr_in*>(found->ai_addr)->sin_addr;
  ::freeaddrinfo(found);
  return sa;
}

inline void set_receive_timeout(int fd, std::chrono::milliseconds t) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(t.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((t.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

inline Bytes text_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }
inline std::string bytes_text(const Bytes& b) { return std::string(b.begin(), b.end()); }

class TcpPort final : public sessio::detail::Port {
 public:
  TcpPort(int fd, Codec codec) : Port(sessio::detail::next_session_id()), fd_(fd), codec_(std::move(codec)) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpPort() override { ::close(fd_); }

  void start_reader() {
    auto self = std::static_pointer_cast<TcpPort>(shared_from_this());
    sessio::detail::spawn([self] { self->read_loop(); });
  }

  bool supports_transfer() const override { return false; }
  const Codec* codec() const override { return &codec_; }

 protected:
  Mailbox& inbox() override { return in_; }
  const Mailbox& inbox() const override { return in_; }

  void do_post(Message m) override {
    Frame f;
    switch (m.kind) {
      case Message::Kind::value:
        if (m.encode == nullptr) throw CodecError("payload has no wire mapping");
        f = Frame{Tag::value, m.encode(m.boxed, codec_)};
        break;
      case Message::Kind::left: f.tag = Tag::label_left; break;
      case Message::Kind::right: f.tag = Tag::label_right; break;
      case Message::Kind::transfer: throw UnsupportedTransfer();
    }
    write(f);
  }

  void do_close() override {
    write(Frame{Tag::close, {}});
    ::shutdown(fd_, SHUT_WR);
  }

  void do_cancel(const std::string& reason) override {
    in_.cancel(reason);
    {
      std::unique_lock lock(write_mu_, std::try_to_lock);
      if (lock.owns_lock()) {
        try {
          write_frame(fd_, Frame{Tag::cancel, {}});
        } catch (const FrameError&) {
        }
      }
    }
    ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  void write(const Frame& f) {
    bool lost = false;
    {
      std::lock_guard lock(write_mu_);
      try {
        write_frame(fd_, f);
      } catch (const FrameError&) {
        lost = true;
      }
    }
    if (lost) {
      cancel("connection lost");
      throw SessionCancelled("connection lost");
    }
  }

  void read_loop() {
    bool peer_closed = false;
    try {
      for (;;) {
        auto f = read_frame(fd_);
        if (!f) {
          if (!peer_closed) in_.cancel("connection lost");
          return;
        }
        switch (f->tag) {
          case Tag::value: {
            Message m;
            m.kind = Message::Kind::value;
            m.wire = std::move(f->payload);
            in_.deliver(std::move(m));
            break;
          }
          case Tag::label_left: in_.deliver(Message::label(true)); break;
          case Tag::label_right: in_.deliver(Message::label(false)); break;
          case Tag::close:
            peer_closed = true;
            in_.peer_close();
            break;
          case Tag::cancel:
            in_.cancel("peer cancelled the session");
            ::shutdown(fd_, SHUT_RDWR);
            return;
          case Tag::hello:
            cancel("unexpected hello frame");
            return;
        }
      }
    } catch (const FrameError&) {
      in_.cancel("connection lost");
    } catch (const SessionCancelled&) {
    }
  }

  int fd_;
  Codec codec_;
  Mailbox in_;
  std::mutex write_mu_;
};

template <class S, class E>
std::shared_ptr<TcpPort> open_port(int fd, Codec codec, const char* side) {
  auto port = std::make_shared<TcpPort>(fd, std::move(codec));
  port->set_trace(sessio::detail::open_trace(port->session(), {side, shape_of<S>(), env_shapes_of<E>()}));
  return port;
}

// Start shape and environment of each side of a witness.
template <class W>
struct sides;
template <class S, class T>
struct sides<Dual<S, T>> {
  using mine = S;
  using mine_env = Env<S>;
  using theirs = T;
  using theirs_env = Env<T>;
};
template <class SS, class TT>
struct sides<DualEnv<SS, TT>> {
  using mine = typename DualEnv<SS, TT>::first_mine;
  using mine_env = SS;
  using theirs = typename DualEnv<SS, TT>::first_theirs;
  using theirs_env = TT;
};

struct ListenerState {
  int fd = -1;
  std::uint16_t port = 0;
  std::atomic<bool> stopping{false};
  std::atomic<std::uint64_t> refused{0};
  std::atomic<std::uint64_t> accepted{0};
  ~ListenerState() {
    if (fd >= 0) ::close(fd);
  }
};

template <class E>
std::string hello_of() {
  return render_env(env_shapes_of<E>());
}

}  // namespace detail

// Accepts connections on a background activity until destroyed or stopped.
class Listener {
 public:
  Listener() = default;
  explicit Listener(std::shared_ptr<detail::ListenerState> state) : state_(std::move(state)) {}
  Listener(Listener&&) noexcept = default;
  Listener& operator=(Listener&& other) noexcept {
    if (this != &other) {
      stop();
      state_ = std::move(other.state_);
    }
    return *this;
  }
  ~Listener() { stop(); }

  std::uint16_t port() const noexcept { return state_ ? state_->port : 0; }
  // Connections refused at the handshake so far.
  std::uint64_t refused() const noexcept { return state_ ? state_->refused.load() : 0; }
  std::uint64_t accepted() const noexcept { return state_ ? state_->accepted.load() : 0; }

  void stop() {
    if (!state_) return;
    if (!state_->stopping.exchange(true)) ::shutdown(state_->fd, SHUT_RDWR);
    state_.reset();
  }

 private:
  using State = detail::ListenerState;

  std::shared_ptr<State> state_;
};

// Serves `body` with the server end of every connection whose handshake
// succeeds. Each connection runs on its own activity.
template <class W, class F>
Listener listen(const W&, const Address& address, F&& body, Codec codec = Codec::json()) {
  using Sides = detail::sides<W>;
  using T = typename Sides::theirs;
  using TE = typename Sides::theirs_env;
  static_assert(std::is_invocable_v<std::decay_t<F>&, Session<T, TE>>, "body must accept the server endpoint");

  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw BindError("socket: " + detail::errno_text());
  auto state = std::make_shared<detail::ListenerState>();
  state->fd = fd;
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in sa{};
  try {
    sa = detail::resolve(address);
  } catch (const ConnectError& e) {
    throw BindError(e.what());
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
    throw BindError("bind " + address.to_string() + ": " + detail::errno_text());
  }
  if (::listen(fd, 64) != 0) throw BindError("listen: " + detail::errno_text());
  socklen_t len = sizeof sa;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len);
  state->port = ntohs(sa.sin_port);

  auto shared_body = std::make_shared<std::decay_t<F>>(std::forward<F>(body));
  sessio::detail::spawn([state, shared_body, codec = std::move(codec)] {
    const auto expected = detail::hello_of<TE>();
    const auto reply = detail::hello_of<typename Sides::mine_env>();
    while (!state->stopping) {
      const int conn = ::accept4(state->fd, nullptr, nullptr, SOCK_CLOEXEC);
      if (conn < 0) {
        if (errno == EINTR || errno == ECONNABORTED) continue;
        return;
      }
      sessio::detail::spawn([state, shared_body, codec, conn, expected, reply] {
        try {
          detail::set_receive_timeout(conn, handshake_timeout);
          auto hello = read_frame(conn);
          if (!hello || hello->tag != Tag::hello || detail::bytes_text(hello->payload) != expected) {
            try {
              write_frame(conn, Frame{Tag::cancel, {}});
            } catch (const FrameError&) {
            }
            ::close(conn);
            diagnostics::warn("refused connection: handshake mismatch");
            ++state->refused;
            return;
          }
          write_frame(conn, Frame{Tag::hello, detail::text_bytes(reply)});
          detail::set_receive_timeout(conn, std::chrono::milliseconds(0));
        } catch (const FrameError& e) {
          ::close(conn);
          diagnostics::warn(std::string("handshake failed: ") + e.what());
          ++state->refused;
          return;
        }
        ++state->accepted;
        auto port = detail::open_port<T, TE>(conn, codec, "server");
        port->start_reader();
        (*shared_body)(sessio::detail::session_access::make<T, TE>(std::move(port)));
      });
    }
  });

  return Listener(std::move(state));
}

// Connects and handshakes; returns the client end.
template <class W>
auto connect(const W&, const Address& address, Codec codec = Codec::json()) {
  using Sides = detail::sides<W>;
  using S = typename Sides::mine;
  using SE = typename Sides::mine_env;

  const auto sa = detail::resolve(address);
  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw ConnectError("socket: " + detail::errno_text());
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0) {
    const auto why = detail::errno_text();
    ::close(fd);
    throw ConnectError("connect " + address.to_string() + ": " + why);
  }
  try {
    detail::set_receive_timeout(fd, handshake_timeout);
    write_frame(fd, Frame{Tag::hello, detail::text_bytes(detail::hello_of<typename Sides::theirs_env>())});
    auto reply = read_frame(fd);
    if (!reply) throw ConnectError("connection closed during handshake");
    if (reply->tag == Tag::cancel) throw HandshakeMismatch("peer refused the protocol");
    if (reply->tag != Tag::hello || detail::bytes_text(reply->payload) != detail::hello_of<SE>()) {
      try {
        write_frame(fd, Frame{Tag::cancel, {}});
      } catch (const FrameError&) {
      }
      throw HandshakeMismatch("peer runs " + detail::bytes_text(reply->payload));
    }
    detail::set_receive_timeout(fd, std::chrono::milliseconds(0));
  } catch (const FrameError& e) {
    ::close(fd);
    throw ConnectError(std::string("handshake failed: ") + e.what());
  } catch (...) {
    ::close(fd);
    throw;
  }
  auto port = detail::open_port<S, SE>(fd, std::move(codec), "client");
  port->start_reader();
  return sessio::detail::session_access::make<S, SE>(std::move(port));
}

}  // namespace sessio::net
