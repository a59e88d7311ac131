#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sessio {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// arrange() called with fewer than one or more than eight slots.
class ArityError : public Error {
 public:
  using Error::Error;
};

// A goto index that does not address a slot of the session environment.
class DanglingGoto : public Error {
 public:
  using Error::Error;
};

class LinearityError : public Error {
 public:
  enum class Kind { reuse, leak };

  LinearityError(Kind kind, std::uint64_t endpoint)
      : Error(std::string(kind == Kind::reuse ? "endpoint #" : "leaked endpoint #") +
              std::to_string(endpoint) +
              (kind == Kind::reuse ? " used more than once" : " was never used")),
        kind_(kind),
        endpoint_(endpoint) {}

  Kind kind() const noexcept { return kind_; }
  std::uint64_t endpoint() const noexcept { return endpoint_; }

 private:
  Kind kind_;
  std::uint64_t endpoint_;
};

// The transport under an endpoint was torn down (canceller, CANCEL frame,
// disconnect, or an abandoned peer).
class SessionCancelled : public Error {
 public:
  SessionCancelled() : Error("session cancelled") {}
  explicit SessionCancelled(const std::string& why) : Error("session cancelled: " + why) {}
};

class SpawnError : public Error {
 public:
  using Error::Error;
};

// A transferred or announced shape disagrees with the statically expected one.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// The peer sent a message of the wrong kind for the current protocol step.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

// Delegation over a transport that cannot carry endpoints (TCP).
class UnsupportedTransfer : public Error {
 public:
  UnsupportedTransfer() : Error("endpoint transfer is not supported on this transport") {}
};

class CodecError : public Error {
 public:
  using Error::Error;
};

class FrameError : public Error {
 public:
  using Error::Error;
};

class BindError : public Error {
 public:
  using Error::Error;
};

class ConnectError : public Error {
 public:
  using Error::Error;
};

class HandshakeMismatch : public Error {
 public:
  using Error::Error;
};

class CancellerDisposed : public Error {
 public:
  CancellerDisposed() : Error("session canceller already disposed") {}
};

}  // namespace sessio
