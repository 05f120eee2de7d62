#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "rlcycle/wire/framing.hpp"
#include "rlcycle/wire/message.hpp"

namespace rlcycle::wire {

class PortInUse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SocketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Owning file descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release();
  void close();
  // Wakes up any thread blocked on this socket.
  void shutdown();

 private:
  int fd_ = -1;
};

class Listener {
 public:
  // Port 0 picks an ephemeral port. Throws PortInUse if the port is taken.
  Listener(const std::string& host, std::uint16_t port);

  std::uint16_t port() const { return port_; }
  // Waits up to `timeout` for a client.
  std::optional<Socket> accept(std::chrono::milliseconds timeout);
  void close() { socket_.close(); }

 private:
  Socket socket_;
  std::uint16_t port_ = 0;
};

// Throws SocketError if nobody is listening.
Socket connect_to(const std::string& host, std::uint16_t port);

enum class ReadStatus { kFrame, kTimeout, kClosed };

struct ReadResult {
  ReadStatus status = ReadStatus::kClosed;
  std::string payload;
};

// A framed message stream. Sends may come from several threads; reads are
// expected from one.
class Connection {
 public:
  explicit Connection(Socket socket);

  // False once the peer is gone.
  bool send(const WireMessage& msg);
  bool send_raw(std::string_view bytes);
  ReadResult read_frame(std::chrono::milliseconds timeout);
  // Like read_frame, plus decoding. Throws ParseError / UnknownMessageType.
  std::optional<WireMessage> receive(std::chrono::milliseconds timeout, bool* closed);

  void shutdown() { socket_.shutdown(); }
  bool open() const { return open_; }

 private:
  Socket socket_;
  FrameReader reader_;
  std::mutex write_mutex_;
  std::atomic<bool> open_{true};
};

}  // namespace rlcycle::wire
