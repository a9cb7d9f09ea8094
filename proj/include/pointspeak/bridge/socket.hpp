#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace pointspeak::bridge {

class SocketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Owning TCP stream socket.
class TcpStream {
 public:
  TcpStream() = default;
  explicit TcpStream(int fd) : fd_(fd) {}
  ~TcpStream();
  TcpStream(TcpStream&& other) noexcept;
  TcpStream& operator=(TcpStream&& other) noexcept;
  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;

  static TcpStream connect(const std::string& host, int port, double timeout_s = 2.0);

  bool valid() const { return fd_ >= 0; }
  void write_all(std::span<const std::uint8_t> bytes);
  // Blocks up to timeout_s; returns 0 on timeout, throws on EOF or error.
  std::size_t read_some(std::span<std::uint8_t> buf, double timeout_s);
  // Unblocks readers in other threads.
  void shutdown();
  void close();

 private:
  int fd_ = -1;
};

class TcpListener {
 public:
  TcpListener() = default;
  ~TcpListener();
  TcpListener(TcpListener&& other) noexcept;
  TcpListener& operator=(TcpListener&& other) noexcept;
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  // port 0 picks a free port.
  static TcpListener bind(const std::string& host, int port);

  int port() const { return port_; }
  // Waits up to timeout_s for a connection; returns an invalid stream on timeout.
  TcpStream accept(double timeout_s);
  void close();

 private:
  int fd_ = -1;
  int port_ = 0;
};

class ConnectionClosed : public SocketError {
 public:
  ConnectionClosed() : SocketError("connection closed by peer") {}
};

}  // namespace pointspeak::bridge
