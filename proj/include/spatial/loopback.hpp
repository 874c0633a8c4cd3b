#pragma once

// Sends each envelope over its own TCP connection on 127.0.0.1 and collects
// them concurrently into a Reassembler. Same wire format as the simulator.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "spatial/error.hpp"
#include "spatial/netsim.hpp"
#include "spatial/pipeline.hpp"

namespace spatial {

namespace detail {

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Socket() { reset(); }

  int fd() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }

 private:
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  int fd_ = -1;
};

[[noreturn]] inline void throw_io(const std::string& what) {
  throw Error(Errc::IoFailure, what + ": " + std::strerror(errno));
}

inline std::string read_all(int fd) {
  std::string out;
  char buf[4096];
  while (true) {
    const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

inline void write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw_io("send");
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace detail

/// Transfers all envelopes over concurrent loopback connections and returns
/// the receiver's report.
inline ReceiveReport loopback_transfer(std::span<const StegoEnvelope> envelopes,
                                       const SessionConfig& cfg, const CarrierLayout& layout) {
  detail::Socket listener(::socket(AF_INET, SOCK_STREAM, 0));
  if (!listener) detail::throw_io("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(listener.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    detail::throw_io("bind");
  }
  if (::listen(listener.fd(), static_cast<int>(envelopes.size()) + 1) != 0) {
    detail::throw_io("listen");
  }
  socklen_t len = sizeof addr;
  if (::getsockname(listener.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    detail::throw_io("getsockname");
  }

  Reassembler buffer(cfg);
  std::atomic<std::size_t> expected{envelopes.size()};
  std::vector<std::jthread> handlers;
  std::jthread acceptor([&] {
    for (std::size_t accepted = 0; accepted < expected.load();) {
      pollfd p{listener.fd(), POLLIN, 0};
      if (::poll(&p, 1, 50) <= 0) continue;
      const int fd = ::accept(listener.fd(), nullptr, nullptr);
      if (fd < 0) continue;
      ++accepted;
      handlers.emplace_back([&buffer, conn = detail::Socket(fd)]() mutable {
        buffer.offer(detail::read_all(conn.fd()));
      });
    }
  });

  std::atomic<std::size_t> connected{0};
  {
    std::vector<std::jthread> senders;
    for (const auto& env : envelopes) {
      senders.emplace_back([&addr, &connected, wire = serialize(env)] {
        detail::Socket s(::socket(AF_INET, SOCK_STREAM, 0));
        if (!s) return;
        if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) return;
        ++connected;
        try {
          detail::write_all(s.fd(), wire);
        } catch (const Error&) {
          return;
        }
        ::shutdown(s.fd(), SHUT_WR);
      });
    }
  }
  // Connections that failed never reach accept().
  expected = connected.load();
  acceptor.join();
  handlers.clear();

  ReceiveReport report;
  report.arrivals_considered = envelopes.size();
  report.accepted = buffer.accepted_count();
  report.duplicates = buffer.duplicate_count();
  report.rejected = buffer.rejected();
  try {
    report.plaintext = buffer.decode(layout);
  } catch (const Error& e) {
    report.error = e;
  }
  return report;
}

}  // namespace spatial
