/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "dcm/error.hpp"
#include "dcm/transport.hpp"

namespace dcm {

namespace {

[[noreturn]] void sys_fail(const std::string& what) {
  fail(ErrorCode::TransportError, what + ": " + std::strerror(errno));
}

// Returns false on orderly EOF before the first byte.
bool read_exact(int fd, std::uint8_t* buf, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) {
      if (got == 0) return false;
      fail(ErrorCode::MalformedFrame, "connection closed inside a frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      sys_fail("recv");
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

void write_all(int fd, const std::uint8_t* buf, std::size_t n) {
  std::size_t sent = 0;
  while (sent < n) {
    const ssize_t w = ::send(fd, buf + sent, n - sent, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      sys_fail("send");
    }
    sent += static_cast<std::size_t>(w);
  }
}

class TcpTransport final : public Transport {
 public:
  explicit TcpTransport(std::size_t endpoints) : endpoints_(endpoints) {
    try {
      for (std::size_t i = 0; i < endpoints; ++i) endpoints_[i].listen_fd = open_listener(i);
    } catch (...) {
      for (auto& ep : endpoints_) {
        if (ep.listen_fd >= 0) ::close(ep.listen_fd);
      }
      throw;
    }
    for (std::size_t i = 0; i < endpoints; ++i) {
      endpoints_[i].acceptor = std::thread([this, i] { accept_loop(i); });
    }
  }

  ~TcpTransport() override { shutdown(); }

  std::size_t send(const ProtocolMessage& msg) override {
    if (msg.receiver >= endpoints_.size()) {
      dcm::fail(ErrorCode::TransportError, "no endpoint " + std::to_string(msg.receiver));
    }
    const auto frame = encode_message(msg);
    Connection& conn = connection(msg.sender, msg.receiver);
    std::lock_guard lock(conn.mu);
    write_all(conn.fd, frame.data(), frame.size());
    return frame.size();
  }

  ProtocolMessage receive(std::size_t endpoint, Clock::time_point deadline) override {
    return mailbox(endpoint).pop(deadline);
  }

  void fail(std::size_t endpoint, std::exception_ptr error) override {
    mailbox(endpoint).fail(std::move(error));
  }

  void interrupt() override {
    for (auto& ep : endpoints_) ep.box.close();
  }

  void shutdown() override {
    interrupt();
    if (stopping_.exchange(true)) return;
    for (auto& ep : endpoints_) {
      if (ep.acceptor.joinable()) ep.acceptor.join();
      if (ep.listen_fd >= 0) ::close(ep.listen_fd);
      ep.listen_fd = -1;
    }
    {
      std::lock_guard lock(conn_mu_);
      for (auto& [edge, conn] : outgoing_) {
        ::shutdown(conn->fd, SHUT_RDWR);
        ::close(conn->fd);
      }
      outgoing_.clear();
    }
    std::vector<std::thread> readers;
    {
      std::lock_guard lock(readers_mu_);
      for (int fd : incoming_) ::shutdown(fd, SHUT_RDWR);
      readers.swap(readers_);
    }
    for (auto& t : readers) t.join();
    {
      std::lock_guard lock(readers_mu_);
      for (int fd : incoming_) ::close(fd);
      incoming_.clear();
    }
  }

 private:
  struct Endpoint {
    int listen_fd = -1;
    std::uint16_t port = 0;
    Mailbox box;
    std::thread acceptor;
  };

  struct Connection {
    int fd = -1;
    std::mutex mu;
  };

  Mailbox& mailbox(std::size_t endpoint) {
    if (endpoint >= endpoints_.size()) {
      dcm::fail(ErrorCode::TransportError, "no endpoint " + std::to_string(endpoint));
    }
    return endpoints_[endpoint].box;
  }

  int open_listener(std::size_t i) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) sys_fail("socket");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    socklen_t len = sizeof(addr);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
        ::listen(fd, 64) < 0 ||
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) < 0) {
      const int saved = errno;
      ::close(fd);
      errno = saved;
      sys_fail("listen on endpoint " + std::to_string(i));
    }
    endpoints_[i].port = ntohs(addr.sin_port);
    return fd;
  }

  void accept_loop(std::size_t endpoint) {
    const int listen_fd = endpoints_[endpoint].listen_fd;
    while (!stopping_) {
      pollfd p{listen_fd, POLLIN, 0};
      const int ready = ::poll(&p, 1, 20);
      if (ready <= 0) continue;
      const int fd = ::accept(listen_fd, nullptr, nullptr);
      if (fd < 0) continue;
      std::lock_guard lock(readers_mu_);
      if (stopping_) {
        ::close(fd);
        break;
      }
      incoming_.push_back(fd);
      readers_.emplace_back([this, fd, endpoint] { read_loop(fd, endpoint); });
    }
  }

  void read_loop(int fd, std::size_t endpoint) {
    Mailbox& box = endpoints_[endpoint].box;
    try {
      std::vector<std::uint8_t> frame(kFrameHeaderSize);
      while (true) {
        frame.resize(kFrameHeaderSize);
        if (!read_exact(fd, frame.data(), kFrameHeaderSize)) return;
        const std::uint64_t length = frame_payload_length(frame);
        frame.resize(kFrameHeaderSize + length);
        if (length > 0 && !read_exact(fd, frame.data() + kFrameHeaderSize, length)) {
          dcm::fail(ErrorCode::MalformedFrame, "connection closed before the payload");
        }
        ProtocolMessage msg = decode_message(frame);
        if (msg.receiver != endpoint) {
          dcm::fail(ErrorCode::TransportError, "frame for endpoint " +
                                                   std::to_string(msg.receiver) +
                                                   " arrived at " + std::to_string(endpoint));
        }
        box.push(std::move(msg));
      }
    } catch (...) {
      if (!stopping_) box.fail(std::current_exception());
    }
  }

  Connection& connection(std::uint32_t sender, std::uint32_t receiver) {
    std::lock_guard lock(conn_mu_);
    if (stopping_) dcm::fail(ErrorCode::TransportError, "transport is shut down");
    auto& slot = outgoing_[{sender, receiver}];
    if (!slot) {
      const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
      if (fd < 0) sys_fail("socket");
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      sockaddr_in addr{};
      addr.sin_family = AF_INET;
      addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
      addr.sin_port = htons(endpoints_[receiver].port);
      if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        outgoing_.erase({sender, receiver});
        sys_fail("connect " + std::to_string(sender) + "->" + std::to_string(receiver));
      }
      slot = std::make_unique<Connection>();
      slot->fd = fd;
    }
    return *slot;
  }

  std::vector<Endpoint> endpoints_;
  std::atomic<bool> stopping_{false};

  std::mutex conn_mu_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::unique_ptr<Connection>> outgoing_;

  std::mutex readers_mu_;
  std::vector<std::thread> readers_;
  std::vector<int> incoming_;
};

}  // namespace

std::unique_ptr<Transport> make_tcp_transport(std::size_t endpoints) {
  return std::make_unique<TcpTransport>(endpoints);
}

}  // namespace dcm
