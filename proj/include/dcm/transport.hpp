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

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>

#include "dcm/wire.hpp"

namespace dcm {

using Clock = std::chrono::steady_clock;

/// Unbounded FIFO for one endpoint. A failed mailbox rethrows the stored
/// error from every later receive; a closed one throws TransportError.
class Mailbox {
 public:
  void push(ProtocolMessage msg);
  /// Throws TimeoutError once `deadline` passes with nothing queued.
  ProtocolMessage pop(Clock::time_point deadline);
  void fail(std::exception_ptr error);
  void close();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<ProtocolMessage> queue_;
  std::exception_ptr error_;
  bool closed_ = false;
};

/// Point-to-point delivery between `endpoints` numbered 0..n-1.
/// Messages from one sender to one receiver arrive in send order.
class Transport {
 public:
  virtual ~Transport() = default;

  /// Routes `msg` to msg.receiver. Returns the number of bytes put on the wire
  /// (0 for transports that hand over objects).
  virtual std::size_t send(const ProtocolMessage& msg) = 0;
  virtual ProtocolMessage receive(std::size_t endpoint, Clock::time_point deadline) = 0;
  /// Makes every later receive on `endpoint` rethrow `error`.
  virtual void fail(std::size_t endpoint, std::exception_ptr error) = 0;
  /// Closes every mailbox so blocked receivers return with TransportError.
  virtual void interrupt() = 0;
  /// interrupt(), then releases sockets and threads. Call only once no thread
  /// is inside send(). Idempotent.
  virtual void shutdown() = 0;
};

enum class TransportKind { InProcess, Tcp };

std::unique_ptr<Transport> make_in_process_transport(std::size_t endpoints);

/// Loopback TCP: one listening socket per endpoint, one connection per
/// directed (sender, receiver) edge, opened on first use. Throws TransportError.
std::unique_ptr<Transport> make_tcp_transport(std::size_t endpoints);

std::unique_ptr<Transport> make_transport(TransportKind kind, std::size_t endpoints);

}  // namespace dcm
