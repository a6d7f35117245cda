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

#include <vector>

#include "dcm/error.hpp"
#include "dcm/transport.hpp"

namespace dcm {

void Mailbox::push(ProtocolMessage msg) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    queue_.push_back(std::move(msg));
  }
  cv_.notify_one();
}

ProtocolMessage Mailbox::pop(Clock::time_point deadline) {
  std::unique_lock lock(mu_);
  const bool ready = cv_.wait_until(lock, deadline, [&] {
    return !queue_.empty() || error_ != nullptr || closed_;
  });
  if (error_) std::rethrow_exception(error_);
  if (!queue_.empty()) {
    ProtocolMessage msg = std::move(queue_.front());
    queue_.pop_front();
    return msg;
  }
  if (closed_) dcm::fail(ErrorCode::TransportError, "mailbox closed");
  if (!ready) dcm::fail(ErrorCode::TimeoutError, "no message before the deadline");
  dcm::fail(ErrorCode::TransportError, "spurious wake-up");
}

void Mailbox::fail(std::exception_ptr error) {
  {
    std::lock_guard lock(mu_);
    if (!error_) error_ = std::move(error);
  }
  cv_.notify_all();
}

void Mailbox::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

namespace {

class InProcessTransport final : public Transport {
 public:
  explicit InProcessTransport(std::size_t endpoints) : boxes_(endpoints) {}

  std::size_t send(const ProtocolMessage& msg) override {
    box(msg.receiver).push(msg);
    return 0;
  }

  ProtocolMessage receive(std::size_t endpoint, Clock::time_point deadline) override {
    return box(endpoint).pop(deadline);
  }

  void fail(std::size_t endpoint, std::exception_ptr error) override {
    box(endpoint).fail(std::move(error));
  }

  void interrupt() override {
    for (auto& b : boxes_) b.close();
  }

  void shutdown() override { interrupt(); }

 private:
  Mailbox& box(std::size_t endpoint) {
    if (endpoint >= boxes_.size()) {
      dcm::fail(ErrorCode::TransportError, "no endpoint " + std::to_string(endpoint));
    }
    return boxes_[endpoint];
  }

  std::vector<Mailbox> boxes_;
};

}  // namespace

std::unique_ptr<Transport> make_in_process_transport(std::size_t endpoints) {
  return std::make_unique<InProcessTransport>(endpoints);
}

std::unique_ptr<Transport> make_transport(TransportKind kind, std::size_t endpoints) {
  return kind == TransportKind::Tcp ? make_tcp_transport(endpoints)
                                    : make_in_process_transport(endpoints);
}

}  // namespace dcm
