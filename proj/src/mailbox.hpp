#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "qpool/transport.hpp"

namespace qpool::detail {

/// Per-rank inbox of delivered messages, keyed by (source, tag), FIFO per key.
class Mailbox {
 public:
  void push(int source, Tag tag, Bytes payload) {
    {
      std::lock_guard lock(mutex_);
      queues_[{source, tag}].push_back(std::move(payload));
    }
    cv_.notify_all();
  }

  Bytes pop(int source, Tag tag, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    const auto key = std::make_pair(source, tag);
    const auto ready = [&] {
      auto it = queues_.find(key);
      return (it != queues_.end() && !it->second.empty()) || abort_reason_ || closed_.count(source);
    };
    if (!cv_.wait_for(lock, timeout, ready)) {
      throw TransportError("timed out after " + std::to_string(timeout.count()) + " ms waiting for rank " +
                           std::to_string(source) + " (tag " + std::to_string(tag) +
                           "); collective operation entered inconsistently?");
    }
    auto it = queues_.find(key);
    if (it != queues_.end() && !it->second.empty()) {
      Bytes out = std::move(it->second.front());
      it->second.pop_front();
      return out;
    }
    if (abort_reason_) throw TransportError("transport aborted: " + *abort_reason_);
    throw TransportError("connection to rank " + std::to_string(source) + " closed");
  }

  void abort(const std::string& reason) {
    {
      std::lock_guard lock(mutex_);
      if (!abort_reason_) abort_reason_ = reason;
    }
    cv_.notify_all();
  }

  void close_source(int source) {
    {
      std::lock_guard lock(mutex_);
      closed_.insert(source);
    }
    cv_.notify_all();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::pair<int, Tag>, std::deque<Bytes>> queues_;
  std::set<int> closed_;
  std::optional<std::string> abort_reason_;
};

}  // namespace qpool::detail
