#pragma once

#include <bit>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "qpool/types.hpp"

namespace qpool {

static_assert(std::endian::native == std::endian::little, "wire formats assume a little-endian host");

using Bytes = std::vector<std::byte>;
using Tag = std::uint32_t;

inline constexpr std::chrono::milliseconds kDefaultTimeout{30'000};

struct TransportStats {
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;  // payload bytes, headers excluded

  TransportStats operator-(const TransportStats& o) const noexcept {
    return {messages_sent - o.messages_sent, bytes_sent - o.bytes_sent};
  }
  bool operator==(const TransportStats&) const = default;
};

/// Point-to-point message layer connecting the ranks of one world.
///
/// Messages between a fixed (source, destination, tag) triple arrive in send
/// order. Sends never block on the receiver, so partners may both send before
/// either receives. A receive that waits longer than `timeout()` throws
/// TransportError; this is how non-collective use surfaces.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual int rank() const noexcept = 0;
  virtual int size() const noexcept = 0;

  void send(int dest, Tag tag, std::span<const std::byte> payload);
  Bytes receive(int source, Tag tag);

  /// World-wide barrier.
  void barrier();
  /// World-wide sum: gathered on rank 0, added in rank order, broadcast back.
  double reduce_sum(double value);

  const TransportStats& stats() const noexcept { return stats_; }
  void reset_stats() noexcept { stats_ = {}; }

  std::chrono::milliseconds timeout() const noexcept { return timeout_; }
  void set_timeout(std::chrono::milliseconds t) noexcept { timeout_ = t; }

 protected:
  virtual void do_send(int dest, Tag tag, std::span<const std::byte> payload) = 0;
  virtual Bytes do_receive(int source, Tag tag, std::chrono::milliseconds timeout) = 0;

 private:
  TransportStats stats_;
  std::chrono::milliseconds timeout_ = kDefaultTimeout;
};

/// Reserved tag ranges. Exchange tags carry the qubit index in the low bits.
namespace tags {
inline constexpr Tag kBarrier = 0x0100;
inline constexpr Tag kWorldReduce = 0x0200;
inline constexpr Tag kGroupReduce = 0x0300;
inline constexpr Tag kGroupGather = 0x0400;
inline constexpr Tag kPoolReduce = 0x0500;
inline constexpr Tag kPoolBroadcast = 0x0600;
inline constexpr Tag kExchangeOut = 0x1000;
inline constexpr Tag kExchangeBack = 0x2000;
inline constexpr Tag kControlledOut = 0x3000;
inline constexpr Tag kControlledBack = 0x4000;
}  // namespace tags

/// Threads of one process acting as ranks. Each endpoint is owned by the world.
class InProcWorld {
 public:
  explicit InProcWorld(int ranks, std::chrono::milliseconds timeout = kDefaultTimeout);
  ~InProcWorld();
  InProcWorld(const InProcWorld&) = delete;
  InProcWorld& operator=(const InProcWorld&) = delete;

  int size() const noexcept;
  Transport& endpoint(int rank);
  /// Wakes every blocked receive with a TransportError.
  void abort(const std::string& reason);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

using RankBody = std::function<void(Transport&)>;

/// Runs `body` on `ranks` threads, one per in-process rank. If any rank
/// throws, the world is aborted and the first exception is rethrown after all
/// threads have joined.
void run_inproc(int ranks, const RankBody& body, std::chrono::milliseconds timeout = kDefaultTimeout);

}  // namespace qpool
