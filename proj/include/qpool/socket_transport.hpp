#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qpool/transport.hpp"

namespace qpool {

/// Frame header preceding every TCP message, 24 bytes, little-endian:
///   u32 magic | u32 version | u64 payload length | u32 source rank | u32 tag
struct FrameHeader {
  static constexpr std::uint32_t kMagic = 0x51504152;
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kSize = 24;

  std::uint32_t magic = kMagic;
  std::uint32_t version = kVersion;
  std::uint64_t payload_length = 0;
  std::uint32_t source = 0;
  std::uint32_t tag = 0;

  std::array<std::byte, kSize> encode() const noexcept;
  /// Throws TransportError on a bad magic number or version.
  static FrameHeader decode(std::span<const std::byte, kSize> raw);

  bool operator==(const FrameHeader&) const = default;
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

/// One `host:port` line per rank, in rank order. Blank lines and `#` comments are skipped.
std::vector<Endpoint> parse_rendezvous(std::string_view text);
std::vector<Endpoint> read_rendezvous(const std::filesystem::path& path);

/// Full-mesh TCP transport. Rank r listens on peers[r]; it connects to every
/// lower rank and accepts a connection from every higher rank. A reader thread
/// per connection drains frames into the local inbox so sends never block on
/// the receiver.
class SocketTransport final : public Transport {
 public:
  SocketTransport(int rank, std::vector<Endpoint> peers, std::chrono::milliseconds timeout = kDefaultTimeout);
  /// Uses an already bound and listening socket for this rank.
  SocketTransport(int rank, std::vector<Endpoint> peers, int listen_fd,
                  std::chrono::milliseconds timeout = kDefaultTimeout);
  ~SocketTransport() override;

  int rank() const noexcept override;
  int size() const noexcept override;

  /// Binds a listening socket on 127.0.0.1 with an OS-chosen port.
  static std::pair<int, std::uint16_t> listen_loopback();

 protected:
  void do_send(int dest, Tag tag, std::span<const std::byte> payload) override;
  Bytes do_receive(int source, Tag tag, std::chrono::milliseconds timeout) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs `body` on `ranks` threads of this process, each with its own
/// SocketTransport connected over loopback TCP.
void run_socket_loopback(int ranks, const RankBody& body, std::chrono::milliseconds timeout = kDefaultTimeout);

}  // namespace qpool
