#include "qpool/socket_transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include "mailbox.hpp"
#include "text_util.hpp"

namespace qpool {

namespace {

constexpr Tag kHelloTag = 0xFFFFFFFFu;

template <class T>
void put_le(std::byte* dst, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<std::byte>((value >> (8 * i)) & 0xFF);
}

template <class T>
T get_le(const std::byte* src) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(std::to_integer<std::uint8_t>(src[i])) << (8 * i);
  return value;
}

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

void write_all(int fd, const std::byte* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("send"));
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
}

/// False on orderly EOF before any byte was read.
bool read_all(int fd, std::byte* data, std::size_t len) {
  std::size_t done = 0;
  while (done < len) {
    const ssize_t n = ::recv(fd, data + done, len - done, 0);
    if (n == 0) {
      if (done == 0) return false;
      throw TransportError("connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("recv"));
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

void write_frame(int fd, int source, Tag tag, std::span<const std::byte> payload) {
  FrameHeader h;
  h.payload_length = payload.size();
  h.source = static_cast<std::uint32_t>(source);
  h.tag = tag;
  const auto raw = h.encode();
  write_all(fd, raw.data(), raw.size());
  if (!payload.empty()) write_all(fd, payload.data(), payload.size());
}

std::optional<std::pair<FrameHeader, Bytes>> read_frame(int fd) {
  std::array<std::byte, FrameHeader::kSize> raw;
  if (!read_all(fd, raw.data(), raw.size())) return std::nullopt;
  const auto h = FrameHeader::decode(raw);
  Bytes payload(h.payload_length);
  if (!payload.empty() && !read_all(fd, payload.data(), payload.size())) {
    throw TransportError("connection closed mid-frame");
  }
  return std::make_pair(h, std::move(payload));
}

sockaddr_in resolve(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (const int rc = ::getaddrinfo(ep.host.c_str(), nullptr, &hints, &res); rc != 0) {
    throw TransportError("cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
  }
  sockaddr_in addr{};
  std::memcpy(&addr, res->ai_addr, sizeof addr);
  ::freeaddrinfo(res);
  addr.sin_port = htons(ep.port);
  return addr;
}

int listen_on(const sockaddr_in& addr) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError(errno_text("socket"));
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd, 128) < 0) {
    const auto msg = errno_text("bind/listen");
    ::close(fd);
    throw TransportError(msg);
  }
  return fd;
}

void tune(int fd) {
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

std::array<std::byte, FrameHeader::kSize> FrameHeader::encode() const noexcept {
  std::array<std::byte, kSize> raw{};
  put_le(raw.data() + 0, magic);
  put_le(raw.data() + 4, version);
  put_le(raw.data() + 8, payload_length);
  put_le(raw.data() + 16, source);
  put_le(raw.data() + 20, tag);
  return raw;
}

FrameHeader FrameHeader::decode(std::span<const std::byte, kSize> raw) {
  FrameHeader h;
  h.magic = get_le<std::uint32_t>(raw.data() + 0);
  h.version = get_le<std::uint32_t>(raw.data() + 4);
  h.payload_length = get_le<std::uint64_t>(raw.data() + 8);
  h.source = get_le<std::uint32_t>(raw.data() + 16);
  h.tag = get_le<std::uint32_t>(raw.data() + 20);
  if (h.magic != kMagic) throw TransportError("bad frame magic");
  if (h.version != kVersion) throw TransportError("unsupported protocol version " + std::to_string(h.version));
  return h;
}

std::vector<Endpoint> parse_rendezvous(std::string_view text) {
  std::vector<Endpoint> out;
  std::size_t line_no = 0;
  for (const auto& line : detail::split_lines(text)) {
    ++line_no;
    const auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 1) throw ParseError(line_no, "expected `host:port`");
    const auto colon = tokens[0].rfind(':');
    if (colon == std::string::npos || colon == 0) throw ParseError(line_no, "expected `host:port`");
    const unsigned port = detail::parse_unsigned(tokens[0].substr(colon + 1), line_no);
    if (port == 0 || port > 65535) throw ParseError(line_no, "port out of range");
    out.push_back({tokens[0].substr(0, colon), static_cast<std::uint16_t>(port)});
  }
  if (out.empty()) throw ParseError(0, "rendezvous file lists no ranks");
  return out;
}

std::vector<Endpoint> read_rendezvous(const std::filesystem::path& path) {
  return parse_rendezvous(detail::read_file(path));
}

struct SocketTransport::Impl {
  int rank = 0;
  std::vector<Endpoint> peers;
  int listen_fd = -1;
  std::vector<int> fds;  // indexed by peer rank, -1 for self
  std::vector<std::mutex> send_mutex;
  std::vector<std::thread> readers;
  detail::Mailbox inbox;

  ~Impl() {
    // Half-close so peers see EOF once they have drained our data, then wait
    // for their EOF before tearing down the read side.
    for (int fd : fds)
      if (fd >= 0) ::shutdown(fd, SHUT_WR);
    for (auto& t : readers)
      if (t.joinable()) t.join();
    for (int fd : fds)
      if (fd >= 0) ::close(fd);
    if (listen_fd >= 0) ::close(listen_fd);
  }

  void connect_mesh(std::chrono::milliseconds timeout) {
    const int n = static_cast<int>(peers.size());
    fds.assign(static_cast<std::size_t>(n), -1);
    send_mutex = std::vector<std::mutex>(static_cast<std::size_t>(n));
    const auto deadline = std::chrono::steady_clock::now() + timeout;

    for (int peer = 0; peer < rank; ++peer) {
      const auto addr = resolve(peers[static_cast<std::size_t>(peer)]);
      for (;;) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw TransportError(errno_text("socket"));
        if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0) {
          tune(fd);
          fds[static_cast<std::size_t>(peer)] = fd;
          write_frame(fd, rank, kHelloTag, {});
          break;
        }
        ::close(fd);
        if (std::chrono::steady_clock::now() > deadline) {
          throw TransportError("rank " + std::to_string(rank) + " could not reach rank " + std::to_string(peer));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      }
    }

    for (int accepted = 0; accepted < n - 1 - rank; ++accepted) {
      timeval tv{};
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      tv.tv_sec = std::max<long>(0, static_cast<long>(left.count() / 1000));
      tv.tv_usec = std::max<long>(1000, static_cast<long>((left.count() % 1000) * 1000));
      ::setsockopt(listen_fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
      const int fd = ::accept(listen_fd, nullptr, nullptr);
      if (fd < 0) throw TransportError("rank " + std::to_string(rank) + ": " + errno_text("accept"));
      tune(fd);
      auto hello = read_frame(fd);
      if (!hello || hello->first.tag != kHelloTag) {
        ::close(fd);
        throw TransportError("peer did not send a hello frame");
      }
      const auto src = static_cast<int>(hello->first.source);
      if (src <= rank || src >= n || fds[static_cast<std::size_t>(src)] >= 0) {
        ::close(fd);
        throw TransportError("unexpected hello from rank " + std::to_string(src));
      }
      fds[static_cast<std::size_t>(src)] = fd;
    }

    for (int peer = 0; peer < n; ++peer) {
      if (peer == rank) continue;
      readers.emplace_back([this, peer] { read_loop(peer); });
    }
  }

  void read_loop(int peer) {
    const int fd = fds[static_cast<std::size_t>(peer)];
    try {
      while (auto frame = read_frame(fd)) {
        if (static_cast<int>(frame->first.source) != peer) throw TransportError("frame source mismatch");
        inbox.push(peer, frame->first.tag, std::move(frame->second));
      }
    } catch (const std::exception&) {
      // Fall through: receivers waiting on this peer get a closed-connection error.
    }
    inbox.close_source(peer);
  }
};

SocketTransport::SocketTransport(int rank, std::vector<Endpoint> peers, std::chrono::milliseconds timeout)
    : SocketTransport(rank, peers, -1, timeout) {}

SocketTransport::SocketTransport(int rank, std::vector<Endpoint> peers, int listen_fd,
                                 std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>()) {
  if (rank < 0 || rank >= static_cast<int>(peers.size())) throw DomainError("rank not listed in rendezvous");
  impl_->rank = rank;
  impl_->peers = std::move(peers);
  impl_->listen_fd = listen_fd >= 0 ? listen_fd : listen_on(resolve(impl_->peers[static_cast<std::size_t>(rank)]));
  set_timeout(timeout);
  impl_->connect_mesh(timeout);
}

SocketTransport::~SocketTransport() = default;

int SocketTransport::rank() const noexcept { return impl_->rank; }
int SocketTransport::size() const noexcept { return static_cast<int>(impl_->peers.size()); }

std::pair<int, std::uint16_t> SocketTransport::listen_loopback() {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  const int fd = listen_on(addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  return {fd, ntohs(addr.sin_port)};
}

void SocketTransport::do_send(int dest, Tag tag, std::span<const std::byte> payload) {
  if (dest == impl_->rank) {
    impl_->inbox.push(dest, tag, Bytes(payload.begin(), payload.end()));
    return;
  }
  const auto d = static_cast<std::size_t>(dest);
  std::lock_guard lock(impl_->send_mutex[d]);
  write_frame(impl_->fds[d], impl_->rank, tag, payload);
}

Bytes SocketTransport::do_receive(int source, Tag tag, std::chrono::milliseconds timeout) {
  return impl_->inbox.pop(source, tag, timeout);
}

void run_socket_loopback(int ranks, const RankBody& body, std::chrono::milliseconds timeout) {
  if (ranks < 1) throw DomainError("a world needs at least one rank");
  std::vector<Endpoint> peers;
  std::vector<int> listeners;
  for (int r = 0; r < ranks; ++r) {
    const auto [fd, port] = SocketTransport::listen_loopback();
    listeners.push_back(fd);
    peers.push_back({"127.0.0.1", port});
  }
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> threads;
  for (int r = 0; r < ranks; ++r) {
    threads.emplace_back([&, r] {
      try {
        SocketTransport transport(r, peers, listeners[static_cast<std::size_t>(r)], timeout);
        body(transport);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qpool
