#include "qpool/transport.hpp"

#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include "mailbox.hpp"

namespace qpool {

namespace {

Bytes encode(double v) {
  Bytes b(sizeof v);
  std::memcpy(b.data(), &v, sizeof v);
  return b;
}

double decode(const Bytes& b) {
  if (b.size() != sizeof(double)) throw TransportError("expected an 8-byte scalar payload");
  double v;
  std::memcpy(&v, b.data(), sizeof v);
  return v;
}

}  // namespace

void Transport::send(int dest, Tag tag, std::span<const std::byte> payload) {
  if (dest < 0 || dest >= size()) throw DomainError("destination rank out of range");
  do_send(dest, tag, payload);
  ++stats_.messages_sent;
  stats_.bytes_sent += payload.size();
}

Bytes Transport::receive(int source, Tag tag) {
  if (source < 0 || source >= size()) throw DomainError("source rank out of range");
  return do_receive(source, tag, timeout_);
}

void Transport::barrier() { reduce_sum(0.0); }

double Transport::reduce_sum(double value) {
  if (size() == 1) return value;
  if (rank() != 0) {
    const auto b = encode(value);
    send(0, tags::kWorldReduce, b);
    return decode(receive(0, tags::kWorldReduce));
  }
  double total = value;
  for (int r = 1; r < size(); ++r) total += decode(receive(r, tags::kWorldReduce));
  const auto b = encode(total);
  for (int r = 1; r < size(); ++r) send(r, tags::kWorldReduce, b);
  return total;
}

// ---------------------------------------------------------------------------
// In-process transport

namespace {

class InProcEndpoint final : public Transport {
 public:
  InProcEndpoint(int rank, std::vector<detail::Mailbox>& boxes) : rank_(rank), boxes_(boxes) {}

  int rank() const noexcept override { return rank_; }
  int size() const noexcept override { return static_cast<int>(boxes_.size()); }

 protected:
  void do_send(int dest, Tag tag, std::span<const std::byte> payload) override {
    boxes_[dest].push(rank_, tag, Bytes(payload.begin(), payload.end()));
  }
  Bytes do_receive(int source, Tag tag, std::chrono::milliseconds timeout) override {
    return boxes_[rank_].pop(source, tag, timeout);
  }

 private:
  int rank_;
  std::vector<detail::Mailbox>& boxes_;
};

}  // namespace

struct InProcWorld::Impl {
  std::vector<detail::Mailbox> boxes;
  std::vector<std::unique_ptr<InProcEndpoint>> endpoints;
};

InProcWorld::InProcWorld(int ranks, std::chrono::milliseconds timeout) : impl_(std::make_unique<Impl>()) {
  if (ranks < 1) throw DomainError("a world needs at least one rank");
  impl_->boxes = std::vector<detail::Mailbox>(static_cast<std::size_t>(ranks));
  for (int r = 0; r < ranks; ++r) {
    impl_->endpoints.push_back(std::make_unique<InProcEndpoint>(r, impl_->boxes));
    impl_->endpoints.back()->set_timeout(timeout);
  }
}

InProcWorld::~InProcWorld() = default;

int InProcWorld::size() const noexcept { return static_cast<int>(impl_->endpoints.size()); }

Transport& InProcWorld::endpoint(int rank) { return *impl_->endpoints.at(static_cast<std::size_t>(rank)); }

void InProcWorld::abort(const std::string& reason) {
  for (auto& box : impl_->boxes) box.abort(reason);
}

void run_inproc(int ranks, const RankBody& body, std::chrono::milliseconds timeout) {
  InProcWorld world(ranks, timeout);
  if (ranks == 1) {
    body(world.endpoint(0));
    return;
  }
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(ranks));
  for (int r = 0; r < ranks; ++r) {
    threads.emplace_back([&, r] {
      try {
        body(world.endpoint(r));
      } catch (...) {
        {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
        world.abort("rank " + std::to_string(r) + " failed");
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qpool
