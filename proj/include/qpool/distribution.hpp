#pragma once

#include <span>
#include <vector>

#include "qpool/gates.hpp"
#include "qpool/statevector.hpp"
#include "qpool/transport.hpp"

namespace qpool {

/// How 2^n amplitudes map onto the ranks of one state group.
struct RankTopology {
  unsigned total_ranks = 1;
  unsigned effective_ranks = 1;  // 2^p, p = floor(log2(total_ranks))
  unsigned num_qubits = 1;
  unsigned num_global_qubits = 0;  // p
  unsigned num_local_qubits = 1;   // m = n - p

  /// Throws DomainError unless at least one qubit stays local (p < n).
  static RankTopology make(unsigned total_ranks, unsigned num_qubits);

  bool active(unsigned rank) const noexcept { return rank < effective_ranks; }
  Index local_size() const noexcept { return bits::pow2(num_local_qubits); }
};

struct RankOffset {
  Index rank = 0;
  Index offset = 0;
  bool operator==(const RankOffset&) const = default;
};

/// rank = high p bits of i, offset = low m bits of i.
RankOffset rank_and_offset(Index global_index, const RankTopology& topology);
Index global_index_of(RankOffset where, const RankTopology& topology);

/// A group of world ranks that jointly hold one state. Group rank k is
/// members[k] in the world. Amplitude buffers larger than `chunk_amplitudes`
/// travel as several consecutive messages.
class Communicator {
 public:
  static constexpr std::size_t kDefaultChunk = std::size_t{1} << 26;

  Communicator(Transport& world, std::vector<int> members);

  int rank() const noexcept { return rank_; }
  int size() const noexcept { return static_cast<int>(members_.size()); }
  int world_rank(int group_rank) const { return members_.at(static_cast<std::size_t>(group_rank)); }
  const std::vector<int>& members() const noexcept { return members_; }
  Transport& transport() noexcept { return world_; }

  void send(int to, Tag tag, std::span<const Amplitude> data);
  void receive(int from, Tag tag, std::span<Amplitude> out);
  void send_value(int to, Tag tag, double value);
  double receive_value(int from, Tag tag);

  void barrier();

  std::size_t chunk_amplitudes() const noexcept { return chunk_; }
  void set_chunk_amplitudes(std::size_t n);

 private:
  Transport& world_;
  std::vector<int> members_;
  int rank_ = -1;
  std::size_t chunk_ = kDefaultChunk;
};

/// Collective sum over a group of power-of-two size by recursive doubling:
/// at level k every rank adds its value to that of rank ^ 2^k. All members
/// end with the same double, equal to the pairwise sum a single rank would
/// compute over the concatenated blocks.
double group_reduce_sum(double partial, Communicator& group);

/// One-qubit gate on any qubit. Local qubits use the in-place kernel with no
/// messages. Global qubits use the pairwise half-buffer exchange: the lower
/// rank of each pair ships its upper half, the upper rank its lower half,
/// each side updates the pairs it now holds, and the results go back.
void apply_one_qubit_gate(StatePartition& state, Communicator& group, unsigned qubit, const GateMatrix& gate);

/// U on `target` conditioned on `control` being |1>, routed by locality of
/// the two qubits.
void apply_controlled_gate(StatePartition& state, Communicator& group, unsigned control, unsigned target,
                           const GateMatrix& gate);

/// Full state gathered on group rank 0 (empty elsewhere).
std::vector<Amplitude> gather_state(const StatePartition& state, Communicator& group);

}  // namespace qpool
