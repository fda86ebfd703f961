#include "qpool/distribution.hpp"

#include <algorithm>
#include <cstring>
#include <optional>

namespace qpool {

RankTopology RankTopology::make(unsigned total_ranks, unsigned num_qubits) {
  if (total_ranks == 0) throw DomainError("need at least one rank");
  if (num_qubits == 0) throw DomainError("need at least one qubit");
  RankTopology t;
  t.total_ranks = total_ranks;
  t.num_global_qubits = bits::floor_log2(total_ranks);
  t.effective_ranks = 1U << t.num_global_qubits;
  t.num_qubits = num_qubits;
  if (t.num_global_qubits >= num_qubits) {
    throw DomainError(std::to_string(t.effective_ranks) + " ranks cannot share " + std::to_string(num_qubits) +
                      " qubits: every rank needs at least one local qubit");
  }
  t.num_local_qubits = num_qubits - t.num_global_qubits;
  return t;
}

RankOffset rank_and_offset(Index i, const RankTopology& t) {
  return {i >> t.num_local_qubits, i & (t.local_size() - 1)};
}

Index global_index_of(RankOffset where, const RankTopology& t) {
  return (where.rank << t.num_local_qubits) | where.offset;
}

// ---------------------------------------------------------------------------

Communicator::Communicator(Transport& world, std::vector<int> members) : world_(world), members_(std::move(members)) {
  const auto it = std::find(members_.begin(), members_.end(), world.rank());
  if (it == members_.end()) throw ContractError("this rank is not a member of the group");
  rank_ = static_cast<int>(it - members_.begin());
}

void Communicator::set_chunk_amplitudes(std::size_t n) {
  if (n == 0) throw DomainError("chunk size must be positive");
  chunk_ = n;
}

void Communicator::send(int to, Tag tag, std::span<const Amplitude> data) {
  const int dest = world_rank(to);
  std::size_t sent = 0;
  do {
    const std::size_t n = std::min(chunk_, data.size() - sent);
    world_.send(dest, tag, std::as_bytes(data.subspan(sent, n)));
    sent += n;
  } while (sent < data.size());
}

void Communicator::receive(int from, Tag tag, std::span<Amplitude> out) {
  const int src = world_rank(from);
  std::size_t got = 0;
  do {
    const Bytes msg = world_.receive(src, tag);
    if (msg.size() % sizeof(Amplitude) != 0 || got + msg.size() / sizeof(Amplitude) > out.size()) {
      throw TransportError("amplitude message of unexpected length");
    }
    std::memcpy(out.data() + got, msg.data(), msg.size());
    got += msg.size() / sizeof(Amplitude);
  } while (got < out.size());
}

void Communicator::send_value(int to, Tag tag, double value) {
  world_.send(world_rank(to), tag, std::as_bytes(std::span(&value, 1)));
}

double Communicator::receive_value(int from, Tag tag) {
  const Bytes msg = world_.receive(world_rank(from), tag);
  if (msg.size() != sizeof(double)) throw TransportError("scalar message of unexpected length");
  double v;
  std::memcpy(&v, msg.data(), sizeof v);
  return v;
}

void Communicator::barrier() { group_reduce_sum(0.0, *this); }

double group_reduce_sum(double partial, Communicator& group) {
  const int n = group.size();
  if (!bits::is_pow2(static_cast<std::uint64_t>(n))) throw ContractError("group size must be a power of two");
  double value = partial;
  for (int step = 1; step < n; step <<= 1) {
    const int partner = group.rank() ^ step;
    group.send_value(partner, tags::kGroupReduce, value);
    const double other = group.receive_value(partner, tags::kGroupReduce);
    value = group.rank() < partner ? value + other : other + value;
  }
  return value;
}

namespace {

void check_group(const StatePartition& state, const Communicator& group) {
  if (bits::pow2(state.num_global_qubits()) != static_cast<Index>(group.size()) ||
      state.rank_index() != static_cast<Index>(group.rank())) {
    throw ContractError("partition layout does not match the communicator");
  }
}

/// Pairwise exchange on global qubit `qubit`. When `control` is a local
/// qubit, only pairs whose offset has that bit set are updated.
void exchange_update(StatePartition& state, Communicator& group, unsigned qubit, const GateMatrix& gate,
                     std::optional<unsigned> control, Tag out_tag, Tag back_tag) {
  const unsigned m = state.num_local_qubits();
  const unsigned shift = qubit - m;
  const int partner = group.rank() ^ (1 << shift);
  const bool lower = !bits::test(static_cast<Index>(group.rank()), shift);
  const Index half = state.size() / 2;
  auto amps = state.amplitudes();
  std::vector<Amplitude> buffer(half);

  // Step 1: ship the half the partner will update.
  const auto keep = lower ? amps.first(half) : amps.last(half);
  const auto give = lower ? amps.last(half) : amps.first(half);
  const Index keep_base = lower ? 0 : half;
  group.send(partner, out_tag, give);
  group.receive(partner, out_tag, buffer);

  // Step 2: update the pairs held locally. Lower ranks hold the bit-0
  // amplitude of each pair, upper ranks the bit-1 amplitude.
  for (Index k = 0; k < half; ++k) {
    if (control && !bits::test(keep_base + k, *control)) continue;
    if (lower)
      gate.apply(keep[k], buffer[k]);
    else
      gate.apply(buffer[k], keep[k]);
  }

  // Step 3: return the partner's updated amplitudes and take ours back.
  group.send(partner, back_tag, buffer);
  group.receive(partner, back_tag, give);
}

}  // namespace

void apply_one_qubit_gate(StatePartition& state, Communicator& group, unsigned qubit, const GateMatrix& gate) {
  if (qubit >= state.num_qubits()) throw DomainError("qubit " + std::to_string(qubit) + " out of range");
  check_group(state, group);
  if (qubit < state.num_local_qubits()) {
    apply_local_one_qubit_gate(state, qubit, gate);
    return;
  }
  exchange_update(state, group, qubit, gate, std::nullopt, tags::kExchangeOut + qubit, tags::kExchangeBack + qubit);
}

void apply_controlled_gate(StatePartition& state, Communicator& group, unsigned control, unsigned target,
                           const GateMatrix& gate) {
  const unsigned n = state.num_qubits();
  if (control >= n || target >= n) throw DomainError("qubit index out of range");
  if (control == target) throw DomainError("control and target must differ");
  check_group(state, group);
  const unsigned m = state.num_local_qubits();
  const bool control_local = control < m;
  const bool target_local = target < m;
  const auto rank = static_cast<Index>(group.rank());

  if (control_local && target_local) {
    apply_local_controlled_gate(state, control, target, gate);
  } else if (!control_local && target_local) {
    if (bits::test(rank, control - m)) apply_local_one_qubit_gate(state, target, gate);
  } else if (control_local && !target_local) {
    exchange_update(state, group, target, gate, control, tags::kControlledOut + target,
                    tags::kControlledBack + target);
  } else if (bits::test(rank, control - m)) {
    // Partners differ only in the target bit, so they agree on the control bit.
    exchange_update(state, group, target, gate, std::nullopt, tags::kControlledOut + target,
                    tags::kControlledBack + target);
  }
}

std::vector<Amplitude> gather_state(const StatePartition& state, Communicator& group) {
  check_group(state, group);
  if (group.rank() != 0) {
    group.send(0, tags::kGroupGather, state.amplitudes());
    return {};
  }
  std::vector<Amplitude> full(bits::pow2(state.num_qubits()));
  const auto local = state.amplitudes();
  std::copy(local.begin(), local.end(), full.begin());
  for (int r = 1; r < group.size(); ++r) {
    group.receive(r, tags::kGroupGather, std::span(full).subspan(static_cast<std::size_t>(r) * state.size(), state.size()));
  }
  return full;
}

}  // namespace qpool
