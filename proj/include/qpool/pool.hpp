#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qpool/circuit.hpp"
#include "qpool/distribution.hpp"
#include "qpool/random.hpp"
#include "qpool/register.hpp"

namespace qpool {

/// Partition of a world of ranks into equally sized state groups.
struct PoolLayout {
  unsigned total_ranks = 1;
  unsigned num_states = 1;
  unsigned ranks_per_state = 1;  // power of two

  /// State index of `rank`, or nullopt for idle leftover ranks.
  std::optional<unsigned> group_of_rank(unsigned rank) const noexcept {
    if (rank >= active_ranks()) return std::nullopt;
    return rank / ranks_per_state;
  }
  std::optional<unsigned> state_rank_of_rank(unsigned rank) const noexcept {
    if (rank >= active_ranks()) return std::nullopt;
    return rank % ranks_per_state;
  }
  unsigned active_ranks() const noexcept { return num_states * ranks_per_state; }
  unsigned idle_ranks() const noexcept { return total_ranks - active_ranks(); }
  /// World ranks of group `state`, in state-rank order.
  std::vector<int> members(unsigned state) const;
};

/// Groups of 2^floor(log2(total/states)) contiguous ranks; the rest idle.
PoolLayout build_pool(unsigned total_ranks, unsigned num_states);

/// One rank's view of the pool.
///
/// Pool-level collectives involve every world rank, idle ones included, and
/// are completed on world rank 0 by adding the per-state contributions in
/// state order.
class PoolContext {
 public:
  PoolContext(Transport& world, unsigned num_states, std::uint64_t seed);

  Transport& world() noexcept { return world_; }
  const PoolLayout& layout() const noexcept { return layout_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool active() const noexcept { return group_.has_value(); }
  /// Pool state held by this rank. Throws ContractError on idle ranks.
  unsigned state() const;
  Communicator& group();
  bool is_group_leader() const noexcept { return active() && group_->rank() == 0; }

  /// Scope keys: 0 for pool, the state index for state, the world rank for local.
  RandomStream stream(RngScope scope) const;
  /// Register for this rank's state, or nullopt on idle ranks.
  std::optional<Register> make_register(unsigned num_qubits);

  /// Sum over pool states of one already group-reduced value per state;
  /// identical on every rank.
  double incoherent_sum(double value);
  std::vector<double> incoherent_sum(std::span<const double> values);

  /// Values held by world rank 0, delivered to every rank. `count` must
  /// match on all ranks.
  std::vector<double> broadcast(std::span<const double> values, std::size_t count);

 private:
  Transport& world_;
  PoolLayout layout_;
  std::uint64_t seed_;
  std::optional<Communicator> group_;
};

/// Applies `gate` to every pool state. With a per-state table, state s uses
/// table[s] as the gate's angle (rotations and cost layers only).
void apply_gate_pool(PoolContext& pool, Register* reg, const GateSpec& gate,
                     std::optional<std::span<const double>> per_state_angles = std::nullopt);

/// Runs `circuit` on every pool state with per-state slot bindings. The table
/// (num_states x slots) is broadcast from world rank 0 once per call.
void run_circuit_pool(PoolContext& pool, Register* reg, const Circuit& circuit,
                      std::span<const Bindings> per_state_bindings);

}  // namespace qpool
