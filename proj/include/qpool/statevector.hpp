#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qpool/gates.hpp"
#include "qpool/graph.hpp"
#include "qpool/types.hpp"

namespace qpool {

/// One rank's contiguous slice of an n-qubit state vector.
///
/// Qubit 0 is the least significant bit of the basis index. The lowest
/// `num_local_qubits` bits of a global index select the offset inside the
/// slice, the remaining high bits select the rank:
///   global = (rank_index << num_local_qubits) | offset.
class StatePartition {
 public:
  /// Starts in |0...0>.
  StatePartition(unsigned num_qubits, unsigned num_local_qubits, Index rank_index);
  /// Single-rank state holding all 2^n amplitudes.
  explicit StatePartition(unsigned num_qubits) : StatePartition(num_qubits, num_qubits, 0) {}

  unsigned num_qubits() const noexcept { return num_qubits_; }
  unsigned num_local_qubits() const noexcept { return num_local_; }
  unsigned num_global_qubits() const noexcept { return num_qubits_ - num_local_; }
  Index rank_index() const noexcept { return rank_; }
  Index size() const noexcept { return amps_.size(); }
  std::size_t memory_bytes() const noexcept { return amps_.size() * sizeof(Amplitude); }

  Index global_index(Index offset) const noexcept { return (rank_ << num_local_) | offset; }
  bool owns(Index global) const noexcept { return (global >> num_local_) == rank_; }

  std::span<Amplitude> amplitudes() noexcept { return amps_; }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  Amplitude& operator[](Index offset) noexcept { return amps_[offset]; }
  const Amplitude& operator[](Index offset) const noexcept { return amps_[offset]; }

 private:
  unsigned num_qubits_;
  unsigned num_local_;
  Index rank_;
  std::vector<Amplitude> amps_;
};

// Local kernels. None of these communicate; observables return this
// partition's partial sum, which the distribution layer completes.

void init_basis_state(StatePartition& state, Index global_index);
void init_uniform(StatePartition& state);

/// Pair update on a local qubit. Throws ContractError when `qubit` is global.
void apply_local_one_qubit_gate(StatePartition& state, unsigned qubit, const GateMatrix& gate);

/// Controlled update with both qubits local.
void apply_local_controlled_gate(StatePartition& state, unsigned control, unsigned target, const GateMatrix& gate);

using PhaseFunction = std::function<double(Index)>;

/// alpha_i <- exp(-i phases(i)) alpha_i for every owned global index i.
void apply_diagonal_phase(StatePartition& state, const PhaseFunction& phases);

/// Diagonal cost layer exp(-i gamma C) with C(i) the cut count of `graph`.
void apply_cut_phase(StatePartition& state, const Graph& graph, double gamma);

double partial_norm2(const StatePartition& state);
/// Sum of |alpha_i|^2 over owned i with bit `qubit` set.
double partial_probability(const StatePartition& state, unsigned qubit);
/// Sum of |alpha_i|^2 cut(i) over owned i.
double partial_maxcut_expectation(const StatePartition& state, const Graph& graph);

/// Sum of term(offset) for offset in [0, count), count a power of two, summed
/// as a perfect binary tree over consecutive pairs. Splitting the range into
/// aligned power-of-two blocks and combining the block sums the same way
/// yields the identical double, which is what makes distributed reductions
/// independent of the rank count.
template <class Term>
double pairwise_sum(Index count, Term&& term) {
  constexpr Index kBlock = 256;
  double buf[kBlock];
  auto reduce = [](double* v, Index len) {
    for (; len > 1; len /= 2)
      for (Index i = 0; i < len / 2; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    return v[0];
  };
  if (count <= kBlock) {
    for (Index i = 0; i < count; ++i) buf[i] = term(i);
    return reduce(buf, count);
  }
  std::vector<double> blocks(count / kBlock);
  for (Index b = 0; b < blocks.size(); ++b) {
    for (Index i = 0; i < kBlock; ++i) buf[i] = term(b * kBlock + i);
    blocks[b] = reduce(buf, kBlock);
  }
  return reduce(blocks.data(), blocks.size());
}

}  // namespace qpool
