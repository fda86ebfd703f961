#include "qpool/statevector.hpp"

#include <algorithm>
#include <cmath>

namespace qpool {

StatePartition::StatePartition(unsigned num_qubits, unsigned num_local_qubits, Index rank_index)
    : num_qubits_(num_qubits), num_local_(num_local_qubits), rank_(rank_index) {
  if (num_qubits == 0) throw DomainError("a register needs at least one qubit");
  if (num_local_qubits == 0 || num_local_qubits > num_qubits) {
    throw DomainError("num_local_qubits must lie in [1, num_qubits]");
  }
  if (num_qubits >= 63) throw CapabilityError("at most 62 qubits are addressable");
  if (rank_index >= bits::pow2(num_qubits - num_local_qubits)) throw DomainError("rank index out of range");
  amps_.assign(bits::pow2(num_local_qubits), Amplitude{0.0, 0.0});
  if (rank_index == 0) amps_[0] = {1.0, 0.0};
}

void init_basis_state(StatePartition& state, Index global_index) {
  if (global_index >= bits::pow2(state.num_qubits())) {
    throw DomainError("basis index " + std::to_string(global_index) + " out of range for " +
                      std::to_string(state.num_qubits()) + " qubits");
  }
  auto amps = state.amplitudes();
  std::fill(amps.begin(), amps.end(), Amplitude{0.0, 0.0});
  if (state.owns(global_index)) amps[global_index & (state.size() - 1)] = {1.0, 0.0};
}

void init_uniform(StatePartition& state) {
  const double value = std::pow(2.0, -0.5 * state.num_qubits());
  auto amps = state.amplitudes();
  std::fill(amps.begin(), amps.end(), Amplitude{value, 0.0});
}

void apply_local_one_qubit_gate(StatePartition& state, unsigned qubit, const GateMatrix& gate) {
  if (qubit >= state.num_local_qubits()) {
    throw ContractError("qubit " + std::to_string(qubit) + " is not local (local qubits: " +
                        std::to_string(state.num_local_qubits()) + ")");
  }
  auto amps = state.amplitudes();
  const Index stride = bits::pow2(qubit);
  const Index pairs = state.size() / 2;
  for (Index k = 0; k < pairs; ++k) {
    const Index i0 = bits::insert_zero(k, qubit);
    gate.apply(amps[i0], amps[i0 | stride]);
  }
}

void apply_local_controlled_gate(StatePartition& state, unsigned control, unsigned target, const GateMatrix& gate) {
  const unsigned m = state.num_local_qubits();
  if (control >= m || target >= m) throw ContractError("controlled local kernel requires local qubits");
  if (control == target) throw DomainError("control and target must differ");
  auto amps = state.amplitudes();
  const Index stride = bits::pow2(target);
  const Index pairs = state.size() / 2;
  for (Index k = 0; k < pairs; ++k) {
    const Index i0 = bits::insert_zero(k, target);
    if (bits::test(i0, control)) gate.apply(amps[i0], amps[i0 | stride]);
  }
}

void apply_diagonal_phase(StatePartition& state, const PhaseFunction& phases) {
  auto amps = state.amplitudes();
  for (Index off = 0; off < amps.size(); ++off) {
    const double phi = phases(state.global_index(off));
    amps[off] = cmul(amps[off], Amplitude{std::cos(phi), -std::sin(phi)});
  }
}

void apply_cut_phase(StatePartition& state, const Graph& graph, double gamma) {
  if (graph.num_vertices > state.num_qubits()) throw DomainError("graph has more vertices than the register has qubits");
  // Cut values are small integers; tabulate the phase factor per value.
  std::vector<Amplitude> factor(graph.edges.size() + 1);
  for (std::size_t c = 0; c < factor.size(); ++c) {
    const double phi = gamma * static_cast<double>(c);
    factor[c] = {std::cos(phi), -std::sin(phi)};
  }
  auto amps = state.amplitudes();
  for (Index off = 0; off < amps.size(); ++off) {
    amps[off] = cmul(amps[off], factor[graph.cut(state.global_index(off))]);
  }
}

double partial_norm2(const StatePartition& state) {
  const auto amps = state.amplitudes();
  return pairwise_sum(state.size(), [&](Index i) { return norm2(amps[i]); });
}

double partial_probability(const StatePartition& state, unsigned qubit) {
  if (qubit >= state.num_qubits()) throw DomainError("qubit index out of range");
  const auto amps = state.amplitudes();
  return pairwise_sum(state.size(), [&](Index i) {
    return bits::test(state.global_index(i), qubit) ? norm2(amps[i]) : 0.0;
  });
}

double partial_maxcut_expectation(const StatePartition& state, const Graph& graph) {
  if (graph.num_vertices > state.num_qubits()) {
    throw DomainError("graph has " + std::to_string(graph.num_vertices) + " vertices but the register has " +
                      std::to_string(state.num_qubits()) + " qubits");
  }
  const auto amps = state.amplitudes();
  return pairwise_sum(state.size(), [&](Index i) {
    return norm2(amps[i]) * static_cast<double>(graph.cut(state.global_index(i)));
  });
}

}  // namespace qpool
