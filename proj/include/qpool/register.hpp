#pragma once

#include <optional>
#include <vector>

#include "qpool/circuit.hpp"
#include "qpool/distribution.hpp"
#include "qpool/noise.hpp"
#include "qpool/random.hpp"
#include "qpool/statevector.hpp"

namespace qpool {

/// An n-qubit state distributed over one group. Every member of the group
/// must call each mutating method and each observable in the same order with
/// the same arguments; observables return the group-wide value on all members.
class Register {
 public:
  Register(unsigned num_qubits, Communicator& group);

  unsigned num_qubits() const noexcept { return state_.num_qubits(); }
  StatePartition& partition() noexcept { return state_; }
  const StatePartition& partition() const noexcept { return state_; }
  Communicator& group() noexcept { return group_; }

  void initialize_basis(Index index) { init_basis_state(state_, index); }
  void initialize_uniform() { init_uniform(state_); }

  void apply(unsigned qubit, const GateMatrix& gate) { apply_one_qubit_gate(state_, group_, qubit, gate); }
  void apply_controlled(unsigned control, unsigned target, const GateMatrix& gate) {
    apply_controlled_gate(state_, group_, control, target, gate);
  }
  void apply_diagonal(const PhaseFunction& phases) { apply_diagonal_phase(state_, phases); }
  void apply_cost_layer(const Graph& graph, double gamma) { apply_cut_phase(state_, graph, gamma); }

  void set_noise(const NoiseModel& model, RandomStream stream);
  void clear_noise() noexcept { noise_.reset(); }
  /// Requires set_noise.
  void apply_noise(unsigned qubit, double duration);

  /// Runs every gate of `circuit`. Noise gates require set_noise.
  void run(const Circuit& circuit, const Bindings& bindings = {});
  /// Applies a single gate spec from `circuit`'s context.
  void apply_gate(const GateSpec& gate, const Circuit& circuit, const Bindings& bindings);

  double norm2();
  double probability(unsigned qubit);
  double expectation_z(unsigned qubit) { return 1.0 - 2.0 * probability(qubit); }
  double maxcut_expectation(const Graph& graph);
  /// Full vector on group rank 0, empty elsewhere.
  std::vector<Amplitude> gather() { return gather_state(state_, group_); }

 private:
  struct Noise {
    NoiseModel model;
    RandomStream stream;
  };
  Communicator& group_;
  StatePartition state_;
  std::optional<Noise> noise_;
};

}  // namespace qpool
