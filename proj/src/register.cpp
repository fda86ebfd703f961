#include "qpool/register.hpp"

namespace qpool {

namespace {

StatePartition make_partition(unsigned num_qubits, const Communicator& group) {
  const auto topo = RankTopology::make(static_cast<unsigned>(group.size()), num_qubits);
  if (topo.effective_ranks != static_cast<unsigned>(group.size())) {
    throw ContractError("state groups must have a power-of-two number of ranks");
  }
  return StatePartition(num_qubits, topo.num_local_qubits, static_cast<Index>(group.rank()));
}

}  // namespace

Register::Register(unsigned num_qubits, Communicator& group) : group_(group), state_(make_partition(num_qubits, group)) {
  init_basis_state(state_, 0);
}

void Register::set_noise(const NoiseModel& model, RandomStream stream) {
  if (stream.scope() != RngScope::state) throw ContractError("noise gates draw from a state-scope stream");
  noise_.emplace(Noise{model, stream});
}

void Register::apply_noise(unsigned qubit, double duration) {
  if (!noise_) throw ContractError("noise gate applied but no noise model is set");
  apply_noise_gate(state_, group_, qubit, duration, noise_->model, noise_->stream);
}

void Register::apply_gate(const GateSpec& g, const Circuit& circuit, const Bindings& bindings) {
  switch (g.kind) {
    case GateKind::CX:
    case GateKind::CZ: apply_controlled(g.qubits[0], g.qubits[1], one_qubit_matrix(g, circuit, bindings)); break;
    case GateKind::DiagonalCost: apply_cost_layer(*g.graph, resolve(g.angle, circuit, bindings)); break;
    case GateKind::Noise: apply_noise(g.qubits[0], g.duration); break;
    default: apply(g.qubits[0], one_qubit_matrix(g, circuit, bindings));
  }
}

void Register::run(const Circuit& circuit, const Bindings& bindings) {
  if (circuit.num_qubits() != num_qubits()) throw DomainError("circuit and register qubit counts differ");
  if (bindings.size() != circuit.slots().size()) {
    throw DomainError("circuit has " + std::to_string(circuit.slots().size()) + " parameter slot(s) but " +
                      std::to_string(bindings.size()) + " value(s) were bound");
  }
  for (const auto& g : circuit.gates()) apply_gate(g, circuit, bindings);
}

double Register::norm2() { return group_reduce_sum(partial_norm2(state_), group_); }

double Register::probability(unsigned qubit) { return group_reduce_sum(partial_probability(state_, qubit), group_); }

double Register::maxcut_expectation(const Graph& graph) {
  return group_reduce_sum(partial_maxcut_expectation(state_, graph), group_);
}

}  // namespace qpool
