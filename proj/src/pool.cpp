#include "qpool/pool.hpp"

#include <cstring>

namespace qpool {

PoolLayout build_pool(unsigned total_ranks, unsigned num_states) {
  if (num_states == 0) throw DomainError("a pool needs at least one state");
  if (num_states > total_ranks) {
    throw DomainError(std::to_string(num_states) + " states cannot be spread over " + std::to_string(total_ranks) +
                      " ranks");
  }
  PoolLayout l;
  l.total_ranks = total_ranks;
  l.num_states = num_states;
  l.ranks_per_state = 1U << bits::floor_log2(total_ranks / num_states);
  return l;
}

std::vector<int> PoolLayout::members(unsigned state) const {
  if (state >= num_states) throw DomainError("state index out of range");
  std::vector<int> out(ranks_per_state);
  for (unsigned k = 0; k < ranks_per_state; ++k) out[k] = static_cast<int>(state * ranks_per_state + k);
  return out;
}

PoolContext::PoolContext(Transport& world, unsigned num_states, std::uint64_t seed)
    : world_(world), layout_(build_pool(static_cast<unsigned>(world.size()), num_states)), seed_(seed) {
  if (const auto s = layout_.group_of_rank(static_cast<unsigned>(world.rank()))) group_.emplace(world, layout_.members(*s));
}

unsigned PoolContext::state() const {
  if (!group_) throw ContractError("idle rank holds no pool state");
  return *layout_.group_of_rank(static_cast<unsigned>(world_.rank()));
}

Communicator& PoolContext::group() {
  if (!group_) throw ContractError("idle rank has no state group");
  return *group_;
}

RandomStream PoolContext::stream(RngScope scope) const {
  switch (scope) {
    case RngScope::pool: return {seed_, scope, 0};
    case RngScope::state: return {seed_, scope, state()};
    case RngScope::local: return {seed_, scope, static_cast<std::uint64_t>(world_.rank())};
  }
  throw ContractError("unknown scope");
}

std::optional<Register> PoolContext::make_register(unsigned num_qubits) {
  if (!group_) return std::nullopt;
  return std::optional<Register>(std::in_place, num_qubits, *group_);
}

double PoolContext::incoherent_sum(double value) {
  const double v[1] = {value};
  return incoherent_sum(std::span<const double>(v))[0];
}

std::vector<double> PoolContext::incoherent_sum(std::span<const double> values) {
  const auto payload = std::as_bytes(values);
  if (world_.rank() != 0) {
    world_.send(0, tags::kPoolReduce, payload);
  } else {
    // Rank 0 leads state 0; add the other leaders' contributions in state order.
    std::vector<Bytes> from(static_cast<std::size_t>(world_.size()));
    for (int r = 1; r < world_.size(); ++r) {
      from[static_cast<std::size_t>(r)] = world_.receive(r, tags::kPoolReduce);
      if (from[static_cast<std::size_t>(r)].size() != payload.size()) {
        throw TransportError("pool reduction called with mismatched lengths");
      }
    }
    std::vector<double> total(values.size(), 0.0);
    for (unsigned s = 0; s < layout_.num_states; ++s) {
      const int leader = static_cast<int>(s * layout_.ranks_per_state);
      std::vector<double> contrib(values.size());
      if (leader == 0)
        std::copy(values.begin(), values.end(), contrib.begin());
      else if (!values.empty())
        std::memcpy(contrib.data(), from[static_cast<std::size_t>(leader)].data(), payload.size());
      for (std::size_t i = 0; i < values.size(); ++i) total[i] += contrib[i];
    }
    for (int r = 1; r < world_.size(); ++r) world_.send(r, tags::kPoolReduce, std::as_bytes(std::span(total)));
    return total;
  }
  const Bytes msg = world_.receive(0, tags::kPoolReduce);
  if (msg.size() != payload.size()) throw TransportError("pool reduction result of unexpected length");
  std::vector<double> total(values.size());
  if (!total.empty()) std::memcpy(total.data(), msg.data(), msg.size());
  return total;
}

std::vector<double> PoolContext::broadcast(std::span<const double> values, std::size_t count) {
  if (world_.rank() == 0) {
    if (values.size() != count) throw DomainError("broadcast table has the wrong length");
    for (int r = 1; r < world_.size(); ++r) world_.send(r, tags::kPoolBroadcast, std::as_bytes(values));
    return {values.begin(), values.end()};
  }
  const Bytes msg = world_.receive(0, tags::kPoolBroadcast);
  if (msg.size() != count * sizeof(double)) throw TransportError("broadcast of unexpected length");
  std::vector<double> out(count);
  if (count) std::memcpy(out.data(), msg.data(), msg.size());
  return out;
}

void apply_gate_pool(PoolContext& pool, Register* reg, const GateSpec& gate,
                     std::optional<std::span<const double>> per_state_angles) {
  if (pool.active() && !reg) throw ContractError("active rank called apply_gate_pool without its register");
  Circuit context(reg ? reg->num_qubits() : 1);
  if (!per_state_angles) {
    if (gate.angle.is_slot()) throw DomainError("gate has an unbound slot and no per-state table");
    if (reg) reg->apply_gate(gate, context, {});
    return;
  }
  if (per_state_angles->size() != pool.layout().num_states) {
    throw DomainError("per-state table has " + std::to_string(per_state_angles->size()) + " entries for " +
                      std::to_string(pool.layout().num_states) + " states");
  }
  switch (gate.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::DiagonalCost: break;
    default: throw DomainError(std::string(mnemonic(gate.kind)) + " takes no per-state angle");
  }
  if (!reg) return;
  GateSpec local = gate;
  local.angle = Param::literal((*per_state_angles)[pool.state()]);
  reg->apply_gate(local, context, {});
}

void run_circuit_pool(PoolContext& pool, Register* reg, const Circuit& circuit,
                      std::span<const Bindings> per_state_bindings) {
  if (pool.active() && !reg) throw ContractError("active rank called run_circuit_pool without its register");
  const std::size_t states = pool.layout().num_states;
  const std::size_t slots = circuit.slots().size();
  std::vector<double> table;
  if (pool.world().rank() == 0) {
    if (per_state_bindings.size() != states) {
      throw DomainError("binding table has " + std::to_string(per_state_bindings.size()) + " rows for " +
                        std::to_string(states) + " states");
    }
    table.reserve(states * slots);
    for (const auto& row : per_state_bindings) {
      if (row.size() != slots) throw DomainError("binding row length differs from the circuit's slot count");
      table.insert(table.end(), row.begin(), row.end());
    }
  }
  table = pool.broadcast(table, states * slots);
  if (!reg) return;
  const auto s = pool.state();
  const Bindings mine(table.begin() + static_cast<std::ptrdiff_t>(s * slots),
                      table.begin() + static_cast<std::ptrdiff_t>((s + 1) * slots));
  reg->run(circuit, mine);
}

}  // namespace qpool
