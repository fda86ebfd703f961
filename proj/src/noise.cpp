#include "qpool/noise.hpp"

#include <algorithm>
#include <cmath>

namespace qpool {

NoiseModel::NoiseModel(double t1, double t2) : t1_(t1), t2_(t2) {
  if (!(t1 > 0) || !(t2 > 0)) throw DomainError("noise timescales must be positive");
  if (t2 > 2.0 * t1) {
    throw DomainError("t2 = " + std::to_string(t2) + " exceeds 2 t1 = " + std::to_string(2.0 * t1) +
                      ": pure-dephasing rate would be negative");
  }
}

NoiseAngles draw_noise_angles(const NoiseModel& model, double duration, RandomStream& stream) {
  if (duration < 0) throw DomainError("negative noise duration");
  const double sxy = std::sqrt(model.variance_xy(duration));
  const double sz = std::sqrt(std::max(0.0, model.variance_z(duration)));
  NoiseAngles a;
  a.x = sxy * stream.normal();
  a.y = sxy * stream.normal();
  a.z = sz * stream.normal();
  return a;
}

GateMatrix noise_rotation(const NoiseAngles& a) {
  return gates::rotation_z(a.z) * gates::rotation_y(a.y) * gates::rotation_x(a.x);
}

void apply_noise_gate(StatePartition& state, Communicator& group, unsigned qubit, double duration,
                      const NoiseModel& model, RandomStream& stream) {
  if (stream.scope() != RngScope::state) throw ContractError("noise gates draw from a state-scope stream");
  const NoiseAngles a = draw_noise_angles(model, duration, stream);
  if (a.x == 0.0 && a.y == 0.0 && a.z == 0.0) return;
  apply_one_qubit_gate(state, group, qubit, noise_rotation(a));
}

Circuit schedule_noise(const Circuit& circuit, Scheduling policy) {
  const unsigned n = circuit.num_qubits();
  const auto& gates = circuit.gates();

  auto touched = [n](const GateSpec& g) {
    std::vector<unsigned> qs = g.qubits;
    if (g.kind == GateKind::DiagonalCost) {
      qs.resize(n);
      for (unsigned q = 0; q < n; ++q) qs[q] = q;
    }
    return qs;
  };

  std::vector<double> start(gates.size(), 0.0), free_at(n, 0.0);
  double wall = 0.0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    if (g.duration < 0) throw DomainError("negative gate duration");
    if (g.kind == GateKind::Noise) continue;
    const auto qs = touched(g);
    double s = policy == Scheduling::sequential ? wall : 0.0;
    for (unsigned q : qs) s = std::max(s, free_at[q]);
    start[i] = s;
    for (unsigned q : qs) free_at[q] = s + g.duration;
    wall = std::max(wall, s + g.duration);
  }

  // Per qubit: index of its last scheduled gate.
  std::vector<std::ptrdiff_t> last(n, -1);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (gates[i].kind == GateKind::Noise) continue;
    for (unsigned q : touched(gates[i])) last[q] = static_cast<std::ptrdiff_t>(i);
  }

  Circuit out(n);
  for (const auto& s : circuit.slots()) out.declare_slot(s);
  auto add_noise = [&](unsigned q, double duration) {
    if (duration > 0) out.noise(q, duration);
  };
  for (unsigned q = 0; q < n; ++q)
    if (last[q] < 0) add_noise(q, wall);

  // Start of the previous gate on each qubit; negative until the first gate.
  std::vector<double> prev_start(n, -1.0);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    if (g.kind == GateKind::Noise) {
      out.add(g);
      continue;
    }
    const double end = start[i] + g.duration;
    const auto qs = touched(g);
    for (unsigned q : qs) add_noise(q, end - std::max(0.0, prev_start[q]));
    out.add(g);
    for (unsigned q : qs) {
      prev_start[q] = start[i];
      if (last[q] == static_cast<std::ptrdiff_t>(i)) add_noise(q, wall - start[i]);
    }
  }
  return out;
}

}  // namespace qpool
