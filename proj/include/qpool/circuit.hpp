#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qpool/gates.hpp"
#include "qpool/graph.hpp"

namespace qpool {

enum class GateKind { H, X, Y, Z, RX, RY, RZ, CX, CZ, CustomU, DiagonalCost, Noise };

std::string_view mnemonic(GateKind kind) noexcept;

/// A real gate parameter: either a literal or `scale * $slot`.
struct Param {
  double value = 0.0;
  std::string slot;
  double scale = 1.0;

  static Param literal(double v) { return {v, {}, 1.0}; }
  static Param bound_to(std::string name, double scale = 1.0) { return {0.0, std::move(name), scale}; }

  bool is_slot() const noexcept { return !slot.empty(); }
  bool operator==(const Param&) const = default;
};

struct GateSpec {
  GateKind kind = GateKind::H;
  std::vector<unsigned> qubits;  // empty for DiagonalCost, which acts on the whole register
  Param angle;                   // rotation angle or cost-layer gamma
  GateMatrix matrix;             // CustomU only
  std::shared_ptr<const Graph> graph;  // DiagonalCost only
  std::string graph_path;              // how the graph is referenced in circuit text
  double duration = 1.0;               // wall time in gate units; for Noise, the noise duration

  bool operator==(const GateSpec& other) const;
};

/// Values for a circuit's parameter slots, in `Circuit::slots()` order.
using Bindings = std::vector<double>;

/// Ordered gate list over a fixed number of qubits.
class Circuit {
 public:
  explicit Circuit(unsigned num_qubits);

  unsigned num_qubits() const noexcept { return num_qubits_; }
  const std::vector<GateSpec>& gates() const noexcept { return gates_; }
  const std::vector<std::string>& slots() const noexcept { return slots_; }
  std::size_t slot_index(std::string_view name) const;

  /// Validates qubit indices and registers any new slot names.
  Circuit& add(GateSpec gate);
  Circuit& declare_slot(const std::string& name);

  Circuit& h(unsigned q) { return one(GateKind::H, q); }
  Circuit& x(unsigned q) { return one(GateKind::X, q); }
  Circuit& y(unsigned q) { return one(GateKind::Y, q); }
  Circuit& z(unsigned q) { return one(GateKind::Z, q); }
  Circuit& rx(unsigned q, Param angle) { return rotation(GateKind::RX, q, std::move(angle)); }
  Circuit& ry(unsigned q, Param angle) { return rotation(GateKind::RY, q, std::move(angle)); }
  Circuit& rz(unsigned q, Param angle) { return rotation(GateKind::RZ, q, std::move(angle)); }
  Circuit& rx(unsigned q, double angle) { return rx(q, Param::literal(angle)); }
  Circuit& ry(unsigned q, double angle) { return ry(q, Param::literal(angle)); }
  Circuit& rz(unsigned q, double angle) { return rz(q, Param::literal(angle)); }
  Circuit& cx(unsigned control, unsigned target);
  Circuit& cz(unsigned control, unsigned target);
  Circuit& unitary(unsigned q, const GateMatrix& u);
  Circuit& diagcost(std::shared_ptr<const Graph> graph, Param gamma, std::string path = {});
  Circuit& noise(unsigned q, double duration);

  /// Slot values from a name map. Throws DomainError naming the first unbound slot.
  Bindings bind(const std::map<std::string, double>& values) const;

  bool operator==(const Circuit&) const = default;

 private:
  Circuit& one(GateKind kind, unsigned q);
  Circuit& rotation(GateKind kind, unsigned q, Param angle);

  unsigned num_qubits_;
  std::vector<GateSpec> gates_;
  std::vector<std::string> slots_;
};

/// Concrete angle of `p` under `bindings`. Throws DomainError when the
/// circuit has unbound slots.
double resolve(const Param& p, const Circuit& circuit, const Bindings& bindings);

/// Matrix of a one-qubit gate kind after resolving its angle.
GateMatrix one_qubit_matrix(const GateSpec& gate, const Circuit& circuit, const Bindings& bindings);

using GraphLoader = std::function<Graph(const std::string& reference)>;

/// Loads graph references relative to `base_dir`.
GraphLoader file_graph_loader(std::filesystem::path base_dir);

/// Line-oriented circuit text:
///   qubits <n>
///   params $a $b ...          (optional slot order declaration)
///   h|x|y|z <q>
///   rx|ry|rz <q> <angle>      angle: number | $slot | <coef>*$slot
///   cx|cz <c> <t>
///   u <q> <8 numbers>         row-major re/im pairs of a custom 2x2 matrix
///   noise <q> <duration>
///   diagcost <graphfile> <angle>
/// Any gate line may end with `@<duration>`. `#` starts a comment.
Circuit parse_circuit(std::string_view text, const GraphLoader& load_graph);
Circuit load_circuit(const std::filesystem::path& path);
/// Throws ContractError for cost layers whose graph has no path.
std::string serialize_circuit(const Circuit& circuit);

/// H on every qubit, then `depth` rounds of exp(-i gamma_k C) followed by
/// RX(2 beta_k) on every qubit. Slots: gamma_1..gamma_p, beta_1..beta_p.
Circuit build_qaoa_circuit(std::shared_ptr<const Graph> graph, unsigned depth, std::string graph_path = "graph.txt");

}  // namespace qpool
