#include "qpool/circuit.hpp"

#include <algorithm>
#include <sstream>

#include "text_util.hpp"

namespace qpool {

std::string_view mnemonic(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::CX: return "cx";
    case GateKind::CZ: return "cz";
    case GateKind::CustomU: return "u";
    case GateKind::DiagonalCost: return "diagcost";
    case GateKind::Noise: return "noise";
  }
  return "?";
}

bool GateSpec::operator==(const GateSpec& o) const {
  const bool graphs_equal = (!graph && !o.graph) || (graph && o.graph && *graph == *o.graph);
  return kind == o.kind && qubits == o.qubits && angle == o.angle && matrix == o.matrix && graphs_equal &&
         graph_path == o.graph_path && duration == o.duration;
}

Circuit::Circuit(unsigned num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits == 0) throw DomainError("a circuit needs at least one qubit");
}

std::size_t Circuit::slot_index(std::string_view name) const {
  const auto it = std::find(slots_.begin(), slots_.end(), name);
  if (it == slots_.end()) throw DomainError("unknown parameter slot `" + std::string(name) + "`");
  return static_cast<std::size_t>(it - slots_.begin());
}

Circuit& Circuit::declare_slot(const std::string& name) {
  if (name.empty()) throw DomainError("empty slot name");
  if (std::find(slots_.begin(), slots_.end(), name) == slots_.end()) slots_.push_back(name);
  return *this;
}

Circuit& Circuit::add(GateSpec gate) {
  const bool two_qubit = gate.kind == GateKind::CX || gate.kind == GateKind::CZ;
  const std::size_t arity = gate.kind == GateKind::DiagonalCost ? 0 : two_qubit ? 2 : 1;
  if (gate.qubits.size() != arity) {
    throw DomainError(std::string(mnemonic(gate.kind)) + " expects " + std::to_string(arity) + " qubit(s)");
  }
  for (unsigned q : gate.qubits) {
    if (q >= num_qubits_) throw DomainError("qubit " + std::to_string(q) + " out of range");
  }
  if (two_qubit && gate.qubits[0] == gate.qubits[1]) throw DomainError("control and target must differ");
  if (gate.kind == GateKind::DiagonalCost) {
    if (!gate.graph) throw DomainError("cost layer without a graph");
    if (gate.graph->num_vertices > num_qubits_) throw DomainError("cost graph has more vertices than qubits");
  }
  if (gate.duration < 0) throw DomainError("negative gate duration");
  if (gate.angle.is_slot()) declare_slot(gate.angle.slot);
  gates_.push_back(std::move(gate));
  return *this;
}

Circuit& Circuit::one(GateKind kind, unsigned q) {
  GateSpec g;
  g.kind = kind;
  g.qubits = {q};
  return add(std::move(g));
}

Circuit& Circuit::rotation(GateKind kind, unsigned q, Param angle) {
  GateSpec g;
  g.kind = kind;
  g.qubits = {q};
  g.angle = std::move(angle);
  return add(std::move(g));
}

Circuit& Circuit::cx(unsigned control, unsigned target) {
  GateSpec g;
  g.kind = GateKind::CX;
  g.qubits = {control, target};
  return add(std::move(g));
}

Circuit& Circuit::cz(unsigned control, unsigned target) {
  GateSpec g;
  g.kind = GateKind::CZ;
  g.qubits = {control, target};
  return add(std::move(g));
}

Circuit& Circuit::unitary(unsigned q, const GateMatrix& u) {
  GateSpec g;
  g.kind = GateKind::CustomU;
  g.qubits = {q};
  g.matrix = u;
  return add(std::move(g));
}

Circuit& Circuit::diagcost(std::shared_ptr<const Graph> graph, Param gamma, std::string path) {
  GateSpec g;
  g.kind = GateKind::DiagonalCost;
  g.graph = std::move(graph);
  g.graph_path = std::move(path);
  g.angle = std::move(gamma);
  return add(std::move(g));
}

Circuit& Circuit::noise(unsigned q, double duration) {
  GateSpec g;
  g.kind = GateKind::Noise;
  g.qubits = {q};
  g.duration = duration;
  return add(std::move(g));
}

Bindings Circuit::bind(const std::map<std::string, double>& values) const {
  Bindings out;
  out.reserve(slots_.size());
  for (const auto& name : slots_) {
    const auto it = values.find(name);
    if (it == values.end()) throw DomainError("parameter slot `" + name + "` is unbound");
    out.push_back(it->second);
  }
  return out;
}

double resolve(const Param& p, const Circuit& circuit, const Bindings& bindings) {
  if (!p.is_slot()) return p.value;
  if (bindings.size() != circuit.slots().size()) {
    throw DomainError("circuit has " + std::to_string(circuit.slots().size()) + " parameter slot(s) but " +
                      std::to_string(bindings.size()) + " value(s) were bound");
  }
  return p.scale * bindings[circuit.slot_index(p.slot)];
}

GateMatrix one_qubit_matrix(const GateSpec& gate, const Circuit& circuit, const Bindings& bindings) {
  switch (gate.kind) {
    case GateKind::H: return gates::hadamard();
    case GateKind::X: return gates::pauli_x();
    case GateKind::Y: return gates::pauli_y();
    case GateKind::Z: return gates::pauli_z();
    case GateKind::RX: return gates::rotation_x(resolve(gate.angle, circuit, bindings));
    case GateKind::RY: return gates::rotation_y(resolve(gate.angle, circuit, bindings));
    case GateKind::RZ: return gates::rotation_z(resolve(gate.angle, circuit, bindings));
    case GateKind::CX: return gates::pauli_x();
    case GateKind::CZ: return gates::pauli_z();
    case GateKind::CustomU: return gate.matrix;
    default: throw ContractError(std::string(mnemonic(gate.kind)) + " has no 2x2 matrix");
  }
}

GraphLoader file_graph_loader(std::filesystem::path base_dir) {
  return [dir = std::move(base_dir)](const std::string& ref) {
    const std::filesystem::path p(ref);
    return load_graph(p.is_absolute() ? p : dir / p);
  };
}

// ---------------------------------------------------------------------------
// Text format

namespace {

Param parse_param(const std::string& tok, std::size_t line_no) {
  if (tok.empty()) throw ParseError(line_no, "empty parameter");
  const auto star = tok.find("*$");
  if (tok[0] == '$') {
    if (tok.size() == 1) throw ParseError(line_no, "empty slot name");
    return Param::bound_to(tok.substr(1));
  }
  if (star != std::string::npos) {
    const double coef = detail::parse_double(tok.substr(0, star), line_no);
    if (star + 2 >= tok.size()) throw ParseError(line_no, "empty slot name");
    return Param::bound_to(tok.substr(star + 2), coef);
  }
  return Param::literal(detail::parse_double(tok, line_no));
}

std::string format_param(const Param& p) {
  if (!p.is_slot()) return detail::format_double(p.value);
  if (p.scale == 1.0) return "$" + p.slot;
  return detail::format_double(p.scale) + "*$" + p.slot;
}

const std::map<std::string, GateKind, std::less<>>& kinds() {
  static const std::map<std::string, GateKind, std::less<>> table = {
      {"h", GateKind::H},         {"x", GateKind::X},      {"y", GateKind::Y},
      {"z", GateKind::Z},         {"rx", GateKind::RX},    {"ry", GateKind::RY},
      {"rz", GateKind::RZ},       {"cx", GateKind::CX},    {"cz", GateKind::CZ},
      {"u", GateKind::CustomU},   {"noise", GateKind::Noise}, {"diagcost", GateKind::DiagonalCost},
  };
  return table;
}

std::size_t expected_operands(GateKind kind) {
  switch (kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z: return 1;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::CX:
    case GateKind::CZ:
    case GateKind::Noise:
    case GateKind::DiagonalCost: return 2;
    case GateKind::CustomU: return 9;
  }
  return 0;
}

}  // namespace

Circuit parse_circuit(std::string_view text, const GraphLoader& load) {
  std::optional<Circuit> circuit;
  std::size_t line_no = 0;
  for (const auto& line : detail::split_lines(text)) {
    ++line_no;
    auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    const std::string& op = tokens[0];

    if (op == "qubits") {
      if (circuit) throw ParseError(line_no, "duplicate `qubits` header");
      if (tokens.size() != 2) throw ParseError(line_no, "expected `qubits <n>`");
      const unsigned n = detail::parse_unsigned(tokens[1], line_no);
      if (n == 0) throw ParseError(line_no, "a circuit needs at least one qubit");
      circuit.emplace(n);
      continue;
    }
    if (!circuit) throw ParseError(line_no, "missing `qubits <n>` header before first instruction");
    if (op == "params") {
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i].size() < 2 || tokens[i][0] != '$') throw ParseError(line_no, "expected `$name`");
        circuit->declare_slot(tokens[i].substr(1));
      }
      continue;
    }

    const auto kind_it = kinds().find(op);
    if (kind_it == kinds().end()) throw ParseError(line_no, "unknown instruction `" + op + "`");
    const GateKind kind = kind_it->second;

    GateSpec gate;
    gate.kind = kind;
    if (tokens.size() > 1 && tokens.back().size() > 1 && tokens.back()[0] == '@' && kind != GateKind::Noise) {
      gate.duration = detail::parse_double(tokens.back().substr(1), line_no);
      if (gate.duration < 0) throw ParseError(line_no, "negative duration");
      tokens.pop_back();
    }
    if (tokens.size() - 1 != expected_operands(kind)) {
      throw ParseError(line_no, "`" + op + "` expects " + std::to_string(expected_operands(kind)) +
                                    " operand(s), got " + std::to_string(tokens.size() - 1));
    }

    auto qubit = [&](const std::string& tok) {
      const unsigned q = detail::parse_unsigned(tok, line_no);
      if (q >= circuit->num_qubits()) {
        throw ParseError(line_no, "qubit " + tok + " out of range for " + std::to_string(circuit->num_qubits()) +
                                      " qubits");
      }
      return q;
    };

    switch (kind) {
      case GateKind::H:
      case GateKind::X:
      case GateKind::Y:
      case GateKind::Z: gate.qubits = {qubit(tokens[1])}; break;
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
        gate.qubits = {qubit(tokens[1])};
        gate.angle = parse_param(tokens[2], line_no);
        break;
      case GateKind::CX:
      case GateKind::CZ:
        gate.qubits = {qubit(tokens[1]), qubit(tokens[2])};
        if (gate.qubits[0] == gate.qubits[1]) throw ParseError(line_no, "control and target must differ");
        break;
      case GateKind::CustomU: {
        gate.qubits = {qubit(tokens[1])};
        double v[8];
        for (int i = 0; i < 8; ++i) v[i] = detail::parse_double(tokens[static_cast<std::size_t>(i) + 2], line_no);
        gate.matrix = {{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}};
        break;
      }
      case GateKind::Noise:
        gate.qubits = {qubit(tokens[1])};
        gate.duration = detail::parse_double(tokens[2], line_no);
        if (gate.duration < 0) throw ParseError(line_no, "negative noise duration");
        break;
      case GateKind::DiagonalCost: {
        gate.graph_path = tokens[1];
        try {
          gate.graph = std::make_shared<const Graph>(load(tokens[1]));
        } catch (const ParseError& e) {
          throw ParseError(line_no, "graph `" + tokens[1] + "`: " + e.what());
        } catch (const std::exception& e) {
          throw ParseError(line_no, e.what());
        }
        if (gate.graph->num_vertices > circuit->num_qubits()) {
          throw ParseError(line_no, "graph has more vertices than the circuit has qubits");
        }
        gate.angle = parse_param(tokens[2], line_no);
        break;
      }
    }
    try {
      circuit->add(std::move(gate));
    } catch (const DomainError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!circuit) throw ParseError(0, "missing `qubits <n>` header");
  return std::move(*circuit);
}

Circuit load_circuit(const std::filesystem::path& path) {
  return parse_circuit(detail::read_file(path), file_graph_loader(path.parent_path()));
}

std::string serialize_circuit(const Circuit& circuit) {
  std::ostringstream out;
  out << "qubits " << circuit.num_qubits() << '\n';
  if (!circuit.slots().empty()) {
    out << "params";
    for (const auto& s : circuit.slots()) out << " $" << s;
    out << '\n';
  }
  for (const auto& g : circuit.gates()) {
    out << mnemonic(g.kind);
    switch (g.kind) {
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ: out << ' ' << g.qubits[0] << ' ' << format_param(g.angle); break;
      case GateKind::CustomU: {
        out << ' ' << g.qubits[0];
        for (const Amplitude& a : {g.matrix.u00, g.matrix.u01, g.matrix.u10, g.matrix.u11}) {
          out << ' ' << detail::format_double(a.real()) << ' ' << detail::format_double(a.imag());
        }
        break;
      }
      case GateKind::Noise: out << ' ' << g.qubits[0] << ' ' << detail::format_double(g.duration); break;
      case GateKind::DiagonalCost:
        if (g.graph_path.empty()) throw ContractError("cost layer graph has no file reference to serialize");
        out << ' ' << g.graph_path << ' ' << format_param(g.angle);
        break;
      default:
        for (unsigned q : g.qubits) out << ' ' << q;
    }
    if (g.kind != GateKind::Noise && g.duration != 1.0) out << " @" << detail::format_double(g.duration);
    out << '\n';
  }
  return out.str();
}

Circuit build_qaoa_circuit(std::shared_ptr<const Graph> graph, unsigned depth, std::string graph_path) {
  if (!graph) throw DomainError("QAOA needs a graph");
  if (depth == 0) throw DomainError("QAOA depth must be at least 1");
  const unsigned n = graph->num_vertices;
  Circuit c(n);
  for (unsigned k = 1; k <= depth; ++k) c.declare_slot("gamma_" + std::to_string(k));
  for (unsigned k = 1; k <= depth; ++k) c.declare_slot("beta_" + std::to_string(k));
  for (unsigned q = 0; q < n; ++q) c.h(q);
  for (unsigned k = 1; k <= depth; ++k) {
    c.diagcost(graph, Param::bound_to("gamma_" + std::to_string(k)), graph_path);
    for (unsigned q = 0; q < n; ++q) c.rx(q, Param::bound_to("beta_" + std::to_string(k), 2.0));
  }
  return c;
}

}  // namespace qpool
