#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <string>

#include "qpool/circuit.hpp"
#include "qpool/register.hpp"
#include "qpool/transport.hpp"

namespace py = pybind11;
using namespace qpool;

namespace {

/// Register on a private one-rank world.
class QubitRegister {
 public:
  explicit QubitRegister(unsigned num_qubits) : world_(1), group_(world_.endpoint(0), {0}), reg_(num_qubits, group_) {}

  void initialize(const std::string& kind, Index index) {
    if (kind == "base") {
      reg_.initialize_basis(index);
    } else if (kind == "uniform") {
      reg_.initialize_uniform();
    } else {
      throw DomainError("unknown initialization kind '" + kind + "' (expected 'base' or 'uniform')");
    }
  }

  Register& reg() { return reg_; }

 private:
  InProcWorld world_;
  Communicator group_;
  Register reg_;
};

py::array_t<std::complex<double>> amplitudes_view(py::object self) {
  auto& r = self.cast<QubitRegister&>();
  auto amps = r.reg().partition().amplitudes();
  py::array_t<std::complex<double>> view({static_cast<py::ssize_t>(amps.size())}, {sizeof(Amplitude)}, amps.data(),
                                         self);
  view.attr("setflags")(py::arg("write") = false);
  return view;
}

std::vector<double> run_circuit_file(const std::filesystem::path& path, const std::map<std::string, double>& bindings) {
  const Circuit circuit = load_circuit(path);
  QubitRegister r(circuit.num_qubits());
  r.reg().run(circuit, circuit.bind(bindings));
  std::vector<double> probabilities;
  for (unsigned q = 0; q < circuit.num_qubits(); ++q) probabilities.push_back(r.reg().probability(q));
  return probabilities;
}

}  // namespace

PYBIND11_MODULE(_qpool, m) {
  m.doc() = "Single-process bindings for the qpool simulator core";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);
  py::register_exception<TransportError>(m, "TransportError", PyExc_RuntimeError);
  py::register_exception<CapabilityError>(m, "CapabilityError", PyExc_RuntimeError);

  py::class_<QubitRegister>(m, "QubitRegister")
      .def(py::init<unsigned>(), py::arg("num_qubits"))
      .def_property_readonly("num_qubits", [](QubitRegister& r) { return r.reg().num_qubits(); })
      .def("Initialize", &QubitRegister::initialize, py::arg("kind"), py::arg("index") = 0)
      .def("ApplyPauliX", [](QubitRegister& r, unsigned q) { r.reg().apply(q, gates::pauli_x()); })
      .def("ApplyPauliY", [](QubitRegister& r, unsigned q) { r.reg().apply(q, gates::pauli_y()); })
      .def("ApplyPauliZ", [](QubitRegister& r, unsigned q) { r.reg().apply(q, gates::pauli_z()); })
      .def("ApplyHadamard", [](QubitRegister& r, unsigned q) { r.reg().apply(q, gates::hadamard()); })
      .def("ApplyRotationX", [](QubitRegister& r, unsigned q, double t) { r.reg().apply(q, gates::rotation_x(t)); })
      .def("ApplyRotationY", [](QubitRegister& r, unsigned q, double t) { r.reg().apply(q, gates::rotation_y(t)); })
      .def("ApplyRotationZ", [](QubitRegister& r, unsigned q, double t) { r.reg().apply(q, gates::rotation_z(t)); })
      .def("ApplyCPauliX",
           [](QubitRegister& r, unsigned c, unsigned t) { r.reg().apply_controlled(c, t, gates::pauli_x()); },
           py::arg("control"), py::arg("target"))
      .def("ApplyCPauliZ",
           [](QubitRegister& r, unsigned c, unsigned t) { r.reg().apply_controlled(c, t, gates::pauli_z()); },
           py::arg("control"), py::arg("target"))
      .def("GetProbability", [](QubitRegister& r, unsigned q) { return r.reg().probability(q); })
      .def("maxcut_expectation",
           [](QubitRegister& r, unsigned vertices, const std::vector<std::pair<unsigned, unsigned>>& edges) {
             std::vector<Graph::Edge> e(edges.begin(), edges.end());
             return r.reg().maxcut_expectation(Graph(vertices, std::move(e)));
           },
           py::arg("vertices"), py::arg("edges"))
      .def_property_readonly("amplitudes", &amplitudes_view);

  m.def("run_circuit_file", &run_circuit_file, py::arg("path"), py::arg("bindings") = std::map<std::string, double>{},
        "Run a circuit file on one rank and return P(q = 1) for every qubit.");
}
