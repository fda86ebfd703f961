#include "qpool/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <numbers>

#include "qpool/circuit.hpp"
#include "qpool/pool.hpp"
#include "qpool/register.hpp"
#include "text_util.hpp"

namespace qpool {

namespace {

using detail::format_double;

bool has_noise_gates(const Circuit& c) {
  return std::any_of(c.gates().begin(), c.gates().end(), [](const GateSpec& g) { return g.kind == GateKind::Noise; });
}

Circuit without_noise(const Circuit& c) {
  Circuit out(c.num_qubits());
  for (const auto& s : c.slots()) out.declare_slot(s);
  for (const auto& g : c.gates())
    if (g.kind != GateKind::Noise) out.add(g);
  return out;
}

double measure(Register& reg, const Observable& obs) {
  switch (obs.kind) {
    case Observable::Kind::probability: return reg.probability(obs.qubit);
    case Observable::Kind::z: return reg.expectation_z(obs.qubit);
    case Observable::Kind::maxcut: return reg.maxcut_expectation(*obs.graph);
  }
  return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------

RunReport cmd_run(Transport& world, const RunCommand& cmd, std::ostream* out) {
  const Circuit circuit = load_circuit(cmd.circuit);
  const Bindings bindings = circuit.bind(cmd.bindings);
  const bool noisy = has_noise_gates(circuit);
  if (noisy && !cmd.noise) throw DomainError("circuit contains noise gates; set --t1 and --t2");

  PoolContext pool(world, cmd.states, cmd.seed);
  auto reg = pool.make_register(circuit.num_qubits());
  const unsigned n = circuit.num_qubits();

  std::vector<double> probs(n, 0.0);
  std::vector<Amplitude> amps;
  if (reg) {
    if (noisy) reg->set_noise(*cmd.noise, pool.stream(RngScope::state));
    reg->run(circuit, bindings);
    for (unsigned q = 0; q < n; ++q) {
      const double p = reg->probability(q);
      if (pool.is_group_leader()) probs[q] = p;
    }
    if (n <= 10 && pool.state() == 0) amps = reg->gather();
  }
  probs = pool.incoherent_sum(probs);
  for (double& p : probs) p /= static_cast<double>(cmd.states);

  if (out) {
    *out << "# n=" << n << " ranks=" << world.size() << " states=" << cmd.states << " seed=" << cmd.seed << '\n';
    *out << "qubit,probability\n";
    for (unsigned q = 0; q < n; ++q) *out << q << ',' << format_double(probs[q]) << '\n';
    if (!amps.empty()) {
      *out << "index,re,im\n";
      for (std::size_t i = 0; i < amps.size(); ++i) {
        *out << i << ',' << format_double(amps[i].real()) << ',' << format_double(amps[i].imag()) << '\n';
      }
    }
  }
  return {probs, amps};
}

// ---------------------------------------------------------------------------

std::vector<BenchRow> cmd_bench_gate(Transport& world, const BenchGateCommand& cmd, std::ostream* csv) {
  if (cmd.repetitions == 0) throw DomainError("need at least one repetition");
  PoolContext pool(world, 1, cmd.seed);
  auto reg = pool.make_register(cmd.num_qubits);
  RandomStream rng = pool.stream(RngScope::pool);
  std::vector<BenchRow> rows;

  for (unsigned q = 0; q < cmd.num_qubits; ++q) {
    BenchRow row;
    row.qubit = q;
    row.min_seconds = std::numeric_limits<double>::infinity();
    TransportStats traffic;
    double total = 0.0;
    for (unsigned rep = 0; rep < cmd.repetitions; ++rep) {
      const double a = rng.uniform(0.0, 2 * std::numbers::pi);
      const double b = rng.uniform(0.0, 2 * std::numbers::pi);
      const double c = rng.uniform(0.0, 2 * std::numbers::pi);
      const GateMatrix gate = gates::rotation_z(c) * gates::rotation_y(b) * gates::rotation_x(a);
      world.barrier();
      const auto before = world.stats();
      const auto t0 = std::chrono::steady_clock::now();
      if (reg) reg->apply(q, gate);
      const auto t1 = std::chrono::steady_clock::now();
      const auto delta = world.stats() - before;
      traffic.messages_sent += delta.messages_sent;
      traffic.bytes_sent += delta.bytes_sent;
      const double secs = std::chrono::duration<double>(t1 - t0).count();
      total += secs;
      row.min_seconds = std::min(row.min_seconds, secs);
    }
    row.mean_seconds = total / cmd.repetitions;
    row.messages = traffic.messages_sent / cmd.repetitions;
    row.bytes = traffic.bytes_sent / cmd.repetitions;
    rows.push_back(row);
  }
  world.barrier();

  if (csv) {
    *csv << "qubit,mean_seconds,messages,bytes,ranks,n,min_seconds\n";
    for (const auto& r : rows) {
      *csv << r.qubit << ',' << format_double(r.mean_seconds) << ',' << r.messages << ',' << r.bytes << ','
           << world.size() << ',' << cmd.num_qubits << ',' << format_double(r.min_seconds) << '\n';
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

QaoaPsoResult cmd_qaoa_pso(Transport& world, const QaoaPsoCommand& cmd, std::ostream* aggregate,
                           std::ostream* instances) {
  if (cmd.vertices % 2 != 0) throw DomainError("vertex count must be even");
  if (cmd.vertices > 20) throw CapabilityError("desk-scale studies are limited to 20 vertices");
  if (cmd.graphs == 0) throw DomainError("need at least one graph");
  PoolContext pool(world, cmd.states, cmd.seed);
  const RandomStream root = pool.stream(RngScope::pool);

  QaoaPsoResult result;
  PsoRunOptions opt{cmd.depth, cmd.particles, cmd.budget, cmd.params};
  for (unsigned g = 0; g < cmd.graphs; ++g) {
    RandomStream graph_rng = root.derive(2 * std::uint64_t{g});
    auto graph = std::make_shared<const Graph>(random_3regular_graph(cmd.vertices, graph_rng));
    result.traces.push_back(run_pso_qaoa(graph, opt, pool, root.derive(2 * std::uint64_t{g} + 1)));
  }

  const std::size_t batches = result.traces.front().size();
  for (std::size_t b = 0; b < batches; ++b) {
    double sum = 0.0;
    for (const auto& t : result.traces) sum += t[b].global_best_ratio;
    result.mean.push_back({result.traces.front()[b].evaluations, sum / cmd.graphs, b});
  }

  if (aggregate) {
    *aggregate << "evaluations,global_best_ratio,step\n";
    for (const auto& p : result.mean) *aggregate << p.evaluations << ',' << format_double(p.global_best_ratio) << ',' << p.step << '\n';
  }
  if (instances) {
    *instances << "graph,evaluations,global_best_ratio,step\n";
    for (std::size_t g = 0; g < result.traces.size(); ++g)
      for (const auto& p : result.traces[g])
        *instances << g << ',' << p.evaluations << ',' << format_double(p.global_best_ratio) << ',' << p.step << '\n';
  }
  return result;
}

// ---------------------------------------------------------------------------

Observable Observable::parse(const std::string& text, const std::filesystem::path& base_dir) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError(0, "observable must look like p1:<q>, z:<q> or maxcut:<graph>");
  const std::string kind = text.substr(0, colon), arg = text.substr(colon + 1);
  Observable o;
  if (kind == "p1" || kind == "z") {
    o.kind = kind == "z" ? Kind::z : Kind::probability;
    o.qubit = detail::parse_unsigned(arg, 0);
  } else if (kind == "maxcut") {
    o.kind = Kind::maxcut;
    const std::filesystem::path p(arg);
    o.graph = std::make_shared<const Graph>(load_graph(p.is_absolute() ? p : base_dir / p));
  } else {
    throw ParseError(0, "unknown observable kind `" + kind + "`");
  }
  return o;
}

NoiseEnsembleResult cmd_noise_ensemble(Transport& world, const NoiseEnsembleCommand& cmd, std::ostream* csv) {
  return run_noise_ensemble(world, load_circuit(cmd.circuit), cmd, csv);
}

NoiseEnsembleResult run_noise_ensemble(Transport& world, const Circuit& input, const NoiseEnsembleCommand& cmd,
                                       std::ostream* csv) {
  const NoiseModel model(cmd.t1, cmd.t2);
  if (cmd.trajectories == 0) throw DomainError("need at least one trajectory");
  const Circuit noisy = has_noise_gates(input) ? input : schedule_noise(input, cmd.scheduling);
  const Circuit clean = without_noise(input);
  const Bindings bindings = input.bind(cmd.bindings);
  if (cmd.observable.kind != Observable::Kind::maxcut && cmd.observable.qubit >= input.num_qubits()) {
    throw DomainError("observable qubit out of range");
  }

  PoolContext pool(world, cmd.states, cmd.seed);
  auto reg = pool.make_register(input.num_qubits());

  NoiseEnsembleResult result;
  std::vector<double> values(cmd.trajectories, 0.0);
  double noiseless = 0.0;
  if (reg) {
    reg->initialize_basis(0);
    reg->run(clean, bindings);
    noiseless = measure(*reg, cmd.observable);
    for (unsigned t = pool.state(); t < cmd.trajectories; t += cmd.states) {
      reg->initialize_basis(0);
      reg->set_noise(model, RandomStream(cmd.seed, RngScope::state, t));
      reg->run(noisy, bindings);
      const double v = measure(*reg, cmd.observable);
      if (pool.is_group_leader()) values[t] = v;
    }
  }
  result.values = pool.incoherent_sum(values);
  // Every state computed the same noiseless value; take state 0's.
  result.noiseless = pool.broadcast(std::vector<double>{noiseless}, 1)[0];

  double sum = 0.0;
  for (std::size_t k = 0; k < result.values.size(); ++k) {
    sum += result.values[k];
    result.running_mean.push_back(sum / static_cast<double>(k + 1));
  }

  if (csv) {
    *csv << "trajectories,running_mean,noiseless\n";
    for (std::size_t k = 0; k < result.running_mean.size(); ++k) {
      *csv << k + 1 << ',' << format_double(result.running_mean[k]) << ',' << format_double(result.noiseless) << '\n';
    }
  }
  return result;
}

}  // namespace qpool
