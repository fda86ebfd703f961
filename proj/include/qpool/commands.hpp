#pragma once

// Rank bodies behind the command-line tool. Each runs on every rank of a
// world; only world rank 0 writes to the given streams (pass nullptr on the
// others). Return values are identical on every rank.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qpool/graph.hpp"
#include "qpool/noise.hpp"
#include "qpool/optimize.hpp"
#include "qpool/transport.hpp"

namespace qpool {

struct RunCommand {
  std::filesystem::path circuit;
  unsigned states = 1;
  std::uint64_t seed = 0;
  std::map<std::string, double> bindings;
  std::optional<NoiseModel> noise;  // required when the circuit has noise gates
};

struct RunReport {
  std::vector<double> probabilities;   // pool mean of P(q = 1) per qubit
  std::vector<Amplitude> amplitudes;   // state 0, only for n <= 10
};

RunReport cmd_run(Transport& world, const RunCommand& cmd, std::ostream* out);

struct BenchGateCommand {
  unsigned num_qubits = 20;
  unsigned repetitions = 5;
  std::uint64_t seed = 0;
};

struct BenchRow {
  unsigned qubit = 0;
  double mean_seconds = 0.0;
  double min_seconds = 0.0;
  std::uint64_t messages = 0;  // per gate, sent by rank 0
  std::uint64_t bytes = 0;     // per gate, payload sent by rank 0
};

/// CSV: qubit,mean_seconds,messages,bytes,ranks,n,min_seconds
std::vector<BenchRow> cmd_bench_gate(Transport& world, const BenchGateCommand& cmd, std::ostream* csv);

struct QaoaPsoCommand {
  unsigned vertices = 8;
  unsigned graphs = 20;
  unsigned depth = 2;
  unsigned particles = 8;
  unsigned budget = 400;
  unsigned states = 1;
  std::uint64_t seed = 0;
  PsoHyperparams params;
};

struct QaoaPsoResult {
  std::vector<std::vector<TracePoint>> traces;  // per graph
  std::vector<TracePoint> mean;                 // ratio averaged over graphs, per batch
};

/// Aggregate CSV: evaluations,global_best_ratio,step
/// Instance CSV:  graph,evaluations,global_best_ratio,step
QaoaPsoResult cmd_qaoa_pso(Transport& world, const QaoaPsoCommand& cmd, std::ostream* aggregate,
                           std::ostream* instances);

/// Observable measured at the end of each trajectory.
struct Observable {
  enum class Kind { probability, z, maxcut };
  Kind kind = Kind::probability;
  unsigned qubit = 0;
  std::shared_ptr<const Graph> graph;

  /// `p1:<q>`, `z:<q>` or `maxcut:<graph file>`.
  static Observable parse(const std::string& text, const std::filesystem::path& base_dir = {});
};

struct NoiseEnsembleCommand {
  std::filesystem::path circuit;
  double t1 = 500.0;
  double t2 = 250.0;
  unsigned trajectories = 100;
  unsigned states = 1;
  std::uint64_t seed = 0;
  Observable observable;
  std::map<std::string, double> bindings;
  Scheduling scheduling = Scheduling::asap;
};

struct NoiseEnsembleResult {
  std::vector<double> values;        // per trajectory
  std::vector<double> running_mean;  // running_mean[k] = mean of values[0..k]
  double noiseless = 0.0;
};

/// Trajectory t runs on pool state t mod states with a state-scope stream
/// keyed by t, so results do not depend on the pool size. Circuits without
/// explicit noise gates are passed through schedule_noise first.
/// CSV: trajectories,running_mean,noiseless
NoiseEnsembleResult cmd_noise_ensemble(Transport& world, const NoiseEnsembleCommand& cmd, std::ostream* csv);

/// Same, for an in-memory circuit.
NoiseEnsembleResult run_noise_ensemble(Transport& world, const Circuit& circuit, const NoiseEnsembleCommand& cmd,
                                       std::ostream* csv);

}  // namespace qpool
