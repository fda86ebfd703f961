// qpool: run circuits, gate benchmarks, PSO/QAOA studies and noisy ensembles
// over in-process or TCP-connected ranks.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "qpool/commands.hpp"
#include "qpool/socket_transport.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitTransport = 3;

struct WorldOptions {
  int ranks = 1;
  std::string transport = "inproc";
  std::string rendezvous;
  double timeout_seconds = 30.0;
};

void add_world_flags(CLI::App& cmd, WorldOptions& w) {
  cmd.add_option("--ranks", w.ranks, "In-process rank count")->check(CLI::PositiveNumber);
  cmd.add_option("--transport", w.transport, "inproc or socket")->check(CLI::IsMember({"inproc", "socket"}));
  cmd.add_option("--rendezvous", w.rendezvous,
                 "Socket mode: file with one host:port per rank (default: $QPOOL_RENDEZVOUS)");
  cmd.add_option("--timeout", w.timeout_seconds, "Collective timeout in seconds")->check(CLI::PositiveNumber);
}

/// Output sink: a file when --out is given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

/// Runs `body` on every rank of the configured world; `is_root` is true on world rank 0.
void launch(const WorldOptions& w, const std::function<void(qpool::Transport&, bool is_root)>& body) {
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(w.timeout_seconds * 1000));
  if (w.transport == "inproc") {
    qpool::run_inproc(w.ranks, [&](qpool::Transport& t) { body(t, t.rank() == 0); }, timeout);
    return;
  }
  const char* rank_env = std::getenv("QPOOL_RANK");
  if (!rank_env) throw CLI::ValidationError("--transport socket", "QPOOL_RANK is not set");
  std::string path = w.rendezvous;
  if (path.empty()) {
    const char* env = std::getenv("QPOOL_RENDEZVOUS");
    if (!env) throw CLI::ValidationError("--transport socket", "no rendezvous file given");
    path = env;
  }
  const int rank = std::stoi(rank_env);
  qpool::SocketTransport transport(rank, qpool::read_rendezvous(path), timeout);
  body(transport, rank == 0);
  transport.barrier();
}

std::map<std::string, double> parse_bindings(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--bind", "expected name=value, got " + item);
    std::string name = item.substr(0, eq);
    if (name[0] == '$') name.erase(0, 1);
    out[name] = std::stod(item.substr(eq + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed state-vector simulator with pools of states"};
  app.require_subcommand(1);

  WorldOptions world;
  std::uint64_t seed = 0;
  unsigned states = 1;
  std::string out_path;

  // run
  auto* run = app.add_subcommand("run", "Simulate a circuit file and report qubit probabilities");
  std::string circuit_path;
  std::vector<std::string> binds;
  std::optional<double> t1, t2;
  run->add_option("circuit", circuit_path, "Circuit file")->required()->check(CLI::ExistingFile);
  run->add_option("--bind", binds, "Slot binding name=value (repeatable)");
  run->add_option("--t1", t1, "Relaxation time in gate units (noise gates)");
  run->add_option("--t2", t2, "Dephasing time in gate units (noise gates)");

  // bench-gate
  auto* bench = app.add_subcommand("bench-gate", "Time a random one-qubit gate on every qubit");
  unsigned bench_n = 20, reps = 5;
  bench->add_option("-n,--qubits", bench_n, "Number of qubits")->required();
  bench->add_option("--repetitions", reps, "Gates per qubit");

  // qaoa-pso
  auto* pso = app.add_subcommand("qaoa-pso", "PSO over QAOA angles for random 3-regular MaxCut instances");
  qpool::QaoaPsoCommand pso_cmd;
  std::string pso_sign = "standard", instances_path;
  pso->add_option("-n,--vertices", pso_cmd.vertices, "Vertices (= qubits), even");
  pso->add_option("--graphs", pso_cmd.graphs, "Number of random graphs");
  pso->add_option("--depth", pso_cmd.depth, "QAOA depth p");
  pso->add_option("--particles", pso_cmd.particles, "PSO particles R");
  pso->add_option("--budget", pso_cmd.budget, "Objective evaluations per graph");
  pso->add_option("--pso-sign", pso_sign, "Attraction sign convention")->check(CLI::IsMember({"standard", "paper"}));
  pso->add_option("--omega", pso_cmd.params.omega, "Inertia");
  pso->add_option("--phi-p", pso_cmd.params.phi_p, "Personal-best acceleration");
  pso->add_option("--phi-g", pso_cmd.params.phi_g, "Global-best acceleration");
  pso->add_option("--instances-out", instances_path, "Per-graph trace CSV");

  // noise-ensemble
  auto* noise = app.add_subcommand("noise-ensemble", "Running incoherent average over noisy trajectories");
  qpool::NoiseEnsembleCommand noise_cmd;
  std::string observable = "p1:0", schedule = "asap";
  noise->add_option("circuit", circuit_path, "Circuit file")->required()->check(CLI::ExistingFile);
  noise->add_option("--t1", noise_cmd.t1, "Relaxation time in gate units");
  noise->add_option("--t2", noise_cmd.t2, "Dephasing time in gate units");
  noise->add_option("--trajectories", noise_cmd.trajectories, "Number of trajectories");
  noise->add_option("--observable", observable, "p1:<q>, z:<q> or maxcut:<graph file>");
  noise->add_option("--bind", binds, "Slot binding name=value (repeatable)");
  noise->add_option("--schedule", schedule, "Gate timing for inserted noise")
      ->check(CLI::IsMember({"asap", "sequential"}));

  for (auto* cmd : {run, bench, pso, noise}) {
    add_world_flags(*cmd, world);
    cmd->add_option("--seed", seed, "Master seed (64-bit unsigned)");
    cmd->add_option("--out", out_path, "Output path (default stdout)");
    if (cmd != bench) cmd->add_option("--states", states, "Number of pool states")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) {
      qpool::RunCommand cmd;
      cmd.circuit = circuit_path;
      cmd.states = states;
      cmd.seed = seed;
      cmd.bindings = parse_bindings(binds);
      if (t1 || t2) cmd.noise.emplace(t1.value_or(std::numeric_limits<double>::infinity()),
                                      t2.value_or(std::numeric_limits<double>::infinity()));
      launch(world, [&](qpool::Transport& t, bool root) {
        std::optional<Sink> sink;
        if (root) sink.emplace(out_path);
        qpool::cmd_run(t, cmd, root ? &sink->get() : nullptr);
      });
    } else if (*bench) {
      launch(world, [&](qpool::Transport& t, bool root) {
        std::optional<Sink> sink;
        if (root) sink.emplace(out_path);
        qpool::cmd_bench_gate(t, {bench_n, reps, seed}, root ? &sink->get() : nullptr);
      });
    } else if (*pso) {
      pso_cmd.seed = seed;
      pso_cmd.states = states;
      pso_cmd.params.sign = pso_sign == "paper" ? qpool::PsoSign::reversed : qpool::PsoSign::standard;
      launch(world, [&](qpool::Transport& t, bool root) {
        std::optional<Sink> sink;
        std::optional<std::ofstream> inst;
        if (root) {
          sink.emplace(out_path);
          if (!instances_path.empty()) inst.emplace(instances_path);
        }
        qpool::cmd_qaoa_pso(t, pso_cmd, root ? &sink->get() : nullptr, inst ? &*inst : nullptr);
      });
    } else if (*noise) {
      noise_cmd.circuit = circuit_path;
      noise_cmd.seed = seed;
      noise_cmd.states = states;
      noise_cmd.bindings = parse_bindings(binds);
      noise_cmd.observable = qpool::Observable::parse(observable);
      noise_cmd.scheduling = schedule == "sequential" ? qpool::Scheduling::sequential : qpool::Scheduling::asap;
      launch(world, [&](qpool::Transport& t, bool root) {
        std::optional<Sink> sink;
        if (root) sink.emplace(out_path);
        qpool::cmd_noise_ensemble(t, noise_cmd, root ? &sink->get() : nullptr);
      });
    }
  } catch (const qpool::TransportError& e) {
    std::cerr << "transport error: " << e.what() << '\n';
    return kExitTransport;
  } catch (const qpool::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::logic_error& e) {  // DomainError, ContractError, invalid_argument
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
