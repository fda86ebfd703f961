#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "qpool/graph.hpp"
#include "qpool/pool.hpp"
#include "qpool/random.hpp"

namespace qpool {

/// Orientation of the PSO attraction terms. `standard` pulls particles toward
/// (best - position); `reversed` uses (position - best) literally.
enum class PsoSign { standard, reversed };

struct PsoHyperparams {
  double omega = 0.66;
  double phi_p = 1.6;
  double phi_g = 0.62;
  PsoSign sign = PsoSign::standard;
};

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_value = -std::numeric_limits<double>::infinity();
};

/// Maximizing particle swarm over a 2*pi-periodic box.
struct Swarm {
  std::vector<Particle> particles;
  std::vector<double> global_best_position;
  double global_best_value = -std::numeric_limits<double>::infinity();
  PsoHyperparams params;
  RandomStream rng;
  std::uint64_t steps = 0;
};

/// Positions and velocities uniform in [0, 2 pi); bests unset until the
/// first step. `rng` should be pool scoped so every rank builds the same swarm.
Swarm init_swarm(unsigned particles, unsigned dim, const PsoHyperparams& params, RandomStream rng);

/// v <- omega v + phi_p r_p (best - x) + phi_g r_g (global - x) (signs per
/// `params.sign`), then x <- wrap(x + v) into [0, 2 pi).
void update_particle(Particle& particle, std::span<const double> global_best, const PsoHyperparams& params,
                     double r_p, double r_g);

/// Records `values` (objective at the current positions, one per particle)
/// into the personal and global bests, then moves every particle with fresh
/// scalar r_p, r_g drawn per particle from the swarm stream.
void step_swarm(Swarm& swarm, std::span<const double> values);

/// Bests only; no motion. Used after the final evaluation batch.
void record_values(Swarm& swarm, std::span<const double> values);

/// Brute-force maximum cut, n <= 30.
unsigned exact_maxcut(const Graph& graph);

/// Simple 3-regular graph on n vertices from the pairing model, rejecting
/// draws with loops or repeated edges. Deterministic under `rng`.
Graph random_3regular_graph(unsigned n, RandomStream& rng);

struct TracePoint {
  std::uint64_t evaluations = 0;
  double global_best_ratio = 0.0;
  std::uint64_t step = 0;
  bool operator==(const TracePoint&) const = default;
};

struct PsoRunOptions {
  unsigned depth = 1;
  unsigned particles = 4;
  unsigned budget = 40;
  PsoHyperparams params;
};

/// QAOA MaxCut driven by PSO across the pool. Particle k is evaluated on pool
/// state k mod num_states; objective values are exchanged with a pool
/// reduction after each batch of `particles` evaluations, and the swarm is
/// advanced identically on every rank. Returns floor(budget / particles)
/// trace points, one per batch, on every rank.
std::vector<TracePoint> run_pso_qaoa(const std::shared_ptr<const Graph>& graph, const PsoRunOptions& options,
                                     PoolContext& pool, RandomStream rng);

}  // namespace qpool
