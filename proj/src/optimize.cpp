#include "qpool/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qpool/circuit.hpp"

namespace qpool {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r < kTwoPi ? r : 0.0;
}

}  // namespace

Swarm init_swarm(unsigned particles, unsigned dim, const PsoHyperparams& params, RandomStream rng) {
  if (particles == 0 || dim == 0) throw DomainError("swarm needs at least one particle and one dimension");
  Swarm s{{}, {}, -std::numeric_limits<double>::infinity(), params, rng, 0};
  s.particles.resize(particles);
  for (auto& p : s.particles) {
    p.position = s.rng.uniform_vector(dim, 0.0, kTwoPi);
    p.velocity = s.rng.uniform_vector(dim, 0.0, kTwoPi);
  }
  return s;
}

void update_particle(Particle& p, std::span<const double> global_best, const PsoHyperparams& hp, double r_p,
                     double r_g) {
  const double sign = hp.sign == PsoSign::standard ? 1.0 : -1.0;
  for (std::size_t d = 0; d < p.position.size(); ++d) {
    const double x = p.position[d];
    p.velocity[d] = hp.omega * p.velocity[d] + hp.phi_p * r_p * sign * (p.best_position[d] - x) +
                    hp.phi_g * r_g * sign * (global_best[d] - x);
    p.position[d] = wrap(x + p.velocity[d]);
  }
}

void record_values(Swarm& swarm, std::span<const double> values) {
  if (values.size() != swarm.particles.size()) {
    throw DomainError("got " + std::to_string(values.size()) + " objective values for " +
                      std::to_string(swarm.particles.size()) + " particles");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    auto& p = swarm.particles[k];
    if (values[k] > p.best_value || p.best_position.empty()) {
      p.best_value = values[k];
      p.best_position = p.position;
    }
    if (p.best_value > swarm.global_best_value || swarm.global_best_position.empty()) {
      swarm.global_best_value = p.best_value;
      swarm.global_best_position = p.best_position;
    }
  }
}

void step_swarm(Swarm& swarm, std::span<const double> values) {
  record_values(swarm, values);
  for (auto& p : swarm.particles) {
    const double r_p = swarm.rng.uniform();
    const double r_g = swarm.rng.uniform();
    update_particle(p, swarm.global_best_position, swarm.params, r_p, r_g);
  }
  ++swarm.steps;
}

unsigned exact_maxcut(const Graph& graph) {
  if (graph.num_vertices > 30) throw CapabilityError("brute-force MaxCut is limited to 30 vertices");
  if (graph.num_vertices == 0) return 0;
  // Fixing the last vertex on side 0 halves the search without losing cuts.
  const Index count = bits::pow2(graph.num_vertices - 1);
  unsigned best = 0;
  for (Index a = 0; a < count; ++a) best = std::max(best, graph.cut(a));
  return best;
}

Graph random_3regular_graph(unsigned n, RandomStream& rng) {
  if (n % 2 != 0) throw DomainError("no 3-regular graph has an odd number of vertices");
  if (n < 4) throw DomainError("3-regular graphs need at least 4 vertices");
  std::vector<unsigned> points(3 * n);
  for (;;) {
    for (unsigned i = 0; i < points.size(); ++i) points[i] = i / 3;
    // Fisher-Yates with the stream.
    for (std::size_t i = points.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
      std::swap(points[i], points[j]);
    }
    std::set<Graph::Edge> seen;
    std::vector<Graph::Edge> edges;
    bool ok = true;
    for (std::size_t i = 0; i < points.size() && ok; i += 2) {
      const auto e = std::minmax(points[i], points[i + 1]);
      ok = e.first != e.second && seen.insert(e).second;
      edges.emplace_back(e);
    }
    if (!ok) continue;
    std::sort(edges.begin(), edges.end());
    return Graph(n, std::move(edges));
  }
}

std::vector<TracePoint> run_pso_qaoa(const std::shared_ptr<const Graph>& graph, const PsoRunOptions& opt,
                                     PoolContext& pool, RandomStream rng) {
  if (!graph) throw DomainError("PSO needs a graph");
  if (opt.particles == 0) throw DomainError("PSO needs at least one particle");
  if (opt.budget < opt.particles) {
    throw DomainError("budget " + std::to_string(opt.budget) + " cannot cover one round of " +
                      std::to_string(opt.particles) + " particles");
  }
  const unsigned exact = exact_maxcut(*graph);
  if (exact == 0) throw DomainError("graph has no edges; approximation ratio undefined");

  const Circuit circuit = build_qaoa_circuit(graph, opt.depth);
  auto reg = pool.make_register(graph->num_vertices);
  Swarm swarm = init_swarm(opt.particles, 2 * opt.depth, opt.params, rng);
  const unsigned states = pool.layout().num_states;
  const unsigned batches = opt.budget / opt.particles;

  std::vector<TracePoint> trace;
  trace.reserve(batches);
  for (unsigned b = 0; b < batches; ++b) {
    std::vector<double> values(opt.particles, 0.0);
    if (reg) {
      for (unsigned k = pool.state(); k < opt.particles; k += states) {
        reg->initialize_basis(0);
        reg->run(circuit, swarm.particles[k].position);
        const double ratio = reg->maxcut_expectation(*graph) / static_cast<double>(exact);
        if (pool.is_group_leader()) values[k] = ratio;
      }
    }
    values = pool.incoherent_sum(values);
    if (b + 1 < batches)
      step_swarm(swarm, values);
    else
      record_values(swarm, values);
    trace.push_back({static_cast<std::uint64_t>(b + 1) * opt.particles, swarm.global_best_value, b});
  }
  return trace;
}

}  // namespace qpool
