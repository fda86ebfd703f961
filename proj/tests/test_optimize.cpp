#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qpool/optimize.hpp"
#include "test_support.hpp"

using namespace qpool;
using namespace qpool::testing;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

Particle particle_at(double x, double v, double best) {
  Particle p;
  p.position = {x};
  p.velocity = {v};
  p.best_position = {best};
  return p;
}

std::vector<TracePoint> pso_on(int ranks, unsigned states, std::shared_ptr<const Graph> g, const PsoRunOptions& opt,
                               std::uint64_t seed) {
  std::vector<TracePoint> out;
  run_inproc(ranks, [&](Transport& world) {
    PoolContext pool(world, states, seed);
    auto trace = run_pso_qaoa(g, opt, pool, pool.stream(RngScope::pool));
    if (world.rank() == 0) out = std::move(trace);
  });
  return out;
}

}  // namespace

TEST(Swarm, InitDefaultsAndRanges) {
  const PsoHyperparams hp;
  EXPECT_EQ(hp.omega, 0.66);
  EXPECT_EQ(hp.phi_p, 1.6);
  EXPECT_EQ(hp.phi_g, 0.62);
  EXPECT_EQ(hp.sign, PsoSign::standard);

  const Swarm one = init_swarm(1, 1, hp, RandomStream(1, RngScope::pool));
  ASSERT_EQ(one.particles.size(), 1u);
  for (double x : {one.particles[0].position[0], one.particles[0].velocity[0]}) {
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, kTwoPi);
  }
  EXPECT_THROW(init_swarm(0, 1, hp, RandomStream(1, RngScope::pool)), DomainError);
}

TEST(Swarm, InitIsReproducibleAcrossRankCounts) {
  std::vector<std::vector<double>> firsts;
  for (int ranks : {1, 3, 4}) {
    run_inproc(ranks, [&](Transport& world) {
      PoolContext pool(world, 1, 55);
      const Swarm s = init_swarm(6, 4, {}, pool.stream(RngScope::pool));
      if (world.rank() == ranks - 1) firsts.push_back(s.particles[5].position);
    });
  }
  EXPECT_EQ(firsts[0], firsts[1]);
  EXPECT_EQ(firsts[0], firsts[2]);
}

TEST(Update, HandEvaluatedExample) {
  Particle p = particle_at(2.0, 1.0, 3.0);
  const double g[] = {5.0};
  update_particle(p, g, {}, 0.5, 0.5);
  EXPECT_NEAR(p.velocity[0], 2.39, 1e-12);
  EXPECT_NEAR(p.position[0], 4.39, 1e-12);
}

TEST(Update, ReversedSignFlipsAttraction) {
  Particle p = particle_at(2.0, 1.0, 3.0);
  const double g[] = {5.0};
  PsoHyperparams hp;
  hp.sign = PsoSign::reversed;
  update_particle(p, g, hp, 0.5, 0.5);
  EXPECT_NEAR(p.velocity[0], 0.66 - 0.8 - 0.93, 1e-12);
  EXPECT_NEAR(p.position[0], 2.0 + (0.66 - 0.8 - 0.93), 1e-12);
}

TEST(Update, AtBothBestsOnlyInertiaRemains) {
  Particle p = particle_at(1.25, 0.75, 1.25);
  const double g[] = {1.25};
  update_particle(p, g, {}, 0.9, 0.3);
  EXPECT_EQ(p.velocity[0], 0.66 * 0.75);
}

TEST(Update, GlobalTermInIsolation) {
  Particle p = particle_at(1.0, 3.0, 4.0);
  const double g[] = {2.5};
  PsoHyperparams hp;
  hp.omega = 0;
  update_particle(p, g, hp, 0.0, 0.4);
  EXPECT_DOUBLE_EQ(p.velocity[0], 0.62 * 0.4 * 1.5);
}

TEST(Update, PositionsWrapIntoPeriod) {
  Particle p = particle_at(6.0, 1.0, 6.0);
  const double g[] = {6.0};
  update_particle(p, g, {}, 0, 0);
  EXPECT_NEAR(p.position[0], 6.66 - kTwoPi, 1e-12);
  Particle q = particle_at(0.1, -1.0, 0.1);
  update_particle(q, std::span<const double>(q.best_position), {}, 0, 0);
  EXPECT_NEAR(q.position[0], 0.1 - 0.66 + kTwoPi, 1e-12);
}

TEST(Step, BestsAreMonotoneAndConsistent) {
  Swarm s = init_swarm(5, 2, {}, RandomStream(3, RngScope::pool));
  double last_global = -1;
  for (int step = 0; step < 50; ++step) {
    // Objective: a smooth function of position, so bests are verifiable.
    std::vector<double> v;
    for (const auto& p : s.particles) v.push_back(std::cos(p.position[0]) * std::sin(p.position[1]));
    step_swarm(s, v);
    EXPECT_GE(s.global_best_value, last_global);
    last_global = s.global_best_value;
    double max_best = -2;
    for (const auto& p : s.particles) {
      EXPECT_DOUBLE_EQ(p.best_value, std::cos(p.best_position[0]) * std::sin(p.best_position[1]));
      max_best = std::max(max_best, p.best_value);
    }
    EXPECT_EQ(s.global_best_value, max_best);
  }
  EXPECT_EQ(s.steps, 50u);
  EXPECT_THROW(step_swarm(s, std::vector<double>(4, 0.0)), DomainError);
}

TEST(Step, ZeroAccelerationIsBallistic) {
  PsoHyperparams hp;
  hp.phi_p = hp.phi_g = 0;
  Swarm a = init_swarm(3, 2, hp, RandomStream(8, RngScope::pool));
  Swarm b = a;
  for (int step = 0; step < 10; ++step) {
    step_swarm(a, std::vector<double>{1.0, 2.0, 3.0});
    step_swarm(b, std::vector<double>{-5.0, 9.0, 0.0});
  }
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(a.particles[k].position, b.particles[k].position);
}

TEST(ExactMaxcut, SmallGraphs) {
  EXPECT_EQ(exact_maxcut(Graph(3, {{0, 1}, {1, 2}, {0, 2}})), 2u);
  EXPECT_EQ(exact_maxcut(Graph(2, {{0, 1}})), 1u);
  std::vector<Graph::Edge> k33;
  for (unsigned u = 0; u < 3; ++u)
    for (unsigned v = 3; v < 6; ++v) k33.emplace_back(u, v);
  EXPECT_EQ(exact_maxcut(Graph(6, k33)), 9u);
  EXPECT_THROW(exact_maxcut(Graph(31, {})), CapabilityError);
}

TEST(RandomRegular, DegreesAndEdgeCounts) {
  RandomStream rng(19, RngScope::pool);
  const Graph k4 = random_3regular_graph(4, rng);
  EXPECT_EQ(k4, Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
  for (unsigned n : {6u, 8u, 10u, 16u}) {
    for (int rep = 0; rep < 5; ++rep) {
      const Graph g = random_3regular_graph(n, rng);
      EXPECT_EQ(g.edges.size(), 3 * n / 2);
      for (unsigned d : g.degrees()) EXPECT_EQ(d, 3u);
    }
  }
  EXPECT_THROW(random_3regular_graph(5, rng), DomainError);
  EXPECT_THROW(random_3regular_graph(2, rng), DomainError);
  RandomStream a(7, RngScope::pool), b(7, RngScope::pool);
  EXPECT_EQ(random_3regular_graph(12, a), random_3regular_graph(12, b));
}

TEST(PsoQaoa, SingleEdgeTraceBookkeeping) {
  auto g = std::make_shared<const Graph>(Graph(2, {{0, 1}}));
  const auto trace = pso_on(1, 1, g, {1, 4, 40, {}}, 5);
  ASSERT_EQ(trace.size(), 10u);
  for (std::size_t b = 0; b < trace.size(); ++b) {
    EXPECT_EQ(trace[b].evaluations, 4 * (b + 1));
    EXPECT_EQ(trace[b].step, b);
    EXPECT_GE(trace[b].global_best_ratio, 0.0);
    EXPECT_LE(trace[b].global_best_ratio, 1.0 + 1e-12);
    if (b) EXPECT_GE(trace[b].global_best_ratio, trace[b - 1].global_best_ratio);
  }
  EXPECT_GE(trace.back().global_best_ratio, trace.front().global_best_ratio);
  EXPECT_EQ(pso_on(1, 1, g, {1, 3, 10, {}}, 5).size(), 3u);
  EXPECT_EQ(pso_on(1, 1, g, {1, 7, 7, {}}, 5).size(), 1u);
}

TEST(PsoQaoa, PoolMatchesSerialRun) {
  RandomStream rng(101, RngScope::pool);
  auto g = std::make_shared<const Graph>(random_3regular_graph(6, rng));
  const PsoRunOptions opt{2, 6, 60, {}};
  const auto serial = pso_on(1, 1, g, opt, 9);
  const auto pooled = pso_on(4, 4, g, opt, 9);
  const auto mixed = pso_on(8, 2, g, opt, 9);
  ASSERT_EQ(serial.size(), pooled.size());
  for (std::size_t b = 0; b < serial.size(); ++b) {
    EXPECT_EQ(pooled[b], serial[b]);
    EXPECT_EQ(mixed[b], serial[b]);
  }
}

TEST(PsoQaoa, Errors) {
  auto g = std::make_shared<const Graph>(Graph(2, {{0, 1}}));
  EXPECT_THROW(pso_on(1, 1, g, {1, 8, 7, {}}, 0), DomainError);
  EXPECT_THROW(pso_on(1, 1, std::make_shared<const Graph>(Graph(2, {})), {1, 2, 4, {}}, 0), DomainError);
}
