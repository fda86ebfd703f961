#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "qpool/noise.hpp"
#include "qpool/register.hpp"
#include "test_support.hpp"

using namespace qpool;
using namespace qpool::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ensemble {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Ensemble summarize(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

enum class Basis { x, z };

/// One-qubit trajectories: prepare |+> (x) or |0> (z), apply noise gates of
/// the given durations, and record <X> or <Z>.
std::vector<double> trajectories(const NoiseModel& model, const std::vector<double>& durations, Basis basis,
                                 unsigned count, std::uint64_t seed) {
  std::vector<double> out;
  run_inproc(1, [&](Transport& world) {
    Communicator group(world, {0});
    Register reg(1, group);
    for (unsigned t = 0; t < count; ++t) {
      reg.initialize_basis(0);
      if (basis == Basis::x) reg.apply(0, gates::hadamard());
      reg.set_noise(model, RandomStream(seed, RngScope::state, t));
      for (double d : durations) reg.apply_noise(0, d);
      const auto a = reg.partition().amplitudes();
      out.push_back(basis == Basis::x ? 2.0 * (std::conj(a[0]) * a[1]).real() : std::norm(a[0]) - std::norm(a[1]));
    }
  });
  return out;
}

std::vector<double> noise_durations(const Circuit& c, unsigned q) {
  std::vector<double> d;
  for (const auto& g : c.gates())
    if (g.kind == GateKind::Noise && g.qubits[0] == q) d.push_back(g.duration);
  return d;
}

}  // namespace

TEST(NoiseModel, Validation) {
  EXPECT_THROW(NoiseModel(0.0, 1.0), DomainError);
  EXPECT_THROW(NoiseModel(1.0, -1.0), DomainError);
  EXPECT_THROW(NoiseModel(10.0, 20.5), DomainError);
  EXPECT_NO_THROW(NoiseModel(10.0, 20.0));
  EXPECT_NO_THROW(NoiseModel::noiseless());
  const NoiseModel m(500, 250);
  EXPECT_DOUBLE_EQ(m.variance_xy(5), 0.01);
  EXPECT_DOUBLE_EQ(m.variance_z(5), 2 * 5 * (1.0 / 250 - 1.0 / 1000));
}

TEST(NoiseGate, InfiniteTimescalesAndZeroDurationAreIdentity) {
  std::mt19937_64 rng(3);
  const auto psi = to_std(random_state_vector(3, rng));
  for (auto [model, duration] : {std::pair{NoiseModel::noiseless(), 5.0}, std::pair{NoiseModel(10, 10), 0.0}}) {
    run_inproc(1, [&](Transport& world) {
      Communicator group(world, {0});
      Register reg(3, group);
      std::copy(psi.begin(), psi.end(), reg.partition().amplitudes().begin());
      reg.set_noise(model, RandomStream(1, RngScope::state, 0));
      for (unsigned q = 0; q < 3; ++q) reg.apply_noise(q, duration);
      EXPECT_EQ(reg.gather(), psi);
    });
  }
}

TEST(NoiseGate, AlwaysConsumesThreeNormals) {
  RandomStream s(1, RngScope::state, 0);
  (void)draw_noise_angles(NoiseModel::noiseless(), 3.0, s);
  EXPECT_EQ(s.counter(), 6u);
  EXPECT_THROW(draw_noise_angles(NoiseModel(1, 1), -1.0, s), DomainError);
}

TEST(NoiseGate, RequiresStateScopedStream) {
  run_inproc(1, [](Transport& world) {
    Communicator group(world, {0});
    Register reg(1, group);
    EXPECT_THROW(reg.apply_noise(0, 1.0), ContractError);
    EXPECT_THROW(reg.set_noise(NoiseModel(1, 1), RandomStream(0, RngScope::pool)), ContractError);
  });
}

TEST(NoiseGate, RotationOrderIsXThenYThenZ) {
  const NoiseAngles a{0.3, -0.7, 1.1};
  const GateMatrix expected = gates::rotation_z(a.z) * gates::rotation_y(a.y) * gates::rotation_x(a.x);
  EXPECT_EQ(noise_rotation(a), expected);
  EXPECT_TRUE(noise_rotation(a).is_unitary(1e-12));
}

TEST(NoiseGate, TrajectoriesPreserveNorm) {
  std::mt19937_64 rng(8);
  const Circuit c = random_circuit(4, 30, rng);
  run_inproc(2, [&](Transport& world) {
    Communicator group(world, {0, 1});
    Register reg(4, group);
    reg.set_noise(NoiseModel(20, 15), RandomStream(5, RngScope::state, 0));
    reg.run(schedule_noise(c));
    EXPECT_NEAR(reg.norm2(), 1.0, 1e-12);
  });
}

TEST(NoiseEnsemble, PureDephasingDecaysCoherence) {
  const double t = 100.0, t2 = 100.0;
  const auto e = summarize(trajectories(NoiseModel(kInf, t2), {t}, Basis::x, 2000, 11));
  EXPECT_LT(std::abs(e.mean - std::exp(-t / t2)), 3 * e.stderr_) << e.mean << " +- " << e.stderr_;
}

TEST(NoiseEnsemble, RelaxationAndDephasingTargets) {
  const NoiseModel model(500, 250);
  const auto x = summarize(trajectories(model, {250.0}, Basis::x, 2000, 21));
  EXPECT_LT(std::abs(x.mean - std::exp(-1.0)), 3 * x.stderr_) << x.mean << " +- " << x.stderr_;
  const auto z = summarize(trajectories(model, {500.0}, Basis::z, 2000, 22));
  EXPECT_LT(std::abs(z.mean - std::exp(-1.0)), 3 * z.stderr_) << z.mean << " +- " << z.stderr_;
}

TEST(NoiseEnsemble, DurationsCompose) {
  const NoiseModel model(80, 60);
  for (Basis b : {Basis::x, Basis::z}) {
    const auto split = summarize(trajectories(model, {20.0, 35.0}, b, 2000, 31));
    const auto whole = summarize(trajectories(model, {55.0}, b, 2000, 32));
    const double se = std::hypot(split.stderr_, whole.stderr_);
    EXPECT_LT(std::abs(split.mean - whole.mean), 3 * se);
  }
}

TEST(NoiseEnsemble, StandardErrorScalesAsInverseSqrtN) {
  const NoiseModel model(500, 250);
  const auto values = trajectories(model, {250.0}, Basis::x, 4000, 41);
  std::vector<double> logn, logse;
  for (std::size_t n : {20u, 80u, 320u, 1280u}) {
    // Spread of the mean over disjoint blocks of size n.
    std::vector<double> means;
    for (std::size_t start = 0; start + n <= values.size() && means.size() < 40; start += n) {
      means.push_back(std::accumulate(values.begin() + start, values.begin() + start + n, 0.0) / n);
    }
    if (means.size() < 3) continue;
    const auto s = summarize(means);
    logn.push_back(std::log(static_cast<double>(n)));
    logse.push_back(std::log(s.stderr_ * std::sqrt(static_cast<double>(means.size()))));
  }
  const double mx = std::accumulate(logn.begin(), logn.end(), 0.0) / logn.size();
  const double my = std::accumulate(logse.begin(), logse.end(), 0.0) / logse.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < logn.size(); ++i) {
    sxy += (logn[i] - mx) * (logse[i] - my);
    sxx += (logn[i] - mx) * (logn[i] - mx);
  }
  const double alpha = -sxy / sxx;
  EXPECT_GE(alpha, 0.3);
  EXPECT_LE(alpha, 0.7);
}

TEST(Schedule, EmptyCircuitUnchanged) {
  const Circuit empty(3);
  EXPECT_EQ(schedule_noise(empty), empty);
}

TEST(Schedule, SequentialPattern) {
  Circuit c(10);
  for (unsigned q = 0; q < 10; ++q) c.rx(q, 0.1 * q);
  const Circuit s = schedule_noise(c, Scheduling::sequential);
  for (unsigned q = 0; q < 10; ++q) {
    EXPECT_EQ(noise_durations(s, q), (std::vector<double>{q + 1.0, 10.0 - q})) << "qubit " << q;
  }
  // Noise, gate, noise per qubit in circuit order.
  ASSERT_EQ(s.gates().size(), 30u);
  for (unsigned q = 0; q < 10; ++q) {
    EXPECT_EQ(s.gates()[3 * q].kind, GateKind::Noise);
    EXPECT_EQ(s.gates()[3 * q + 1].kind, GateKind::RX);
    EXPECT_EQ(s.gates()[3 * q + 2].kind, GateKind::Noise);
  }
}

TEST(Schedule, ParallelGatesAccrueEqualNoise) {
  Circuit c(2);
  c.h(0).x(1);
  const Circuit s = schedule_noise(c);
  EXPECT_EQ(noise_durations(s, 0), noise_durations(s, 1));
  EXPECT_EQ(noise_durations(s, 0), (std::vector<double>{1.0, 1.0}));
}

TEST(Schedule, IdleQubitGetsWholeWallTime) {
  Circuit c(3);
  c.h(0).cx(0, 1);
  c.add(GateSpec{GateKind::RX, {1}, Param::literal(0.2), {}, nullptr, {}, 2.5});
  const Circuit s = schedule_noise(c);
  EXPECT_EQ(noise_durations(s, 2), (std::vector<double>{4.5}));
  // Qubit 0: h [0,1], cx [1,2]; wall 4.5.
  EXPECT_EQ(noise_durations(s, 0), (std::vector<double>{1.0, 2.0, 3.5}));
  // Qubit 1: cx [1,2], rx [2,4.5].
  EXPECT_EQ(noise_durations(s, 1), (std::vector<double>{2.0, 3.5, 2.5}));
}

TEST(Schedule, CostLayerSynchronisesRegister) {
  auto g = std::make_shared<const Graph>(Graph(3, {{0, 1}}));
  Circuit c(3);
  c.h(0).h(0).diagcost(g, Param::literal(0.4), "g.txt").h(2);
  const Circuit s = schedule_noise(c);
  // h(0) [0,1], h(0) [1,2], cost [2,3], h(2) [3,4]; wall 4.
  EXPECT_EQ(noise_durations(s, 2), (std::vector<double>{3.0, 2.0, 1.0}));
  EXPECT_EQ(noise_durations(s, 1), (std::vector<double>{3.0, 2.0}));
}

TEST(Schedule, PoolTrajectoryEqualsSerialRun) {
  std::mt19937_64 rng(13);
  const Circuit c = schedule_noise(random_circuit(5, 25, rng));
  const NoiseModel model(40, 30);
  std::mutex mu;
  std::vector<std::vector<Amplitude>> pooled(4);
  run_inproc(8, [&](Transport& world) {
    PoolContext pool(world, 4, 2024);
    auto reg = pool.make_register(5);
    reg->set_noise(model, pool.stream(RngScope::state));
    reg->run(c);
    auto full = reg->gather();
    if (pool.is_group_leader()) {
      std::lock_guard lock(mu);
      pooled[pool.state()] = full;
    }
  });
  for (unsigned s = 0; s < 4; ++s) {
    std::vector<Amplitude> serial;
    run_inproc(1, [&](Transport& world) {
      Communicator group(world, {0});
      Register reg(5, group);
      reg.set_noise(model, RandomStream(2024, RngScope::state, s));
      reg.run(c);
      serial = reg.gather();
    });
    EXPECT_EQ(serial, pooled[s]) << "state " << s;
  }
  EXPECT_NE(pooled[0], pooled[1]);
}
