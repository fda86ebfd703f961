#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <mutex>
#include <random>

#include "qpool/distribution.hpp"
#include "qpool/socket_transport.hpp"
#include "test_support.hpp"

using namespace qpool;
using namespace qpool::testing;
using namespace std::chrono_literals;

namespace {

std::vector<int> iota_members(int n) {
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = i;
  return m;
}

/// Loads a slice of `full` into a partition for `rank` of `ranks`.
StatePartition slice_of(const std::vector<Amplitude>& full, unsigned n, int ranks, int rank) {
  const unsigned p = bits::floor_log2(static_cast<std::uint64_t>(ranks));
  StatePartition s(n, n - p, static_cast<Index>(rank));
  for (Index k = 0; k < s.size(); ++k) s[k] = full[s.global_index(k)];
  return s;
}

}  // namespace

TEST(RankTopology, RankAndOffsetExamples) {
  const auto t31 = RankTopology::make(2, 3);
  EXPECT_EQ(rank_and_offset(5, t31), (RankOffset{1, 1}));
  EXPECT_EQ(rank_and_offset(0, t31), (RankOffset{0, 0}));
  const auto t42 = RankTopology::make(4, 4);
  EXPECT_EQ(rank_and_offset(13, t42), (RankOffset{3, 1}));
  EXPECT_EQ(rank_and_offset(0, RankTopology::make(8, 5)), (RankOffset{0, 0}));
}

TEST(RankTopology, MappingIsABijection) {
  for (unsigned ranks : {1u, 2u, 3u, 4u, 7u, 8u}) {
    const auto t = RankTopology::make(ranks, 6);
    std::vector<int> seen(64, 0);
    for (Index i = 0; i < 64; ++i) {
      const auto ro = rank_and_offset(i, t);
      ASSERT_LT(ro.rank, t.effective_ranks);
      ASSERT_LT(ro.offset, t.local_size());
      ASSERT_EQ(global_index_of(ro, t), i);
      ++seen[ro.rank * t.local_size() + ro.offset];
    }
    for (int c : seen) EXPECT_EQ(c, 1);
  }
}

TEST(RankTopology, EffectiveRanksAndIdle) {
  const auto t = RankTopology::make(7, 5);
  EXPECT_EQ(t.effective_ranks, 4u);
  EXPECT_EQ(t.num_local_qubits, 3u);
  EXPECT_TRUE(t.active(3));
  EXPECT_FALSE(t.active(4));
  EXPECT_THROW(RankTopology::make(4, 2), DomainError);
  EXPECT_THROW(RankTopology::make(0, 2), DomainError);
}

TEST(Exchange, PartnerIsAnInvolution) {
  for (int p = 1; p <= 4; ++p)
    for (int shift = 0; shift < p; ++shift)
      for (int r = 0; r < (1 << p); ++r) {
        const int partner = r ^ (1 << shift);
        EXPECT_NE(partner, r);
        EXPECT_EQ(partner ^ (1 << shift), r);
      }
}

TEST(Exchange, ThreeQubitsTwoRanksSendsTwoAmplitudesOutAndBack) {
  std::mutex mu;
  std::vector<TransportStats> stats(2);
  run_inproc(2, [&](Transport& world) {
    Communicator group(world, iota_members(2));
    StatePartition s(3, 2, static_cast<Index>(world.rank()));
    init_uniform(s);
    apply_one_qubit_gate(s, group, 2, gates::hadamard());
    std::lock_guard lock(mu);
    stats[world.rank()] = world.stats();
  });
  for (const auto& st : stats) {
    EXPECT_EQ(st.messages_sent, 2u);
    EXPECT_EQ(st.bytes_sent, 2u * 2u * sizeof(Amplitude));
  }
}

TEST(Exchange, LocalGateSendsNothing) {
  run_inproc(4, [&](Transport& world) {
    Communicator group(world, iota_members(4));
    StatePartition s(5, 3, static_cast<Index>(world.rank()));
    init_uniform(s);
    for (unsigned q = 0; q < 3; ++q) apply_one_qubit_gate(s, group, q, gates::hadamard());
    EXPECT_EQ(world.stats().messages_sent, 0u);
    EXPECT_EQ(world.stats().bytes_sent, 0u);
  });
}

TEST(Exchange, VolumeOnEveryGlobalQubit) {
  const unsigned n = 7;
  run_inproc(8, [&](Transport& world) {
    Communicator group(world, iota_members(8));
    StatePartition s(n, n - 3, static_cast<Index>(world.rank()));
    init_uniform(s);
    for (unsigned q = n - 3; q < n; ++q) {
      const auto before = world.stats();
      apply_one_qubit_gate(s, group, q, gates::rotation_y(0.4));
      const auto d = world.stats() - before;
      EXPECT_EQ(d.messages_sent, 2u);
      EXPECT_EQ(d.bytes_sent, 2u * (Index{1} << (n - 3 - 1)) * sizeof(Amplitude));
    }
  });
}

TEST(Exchange, HadamardOnTopQubitLandsOnRanksZeroAndTwo) {
  std::mutex mu;
  std::vector<std::vector<Amplitude>> slices(4);
  run_inproc(4, [&](Transport& world) {
    Communicator group(world, iota_members(4));
    StatePartition s(4, 2, static_cast<Index>(world.rank()));
    init_basis_state(s, 0);
    apply_one_qubit_gate(s, group, 3, gates::hadamard());
    std::lock_guard lock(mu);
    slices[world.rank()].assign(s.amplitudes().begin(), s.amplitudes().end());
  });
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(slices[0][0].real(), h, 1e-15);  // global 0
  EXPECT_NEAR(slices[2][0].real(), h, 1e-15);  // global 8
  double rest = 0.0;
  for (int r = 0; r < 4; ++r)
    for (std::size_t k = 0; k < 4; ++k)
      if (!((r == 0 || r == 2) && k == 0)) rest += std::norm(slices[r][k]);
  EXPECT_EQ(rest, 0.0);
}

TEST(Exchange, GlobalGatesMatchDenseOracle) {
  std::mt19937_64 rng(17);
  const unsigned n = 6;
  const DenseVec psi = random_state_vector(n, rng);
  const auto full = to_std(psi);
  for (int ranks : {2, 4, 8}) {
    for (unsigned q = 0; q < n; ++q) {
      const GateMatrix u = random_unitary(rng);
      Circuit c(n);
      c.unitary(q, u);
      const auto got = run_distributed(c, {}, ranks, full);
      EXPECT_LT(max_deviation(got, one_qubit_operator(n, q, u) * psi), 1e-12) << ranks << " q=" << q;
    }
  }
}

TEST(Controlled, CaseBGlobalControlLocalTarget) {
  // CNOT(c=2, t=0), n=3, p=1, |100>: rank 1 flips locally, nobody sends.
  std::mutex mu;
  std::vector<Amplitude> full(8);
  run_inproc(2, [&](Transport& world) {
    Communicator group(world, iota_members(2));
    StatePartition s(3, 2, static_cast<Index>(world.rank()));
    init_basis_state(s, 4);
    apply_controlled_gate(s, group, 2, 0, gates::pauli_x());
    EXPECT_EQ(world.stats().messages_sent, 0u);
    std::lock_guard lock(mu);
    for (Index k = 0; k < 4; ++k) full[s.global_index(k)] = s[k];
  });
  EXPECT_EQ(full[5], Amplitude(1.0));
}

TEST(Controlled, CaseDBothGlobalMatchesOracle) {
  std::mt19937_64 rng(23);
  const DenseVec psi = random_state_vector(4, rng);
  Circuit c(4);
  c.cz(3, 2);
  const auto got = run_distributed(c, {}, 4, to_std(psi));
  EXPECT_LT(max_deviation(got, controlled_operator(4, 3, 2, gates::pauli_z()) * psi), 1e-12);
}

TEST(Controlled, AllPlacementsMatchOracle) {
  std::mt19937_64 rng(29);
  const unsigned n = 5;
  const DenseVec psi = random_state_vector(n, rng);
  const auto full = to_std(psi);
  for (int ranks : {1, 2, 4, 8})
    for (unsigned c = 0; c < n; ++c)
      for (unsigned t = 0; t < n; ++t) {
        if (c == t) continue;
        Circuit circ(n);
        circ.cx(c, t);
        const auto got = run_distributed(circ, {}, ranks, full);
        EXPECT_LT(max_deviation(got, controlled_operator(n, c, t, gates::pauli_x()) * psi), 1e-12)
            << ranks << " c=" << c << " t=" << t;
      }
}

TEST(Controlled, CnotOnTenSingleRank) {
  run_inproc(1, [&](Transport& world) {
    Communicator group(world, {0});
    StatePartition s(2);
    init_basis_state(s, 2);
    apply_controlled_gate(s, group, 1, 0, gates::pauli_x());
    EXPECT_EQ(s[3], Amplitude(1.0));
    EXPECT_THROW(apply_controlled_gate(s, group, 1, 1, gates::pauli_x()), DomainError);
    EXPECT_THROW(apply_controlled_gate(s, group, 2, 1, gates::pauli_x()), DomainError);
  });
}

TEST(GroupReduce, SingleRankIsIdentity) {
  run_inproc(1, [&](Transport& world) {
    Communicator group(world, {0});
    EXPECT_EQ(group_reduce_sum(0.375, group), 0.375);
  });
}

TEST(GroupReduce, QuartersSumToOneEverywhere) {
  run_inproc(4, [&](Transport& world) {
    Communicator group(world, iota_members(4));
    EXPECT_EQ(group_reduce_sum(0.25, group), 1.0);
  });
}

TEST(GroupReduce, BitExactAgainstSerialTree) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> partials(8);
    for (auto& x : partials) x = u(rng) * std::pow(10.0, trial % 7 - 3);
    // Serial re-summation in the same tree order: adjacent pairs, then pairs of pairs.
    const double serial = ((partials[0] + partials[1]) + (partials[2] + partials[3])) +
                          ((partials[4] + partials[5]) + (partials[6] + partials[7]));
    std::atomic<int> mismatches{0};
    run_inproc(8, [&](Transport& world) {
      Communicator group(world, iota_members(8));
      if (group_reduce_sum(partials[world.rank()], group) != serial) ++mismatches;
    });
    EXPECT_EQ(mismatches.load(), 0);
  }
}

TEST(GroupReduce, NonPowerOfTwoGroupRejected) {
  EXPECT_THROW(run_inproc(3, [&](Transport& world) {
    Communicator group(world, iota_members(3));
    group_reduce_sum(1.0, group);
  }), ContractError);
}

TEST(Equivalence, DistributedEqualsSingleRankBitForBit) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const unsigned n = 4 + trial % 5;  // 4..8
    const auto graph = random_graph(n, rng);
    const Circuit c = random_circuit(n, 40, rng, graph);
    const auto init = to_std(random_state_vector(n, rng));
    const auto reference = run_distributed(c, {}, 1, init);
    for (int ranks : {2, 4, 8}) {
      if (bits::floor_log2(ranks) >= n) continue;
      const auto got = run_distributed(c, {}, ranks, init);
      ASSERT_EQ(got.size(), reference.size());
      for (std::size_t i = 0; i < got.size(); ++i) ASSERT_EQ(got[i], reference[i]) << "ranks=" << ranks << " i=" << i;
    }
  }
}

TEST(Equivalence, ObservablesIdenticalAcrossRankCounts) {
  std::mt19937_64 rng(41);
  const unsigned n = 7;
  const auto graph = random_graph(n, rng, 0.5);
  const Circuit c = random_circuit(n, 50, rng, graph);
  std::vector<std::vector<double>> results;
  for (int ranks : {1, 2, 4, 8}) {
    std::vector<double> obs;
    run_inproc(ranks, [&](Transport& world) {
      PoolContext pool(world, 1, 0);
      auto reg = pool.make_register(n);
      reg->run(c);
      std::vector<double> mine;
      for (unsigned q = 0; q < n; ++q) mine.push_back(reg->probability(q));
      mine.push_back(reg->maxcut_expectation(*graph));
      mine.push_back(reg->norm2());
      if (world.rank() == 0) obs = mine;
    });
    results.push_back(obs);
  }
  for (std::size_t k = 1; k < results.size(); ++k) EXPECT_EQ(results[k], results[0]);
}

TEST(IdleRanks, NonPowerOfTwoWorldLeavesTopRanksIdle) {
  const unsigned n = 5;
  std::mt19937_64 rng(43);
  const Circuit c = random_circuit(n, 30, rng);
  const auto init = to_std(random_state_vector(n, rng));
  const auto four = run_distributed(c, {}, 4, init);
  const auto seven = run_distributed(c, {}, 7, init);
  EXPECT_EQ(four, seven);
}

TEST(Communicator, ChunkedTransfersReassemble) {
  std::mt19937_64 rng(47);
  const unsigned n = 8;
  const DenseVec psi = random_state_vector(n, rng);
  const auto full = to_std(psi);
  const GateMatrix u = random_unitary(rng);
  std::mutex mu;
  std::vector<Amplitude> out(full.size());
  run_inproc(4, [&](Transport& world) {
    Communicator group(world, iota_members(4));
    group.set_chunk_amplitudes(5);  // 32-amplitude halves go out as 7 messages
    StatePartition s = slice_of(full, n, 4, world.rank());
    apply_one_qubit_gate(s, group, 7, u);
    EXPECT_EQ(world.stats().messages_sent, 14u);
    EXPECT_EQ(world.stats().bytes_sent, 2u * 32u * sizeof(Amplitude));
    std::lock_guard lock(mu);
    for (Index k = 0; k < s.size(); ++k) out[s.global_index(k)] = s[k];
  });
  EXPECT_LT(max_deviation(out, one_qubit_operator(n, 7, u) * psi), 1e-12);
  EXPECT_THROW(run_inproc(1, [](Transport& w) { Communicator(w, {0}).set_chunk_amplitudes(0); }), DomainError);
}

TEST(Protocol, MismatchedCollectiveTimesOut) {
  // Ranks disagree on the target qubit: their exchange tags never match.
  const auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(run_inproc(
                   4,
                   [&](Transport& world) {
                     Communicator group(world, iota_members(4));
                     StatePartition s(4, 2, static_cast<Index>(world.rank()));
                     init_uniform(s);
                     apply_one_qubit_gate(s, group, world.rank() < 2 ? 2 : 3, gates::hadamard());
                   },
                   200ms),
               TransportError);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 10s);
}

TEST(Protocol, RankOutsideGroupIsRejected) {
  EXPECT_THROW(run_inproc(2, [](Transport& world) { Communicator group(world, {0}); }), ContractError);
}

TEST(Gather, ReturnsFullVectorOnGroupRankZero) {
  std::mt19937_64 rng(53);
  const auto full = to_std(random_state_vector(5, rng));
  run_inproc(4, [&](Transport& world) {
    Communicator group(world, iota_members(4));
    StatePartition s = slice_of(full, 5, 4, world.rank());
    const auto got = gather_state(s, group);
    if (world.rank() == 0)
      EXPECT_EQ(got, full);
    else
      EXPECT_TRUE(got.empty());
  });
}

TEST(TransportIndependence, SocketMatchesInProcBitForBit) {
  std::mt19937_64 rng(59);
  const unsigned n = 8;
  const auto graph = random_graph(n, rng);
  const Circuit c = random_circuit(n, 50, rng, graph);
  auto body = [&](std::vector<Amplitude>& out) {
    return [&](Transport& world) {
      PoolContext pool(world, 1, 0);
      auto reg = pool.make_register(n);
      reg->initialize_uniform();
      reg->run(c);
      auto full = reg->gather();
      if (world.rank() == 0) out = std::move(full);
    };
  };
  std::vector<Amplitude> inproc, socket;
  run_inproc(4, body(inproc));
  run_socket_loopback(4, body(socket));
  ASSERT_EQ(inproc.size(), std::size_t{1} << n);
  EXPECT_EQ(inproc, socket);
}
