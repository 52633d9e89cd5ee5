#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "cvqe/experiment.hpp"
#include "cvqe/info_metrics.hpp"
#include "cvqe/oracle.hpp"
#include "cvqe/subspace.hpp"
#include "cvqe/trotter.hpp"

using namespace cvqe;

namespace {

Bits permute_bits(Bits s, const std::vector<int>& perm) {
    Bits out = 0;
    for (std::size_t q = 0; q < perm.size(); ++q) {
        if ((s >> q) & 1u) out |= Bits{1} << perm[q];
    }
    return out;
}

std::vector<int> random_permutation(int n, std::mt19937_64& gen) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    return perm;
}

double subspace_energy(const IsingModel& m, std::span<const Bits> seeds, int lambda) {
    const auto sub = expand(seeds, m, lambda);
    return ground_state(project(m, sub)).energy;
}

std::vector<Bits> even_seeds(int n, int count, std::mt19937_64& gen) {
    std::vector<Bits> out;
    std::uniform_int_distribution<Bits> dist(0, (Bits{1} << n) - 1);
    while (static_cast<int>(out.size()) < count) {
        const Bits s = dist(gen);
        if (popcount(s) % 2 == 0) out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(LatticeProperty, HeavyHexDegrees) {
    for (int nx = 3; nx <= 10; ++nx) {
        for (int ny = 3; ny <= 10; ++ny) {
            const auto l = Lattice::heavy_hex(nx, ny);
            const auto deg = l.degrees();
            for (int s = 0; s < l.n_sites(); ++s) {
                EXPECT_GE(deg[s], 1);
                EXPECT_LE(deg[s], 3);
                if (deg[s] == 3) EXPECT_FALSE(l.is_bridge(s));
            }
        }
    }
}

TEST(LatticeProperty, SquareEdgeFormula) {
    for (int lx = 1; lx <= 10; ++lx) {
        for (int ly = 1; ly <= 6; ++ly) {
            const auto l = Lattice::square(lx, ly);
            EXPECT_EQ(l.n_edges(), static_cast<std::size_t>(lx * (ly - 1) + ly * (lx - 1)));
        }
    }
}

TEST(LatticeProperty, RelabelIsIsomorphic) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto l = Lattice::heavy_hex(6 + trial % 3, 6);
        const auto perm = random_permutation(l.n_sites(), gen);
        const auto r = l.relabeled(perm);
        const auto ld = l.degrees();
        const auto rd = r.degrees();
        for (int s = 0; s < l.n_sites(); ++s) EXPECT_EQ(ld[s], rd[perm[s]]);
        for (const auto& e : l.edges()) {
            const Edge mapped{std::min(perm[e.first], perm[e.second]),
                              std::max(perm[e.first], perm[e.second])};
            EXPECT_TRUE(std::binary_search(r.edges().begin(), r.edges().end(), mapped));
        }
    }
}

TEST(ModelProperty, MatrixFreeHermiticity) {
    std::mt19937_64 gen(2);
    const auto m = IsingModel::random_uniform(Lattice::heavy_hex(6, 6), 3.0, 4);
    std::uniform_int_distribution<Bits> dist(0, (Bits{1} << m.n_sites()) - 1);
    for (int trial = 0; trial < 200; ++trial) {
        const SpinConfiguration phi{dist(gen), m.n_sites()};
        for (const auto& term : m.apply(phi)) {
            double back = 0.0;
            for (const auto& t : m.apply(term.config)) {
                if (t.config == phi) back += t.amplitude;
            }
            double forward = 0.0;
            for (const auto& t : m.apply(phi)) {
                if (t.config == term.config) forward += t.amplitude;
            }
            EXPECT_EQ(forward, back);
            EXPECT_EQ(term.config.n_up() % 2, phi.n_up() % 2);
        }
    }
}

TEST(ModelProperty, DenseMatrixIsSymmetric) {
    const auto m = IsingModel::random_uniform(Lattice::square(3, 4), 2.0, 6);
    const auto h = dense_hamiltonian(m);
    const std::size_t d = std::size_t{1} << m.n_sites();
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r + 1; c < d; ++c) ASSERT_EQ(h[r * d + c], h[c * d + r]);
    }
}

TEST(TrotterProperty, NormAndParity) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto m = IsingModel::random_uniform(Lattice::heavy_hex(4, 4), 4.0, seed);
        const auto state = evolve(m, RampSchedule(0.3, static_cast<int>(seed)));
        EXPECT_NEAR(state.norm_squared(), 1.0, 1e-10);
        const auto p = state.probabilities();
        for (Bits s = 0; s < p.size(); ++s) {
            if (popcount(s) % 2 == 1) EXPECT_LT(p[s], 1e-28);
        }
        const auto samples = sample(state, 500, seed);
        EXPECT_EQ(samples.odd_parity_fraction(), 0.0);
    }
}

TEST(SubspaceProperty, VariationalAndLambdaMonotone) {
    std::mt19937_64 gen(3);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto m = IsingModel::random_uniform(Lattice::square(3, 3), 0.5 + seed * 0.4, seed);
        ExactOptions eo;
        eo.min_levels = 1;
        const double exact = exact_diagonalize(m, 1, eo).energies[0];
        const auto seeds = even_seeds(m.n_sites(), 1 + static_cast<int>(seed % 4), gen);
        double previous = std::numeric_limits<double>::infinity();
        for (int lambda = 0; lambda <= 2; ++lambda) {
            const double e = subspace_energy(m, seeds, lambda);
            EXPECT_GE(e, exact - 1e-9);
            EXPECT_LE(e, previous + 1e-12);
            previous = e;
        }
    }
}

TEST(SubspaceProperty, MoreShotsNeverHurt) {
    std::mt19937_64 gen(4);
    const auto m = IsingModel::random_uniform(Lattice::heavy_hex(5, 4), 1.5, 11);
    for (int trial = 0; trial < 6; ++trial) {
        auto b = even_seeds(m.n_sites(), 8, gen);
        const std::vector<Bits> a(b.begin(), b.begin() + 3);
        EXPECT_LE(subspace_energy(m, b, 1), subspace_energy(m, a, 1) + 1e-12);
    }
}

TEST(SubspaceProperty, PermutationEquivariance) {
    std::mt19937_64 gen(5);
    // Reflections of a 3 x 4 grid map the lattice onto itself.
    const auto lattice = Lattice::square(3, 4);
    const auto homogeneous = IsingModel::homogeneous(lattice, -0.7);
    const auto seeds = even_seeds(12, 4, gen);
    const double e = subspace_energy(homogeneous, seeds, 1);
    {
        const auto& pos = lattice.positions();
        std::vector<int> flip(12);
        for (int s = 0; s < 12; ++s) {
            const auto it = std::find_if(pos.begin(), pos.end(), [&](const SitePosition& p) {
                return p.x == 2 - pos[s].x && p.y == pos[s].y;
            });
            flip[s] = static_cast<int>(it - pos.begin());
        }
        ASSERT_EQ(homogeneous.relabeled(flip).lattice(), lattice);
        std::vector<Bits> mapped;
        for (Bits s : seeds) mapped.push_back(permute_bits(s, flip));
        EXPECT_NEAR(subspace_energy(homogeneous.relabeled(flip), mapped, 1), e, 1e-10);
    }
    // Any relabeling, with couplings carried along.
    const auto random = IsingModel::random_uniform(Lattice::heavy_hex(5, 5), 2.0, 8);
    const auto rs = even_seeds(18, 5, gen);
    const double er = subspace_energy(random, rs, 2);
    for (int trial = 0; trial < 4; ++trial) {
        const auto perm = random_permutation(18, gen);
        std::vector<Bits> mapped;
        for (Bits s : rs) mapped.push_back(permute_bits(s, perm));
        EXPECT_NEAR(subspace_energy(random.relabeled(perm), mapped, 2), er, 1e-10);
    }
}

TEST(SubspaceProperty, FullBasisMatchesExactDiagonalization) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto m = IsingModel::random_uniform(Lattice::square(3, 4), 1.0 * seed, seed);
        std::vector<Bits> all(4096);
        std::iota(all.begin(), all.end(), Bits{0});
        const auto full = ground_state(project(m, expand(all, m, 0)));
        EXPECT_NEAR(full.energy, exact_diagonalize(m, 1).energies[0], 1e-8);
    }
}

TEST(InfoProperty, EntropyBounds) {
    std::mt19937_64 gen(6);
    std::uniform_int_distribution<int> count(1, 40);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + trial % 7;
        std::vector<std::pair<Bits, std::int64_t>> c;
        for (int s = 0; s < k; ++s) c.emplace_back(Bits(s) * 3, trial % 5 == 0 ? 9 : count(gen));
        const auto samples = SampleSet::from_counts(8, c, SampleSource::External);
        const double s_b = shot_entropy(samples);
        EXPECT_GE(s_b, 0.0);
        EXPECT_LE(s_b, max_shot_entropy(samples) + 1e-12);
        const bool equal = std::all_of(c.begin(), c.end(), [&](auto& e) { return e.second == c[0].second; });
        EXPECT_EQ(info_gained(samples) == 0.0, equal);
        if (!equal) EXPECT_LT(s_b, max_shot_entropy(samples));
    }
}

TEST(InfoProperty, RatioInvariantUnderRelabeling) {
    const std::vector<std::pair<Bits, std::int64_t>> c{{0b0000, 50}, {0b0011, 30}, {0b1100, 15}, {0b1111, 5}};
    const auto m = IsingModel::homogeneous(Lattice::square(2, 2), -0.5);
    SubspaceSolution sol;
    sol.probabilities = {0.6, 0.25, 0.1, 0.05};
    const auto base = info_ratio(SampleSet::from_counts(4, c, SampleSource::External), sol, m);
    for (Bits mask : {0b0101u, 0b1001u, 0b0110u}) {
        std::vector<std::pair<Bits, std::int64_t>> relabeled;
        for (auto [s, n] : c) relabeled.emplace_back(s ^ mask, n);
        SubspaceSolution shuffled = sol;
        std::reverse(shuffled.probabilities.begin(), shuffled.probabilities.end());
        const auto r = info_ratio(SampleSet::from_counts(4, relabeled, SampleSource::External), shuffled, m);
        EXPECT_NEAR(*r.value, *base.value, 1e-12);
    }
}

TEST(InfoProperty, EqualizationLowersInfoExhaustively) {
    // Every 3-state split of 12 shots; moving one shot from the largest to the
    // smallest count strictly lowers I_B.
    auto info = [](std::array<int, 3> n) {
        std::vector<std::pair<Bits, std::int64_t>> c{{0b00, n[0]}, {0b11, n[1]}, {0b110, n[2]}};
        return info_gained(SampleSet::from_counts(3, c, SampleSource::External));
    };
    int checked = 0;
    for (int a = 1; a <= 10; ++a) {
        for (int b = 1; a + b <= 11; ++b) {
            std::array<int, 3> n{a, b, 12 - a - b};
            while (true) {
                auto hi = std::max_element(n.begin(), n.end());
                auto lo = std::min_element(n.begin(), n.end());
                if (*hi - *lo < 2) break;
                auto next = n;
                --next[hi - n.begin()];
                ++next[lo - n.begin()];
                EXPECT_LT(info(next), info(n));
                n = next;
                ++checked;
            }
            EXPECT_EQ(info(n), 0.0);
        }
    }
    EXPECT_GT(checked, 50);
}

TEST(OracleProperty, PopulationConservedOverFullSpectrum) {
    const auto m = IsingModel::random_uniform(Lattice::square(2, 3), 2.0, 3);
    DiabaticOptions o;
    o.n_checkpoints = 4;
    const auto trace = diabatic_trace(m, 3.0, 0.02, 64, o);
    for (const auto& pops : trace.populations) {
        EXPECT_NEAR(std::accumulate(pops.begin(), pops.end(), 0.0), 1.0, 1e-8);
    }
}

TEST(OracleProperty, AdiabaticLimitIsApproached) {
    const auto m = IsingModel::homogeneous(Lattice::square(2, 2), -1.0);
    const auto spec = exact_diagonalize(m, 2);
    const double unit = 1.0 / spec.gap;
    double previous = 0.0;
    for (double factor : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        DiabaticOptions o;
        o.n_checkpoints = 2;
        const auto trace = diabatic_trace(m, factor * unit, 0.01, 2, o);
        const double p0 = trace.populations.back()[0];
        EXPECT_GE(p0, previous - 1e-4) << "T = " << factor << " / gap";
        previous = p0;
    }
    EXPECT_GT(previous, 0.99);
}

TEST(ExperimentProperty, OrderIndependentAndAboveOracle) {
    RunConfig c;
    c.lattice = LatticeKind::Square;
    c.sizes = {{2, 3}, {3, 3}};
    c.coupling = CouplingMode::Random;
    c.delta_j = {0.4, 1.2, 3.0};
    const auto result = sweep(c);
    for (std::size_t k = result.records.size(); k-- > 0;) {
        const auto again = run_point(c, k / 3, k % 3);
        EXPECT_EQ(record_to_line(again), record_to_line(result.records[k]));
        ASSERT_TRUE(again.oracle_energy.has_value());
        EXPECT_GE(again.energy, *again.oracle_energy - 1e-9);
    }
}

TEST(ModelProperty, CouplingSignSymmetryOnBipartiteLattices) {
    // Rotating one sublattice by Z maps J to -J; heavy-hex and square lattices
    // are bipartite, so the spectrum is even in J0.
    for (const auto& l : {Lattice::heavy_hex(4, 4), Lattice::square(3, 3)}) {
        for (double j0 : {0.3, 1.1}) {
            const auto plus = exact_diagonalize(IsingModel::homogeneous(l, j0), 3);
            const auto minus = exact_diagonalize(IsingModel::homogeneous(l, -j0), 3);
            for (int k = 0; k < 3; ++k) EXPECT_NEAR(plus.energies[k], minus.energies[k], 1e-9);
        }
    }
}
