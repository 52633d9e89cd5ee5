#include "cvqe/subspace.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cvqe/error.hpp"
#include "cvqe/oracle.hpp"
#include "pauli_oracle.hpp"

using namespace cvqe;

namespace {

Lattice chain(int n) {
    std::vector<std::pair<int, int>> e;
    for (int k = 0; k + 1 < n; ++k) e.emplace_back(k, k + 1);
    return Lattice::from_edge_list(n, e);
}

Lattice pair() { return chain(2); }

SubspaceSolution solve(const IsingModel& m, const Subspace& s) { return ground_state(project(m, s)); }

SubspaceSolution manual_solution(std::vector<double> p) {
    SubspaceSolution s;
    s.probabilities = std::move(p);
    for (double x : s.probabilities) s.amplitudes.push_back(std::sqrt(x));
    return s;
}

Subspace manual_subspace(std::vector<Bits> basis, int n) {
    Subspace s;
    s.basis = std::move(basis);
    s.n_sites = n;
    return s;
}

const double kSqrt5 = std::sqrt(5.0);

}  // namespace

TEST(Expand, ChainExample) {
    const auto m = IsingModel::homogeneous(chain(3), 1.0);
    const Bits seeds[] = {0};
    const auto b1 = expand(seeds, m, 1);
    EXPECT_EQ(b1.basis, (std::vector<Bits>{0b000, 0b011, 0b110}));
    EXPECT_EQ(b1.lambda, 1);
    EXPECT_EQ(b1.n_sampled, 1u);
}

TEST(Expand, LambdaZeroIsIdentity) {
    const auto m = IsingModel::homogeneous(chain(4), 1.0);
    const Bits seeds[] = {0b1001, 0b0000, 0b0110};
    EXPECT_EQ(expand(seeds, m, 0).basis, (std::vector<Bits>{0b0000, 0b0110, 0b1001}));
}

TEST(Expand, ClosedPair) {
    const auto m = IsingModel::homogeneous(pair(), 1.0);
    const Bits seeds[] = {0b00, 0b11};
    EXPECT_EQ(expand(seeds, m, 1).basis, (std::vector<Bits>{0b00, 0b11}));
}

TEST(Expand, ZeroCouplingGeneratesNothing) {
    const IsingModel m(chain(3), 1.0, {0.0, 0.5});
    const Bits seeds[] = {0};
    EXPECT_EQ(expand(seeds, m, 1).basis, (std::vector<Bits>{0b000, 0b110}));
    const IsingModel tiny(chain(3), 1.0, {1e-15, 0.5});
    EXPECT_EQ(expand(seeds, tiny, 1).basis, (std::vector<Bits>{0b000, 0b110}));
}

TEST(Expand, LambdaTwoIsTwoStepReachability) {
    const auto m = IsingModel::homogeneous(chain(4), -0.5);
    const Bits seeds[] = {0};
    const auto b2 = expand(seeds, m, 2);
    // One step: 0011, 0110, 1100. Two steps add 0101, 1010 and 1111; 1001 is
    // three flips away.
    EXPECT_EQ(b2.basis, (std::vector<Bits>{0b0000, 0b0011, 0b0101, 0b0110, 0b1010, 0b1100, 0b1111}));
}

TEST(Expand, NestingAndContainment) {
    const auto m = IsingModel::random_uniform(Lattice::heavy_hex(4, 4), 1.0, 2);
    const Bits seeds[] = {0, 0b11, 0b1100000};
    const auto b0 = expand(seeds, m, 0);
    const auto b1 = expand(seeds, m, 1);
    const auto b2 = expand(seeds, m, 2);
    EXPECT_TRUE(std::includes(b1.basis.begin(), b1.basis.end(), b0.basis.begin(), b0.basis.end()));
    EXPECT_TRUE(std::includes(b2.basis.begin(), b2.basis.end(), b1.basis.begin(), b1.basis.end()));
    EXPECT_TRUE(std::is_sorted(b2.basis.begin(), b2.basis.end()));
    EXPECT_EQ(std::adjacent_find(b2.basis.begin(), b2.basis.end()), b2.basis.end());
    for (Bits s : b2.basis) EXPECT_EQ(popcount(s) % 2, 0);
    EXPECT_TRUE(b1.contains(0b11));
    EXPECT_FALSE(b1.contains(0b1));
    EXPECT_EQ(b1.index_of(0), std::optional<std::size_t>(0));
}

TEST(Expand, Rejections) {
    const auto m = IsingModel::homogeneous(chain(3), 1.0);
    const Bits seeds[] = {0};
    auto code = [](auto fn) {
        try {
            fn();
        } catch (const ValidationError& e) {
            return e.code();
        }
        return std::string();
    };
    EXPECT_EQ(code([&] { expand(seeds, m, 3); }), "bad_lambda");
    EXPECT_EQ(code([&] { expand(std::span<const Bits>{}, m, 1); }), "empty_samples");
    const Bits too_wide[] = {0b1000};
    EXPECT_EQ(code([&] { expand(too_wide, m, 1); }), "length_mismatch");
    ExpandOptions small;
    small.max_states = 2;
    EXPECT_THROW(expand(seeds, m, 1, small), RuntimeError);
}

TEST(Project, TwoSiteMatrix) {
    const auto m = IsingModel::homogeneous(pair(), 1.0);
    const auto h = project(m, manual_subspace({0b00, 0b11}, 2));
    EXPECT_EQ(h.dense(), (std::vector<double>{-2, 1, 1, 2}));
    EXPECT_EQ(h.n_off_diagonal(), 2u);
    const auto upper = h.off_diagonal();
    ASSERT_EQ(upper.size(), 1u);
    EXPECT_EQ(upper[0].row, 0u);
    EXPECT_EQ(upper[0].col, 1u);
}

TEST(Project, SingleState) {
    const auto m = IsingModel::random_uniform(chain(5), 1.0, 4);
    const auto h = project(m, manual_subspace({0b01100}, 5));
    ASSERT_EQ(h.dimension(), 1u);
    EXPECT_DOUBLE_EQ(h.element(0, 0), m.diagonal_energy(Bits{0b01100}));
}

TEST(Project, FullBasisEqualsPauliAssembly) {
    const auto m = IsingModel::random_uniform(Lattice::square(3, 4), 1.7, 21);
    std::vector<Bits> all(4096);
    for (Bits s = 0; s < all.size(); ++s) all[s] = s;
    const auto h = project(m, manual_subspace(all, 12));
    const auto oracle = reference::pauli_hamiltonian(m);
    double max_diff = 0.0;
    for (int k = 0; k < oracle.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(oracle, k); it; ++it) {
            max_diff = std::max(max_diff, std::abs(h.element(static_cast<std::size_t>(it.row()),
                                                             static_cast<std::size_t>(it.col())) -
                                                   it.value()));
        }
    }
    EXPECT_EQ(max_diff, 0.0);
    // No entries beyond the oracle's pattern: diagonal plus one per edge per row.
    EXPECT_EQ(h.n_off_diagonal(), 4096u * m.lattice().n_edges());
}

TEST(Project, Structure) {
    const auto m = IsingModel::random_uniform(Lattice::heavy_hex(5, 4), 1.2, 8);
    const Bits seeds[] = {0, 0b1111, 0b110000000};
    const auto sub = expand(seeds, m, 2);
    const auto h = project(m, sub);
    const auto dense = h.dense();
    const std::size_t d = h.dimension();
    for (std::size_t r = 0; r < d; ++r) {
        EXPECT_DOUBLE_EQ(dense[r * d + r], m.diagonal_energy(sub.basis[r]));
        for (std::size_t c = 0; c < d; ++c) {
            ASSERT_EQ(dense[r * d + c], dense[c * d + r]);
            if (r != c && dense[r * d + c] != 0.0) {
                const Bits diff = sub.basis[r] ^ sub.basis[c];
                const auto& masks = m.flip_masks();
                EXPECT_NE(std::find(masks.begin(), masks.end(), diff), masks.end());
            }
        }
    }
}

TEST(GroundState, TwoSiteClosedForm) {
    const auto m = IsingModel::homogeneous(pair(), 1.0);
    const auto sub = manual_subspace({0b00, 0b11}, 2);
    const auto sol = solve(m, sub);
    EXPECT_NEAR(sol.energy, -kSqrt5, 1e-10);
    const double p00 = 0.5 * (1.0 + 2.0 / kSqrt5);
    EXPECT_NEAR(sol.probabilities[0], p00, 1e-10);
    EXPECT_NEAR(sol.probabilities[0], 0.9472, 1e-4);
    EXPECT_NEAR(average_spin(sol, sub), -2.0 / kSqrt5, 1e-10);
    EXPECT_NEAR(average_spin(sol, sub), -0.8944, 1e-4);
    EXPECT_GT(sol.amplitudes[0], 0.0);
    EXPECT_TRUE(sol.converged);
    EXPECT_FALSE(sol.degenerate);
}

TEST(GroundState, TrivialMatrices) {
    const auto one = ground_state(ProjectedHamiltonian({3.5}, {0, 0}, {}, {}));
    EXPECT_DOUBLE_EQ(one.energy, 3.5);
    EXPECT_DOUBLE_EQ(one.amplitudes[0], 1.0);
    const auto diag = ground_state(ProjectedHamiltonian({-3, -1, 4}, {0, 0, 0, 0}, {}, {}));
    EXPECT_NEAR(diag.energy, -3.0, 1e-12);
    EXPECT_NEAR(diag.probabilities[0], 1.0, 1e-12);
}

TEST(GroundState, ProbabilitiesSumToOne) {
    const auto m = IsingModel::random_uniform(Lattice::heavy_hex(5, 5), 1.5, 3);
    const Bits seeds[] = {0, 0b11, 0b1100};
    const auto sol = solve(m, expand(seeds, m, 2));
    double total = 0.0;
    for (double p : sol.probabilities) total += p;
    EXPECT_NEAR(total, 1.0, 1e-10);
    EXPECT_LE(sol.residual, 1e-10 * std::max(1.0, std::abs(sol.energy)));
}

TEST(GroundState, DegeneracyFlag) {
    const IsingModel m(chain(4), 1.0, {0.0, 0.0, 0.0});
    const auto sol = solve(m, manual_subspace({0b0011, 0b0101, 0b1111}, 4));
    EXPECT_NEAR(sol.energy, 0.0, 1e-12);
    EXPECT_NEAR(sol.second_energy, 0.0, 1e-12);
    EXPECT_TRUE(sol.degenerate);

    const auto split = solve(IsingModel::homogeneous(pair(), 1.0), manual_subspace({0b00, 0b11}, 2));
    EXPECT_NEAR(split.second_energy, std::sqrt(5.0), 1e-10);
    EXPECT_FALSE(split.degenerate);
}

TEST(AverageSpin, Examples) {
    EXPECT_DOUBLE_EQ(average_spin(manual_solution({1.0}), manual_subspace({0}, 3)), -1.0);
    EXPECT_DOUBLE_EQ(average_spin(manual_solution({0.5, 0.5}), manual_subspace({0, 0b111}, 3)), 0.0);
    EXPECT_THROW(average_spin(manual_solution({1.0}), manual_subspace({0, 3}, 2)), ValidationError);
}

TEST(Census, Examples) {
    std::vector<Bits> hundred(100);
    for (Bits s = 0; s < 100; ++s) hundred[s] = s;
    std::vector<double> point(100, 0.0);
    point[0] = 1.0;
    EXPECT_EQ(significant_state_census(manual_solution(point), manual_subspace(hundred, 7)).n_psi, 1);

    const auto uniform = significant_state_census(manual_solution({0.25, 0.25, 0.25, 0.25}),
                                                  manual_subspace({0, 3, 5, 6}, 3));
    EXPECT_EQ(uniform.n_psi, 4);
    EXPECT_DOUBLE_EQ(uniform.threshold, 0.025);

    const auto m = IsingModel::homogeneous(pair(), 1.0);
    const auto sub = manual_subspace({0b00, 0b11}, 2);
    const auto census = significant_state_census(solve(m, sub), sub);
    EXPECT_EQ(census.n_psi, 2);
    ASSERT_EQ(census.spin_bins.size(), 2u);
    EXPECT_NEAR(census.spin_bins.at(-2), 0.9472, 1e-4);
    EXPECT_NEAR(census.spin_bins.at(2), 0.0528, 1e-4);
}

TEST(Variational, AgainstPauliOracle) {
    const auto m = IsingModel::random_uniform(Lattice::heavy_hex(4, 4), 2.0, 13);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(reference::dense_pauli_hamiltonian(m));
    const double exact = dense.eigenvalues()(0);
    const Bits seeds[] = {0, 0b101000};
    double previous = std::numeric_limits<double>::infinity();
    for (int lambda = 0; lambda <= 2; ++lambda) {
        const double e = solve(m, expand(seeds, m, lambda)).energy;
        EXPECT_GE(e, exact - 1e-10);
        EXPECT_LE(e, previous + 1e-12);
        previous = e;
    }
    std::vector<Bits> even;
    for (Bits s = 0; s < 1024; ++s) {
        if (popcount(s) % 2 == 0) even.push_back(s);
    }
    // The ground state lives in the even sector, so the sector basis is exact.
    EXPECT_NEAR(solve(m, manual_subspace(even, 10)).energy, exact, 1e-9);
}
