#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cvqe/ising_model.hpp"
#include "cvqe/lanczos.hpp"
#include "cvqe/trotter.hpp"

namespace cvqe {

struct ExpandOptions {
    int max_lambda = 2;
    std::size_t max_states = 5'000'000;
};

/// Sorted, duplicate-free set of basis states reachable from the sampled
/// configurations by at most `lambda` applications of H.
struct Subspace {
    std::vector<Bits> basis;
    int n_sites = 0;
    int lambda = 0;
    std::size_t n_sampled = 0;

    std::size_t size() const noexcept { return basis.size(); }
    std::optional<std::size_t> index_of(Bits config) const;
    bool contains(Bits config) const { return index_of(config).has_value(); }
};

/// Breadth-first closure: each round adds every state one nonzero-coupling
/// pair flip away from the previous round's new states.
Subspace expand(std::span<const Bits> seeds, const IsingModel& model, int lambda,
                const ExpandOptions& options = {});
Subspace expand(const SampleSet& samples, const IsingModel& model, int lambda,
                const ExpandOptions& options = {});

struct OffDiagonalElement {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// H restricted to a subspace. Rows are stored in CSR form with both
/// triangles present.
class ProjectedHamiltonian {
public:
    ProjectedHamiltonian(std::vector<double> diagonal, std::vector<std::size_t> row_start,
                         std::vector<std::size_t> columns, std::vector<double> values);

    std::size_t dimension() const noexcept { return diagonal_.size(); }
    const std::vector<double>& diagonal() const noexcept { return diagonal_; }
    std::size_t n_off_diagonal() const noexcept { return columns_.size(); }

    /// Upper-triangle triples (row < col).
    std::vector<OffDiagonalElement> off_diagonal() const;

    double element(std::size_t row, std::size_t col) const;
    void multiply(std::span<const double> x, std::span<double> y) const;

    /// Row-major dense copy; for tests and small problems.
    std::vector<double> dense() const;

private:
    std::vector<double> diagonal_;
    std::vector<std::size_t> row_start_;
    std::vector<std::size_t> columns_;
    std::vector<double> values_;
};

ProjectedHamiltonian project(const IsingModel& model, const Subspace& subspace);

struct SolverOptions {
    double tolerance = 1e-10;
    int max_iterations = 0;  // 0 -> 10 * dimension
    int krylov_cap = 250;
    /// Solve for the next level too, so that exact degeneracies are seen.
    bool detect_degeneracy = true;
};

/// A next level this close to the ground energy marks the ground state as degenerate.
inline constexpr double kDegeneracyWindow = 1e-8;

struct SubspaceSolution {
    double energy = 0.0;
    /// Next level up when it was computed, otherwise NaN.
    double second_energy = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> amplitudes;
    std::vector<double> probabilities;
    double residual = 0.0;
    int n_iterations = 0;
    bool converged = false;
    bool degenerate = false;
};

/**
 * Lowest eigenpair of the projected Hamiltonian. The Krylov iteration starts
 * from the normalized all-positive uniform vector, so runs are reproducible;
 * the eigenvector sign is fixed so that its largest-magnitude entry is
 * positive. With detect_degeneracy the next level is found by a deflated run
 * from a fixed pseudo-random start and reported as second_energy.
 */
SubspaceSolution ground_state(const ProjectedHamiltonian& h, const SolverOptions& options = {});

/// sum_s P_s (n_up - n_down) / N_Q.
double average_spin(const SubspaceSolution& solution, const Subspace& subspace);

struct StateCensus {
    double threshold = 0.0;
    int n_psi = 0;
    /// total spin (n_up - n_down) -> summed probability
    std::map<int, double> spin_bins;
};

/// States with P_s > 0.1 / |basis|, plus probability per total-spin bin.
StateCensus significant_state_census(const SubspaceSolution& solution, const Subspace& subspace);

}  // namespace cvqe
