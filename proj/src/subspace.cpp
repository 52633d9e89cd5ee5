#include "cvqe/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cvqe/error.hpp"
#include "cvqe/rng.hpp"

namespace cvqe {

std::optional<std::size_t> Subspace::index_of(Bits config) const {
    const auto it = std::lower_bound(basis.begin(), basis.end(), config);
    if (it == basis.end() || *it != config) return std::nullopt;
    return static_cast<std::size_t>(it - basis.begin());
}

Subspace expand(std::span<const Bits> seeds, const IsingModel& model, int lambda,
                const ExpandOptions& options) {
    if (lambda < 0 || lambda > options.max_lambda) {
        throw ValidationError("bad_lambda", "lambda must lie in [0, " +
                                                std::to_string(options.max_lambda) + "], got " +
                                                std::to_string(lambda));
    }
    if (seeds.empty()) throw ValidationError("empty_samples", "no sampled configurations");
    const int n = model.n_sites();
    const Bits valid = n >= 64 ? ~Bits{0} : ((Bits{1} << n) - 1);
    for (Bits s : seeds) {
        if (s & ~valid) {
            throw ValidationError("length_mismatch",
                                  "sampled configuration has bits beyond the model's " +
                                      std::to_string(n) + " sites");
        }
    }

    std::vector<Bits> active;
    for (std::size_t e = 0; e < model.flip_masks().size(); ++e) {
        if (std::abs(model.couplings()[e]) > kCouplingZero) active.push_back(model.flip_masks()[e]);
    }

    std::vector<Bits> basis(seeds.begin(), seeds.end());
    std::sort(basis.begin(), basis.end());
    basis.erase(std::unique(basis.begin(), basis.end()), basis.end());
    const std::size_t n_sampled = basis.size();

    std::vector<Bits> frontier = basis;
    for (int round = 0; round < lambda && !frontier.empty(); ++round) {
        std::vector<Bits> fresh;
        fresh.reserve(frontier.size() * active.size());
        for (Bits s : frontier) {
            for (Bits mask : active) fresh.push_back(s ^ mask);
        }
        std::sort(fresh.begin(), fresh.end());
        fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
        std::vector<Bits> novel;
        std::set_difference(fresh.begin(), fresh.end(), basis.begin(), basis.end(),
                            std::back_inserter(novel));
        if (basis.size() + novel.size() > options.max_states) {
            throw RuntimeError("subspace closure reached " +
                               std::to_string(basis.size() + novel.size()) +
                               " states, above the cap of " + std::to_string(options.max_states));
        }
        std::vector<Bits> merged;
        merged.reserve(basis.size() + novel.size());
        std::merge(basis.begin(), basis.end(), novel.begin(), novel.end(),
                   std::back_inserter(merged));
        basis = std::move(merged);
        frontier = std::move(novel);
    }
    return Subspace{std::move(basis), n, lambda, n_sampled};
}

Subspace expand(const SampleSet& samples, const IsingModel& model, int lambda,
                const ExpandOptions& options) {
    if (samples.n_qubits() != model.n_sites()) {
        throw ValidationError("length_mismatch",
                              "samples have " + std::to_string(samples.n_qubits()) +
                                  " qubits, model has " + std::to_string(model.n_sites()));
    }
    const auto configs = samples.configurations();
    return expand(configs, model, lambda, options);
}

ProjectedHamiltonian::ProjectedHamiltonian(std::vector<double> diagonal,
                                           std::vector<std::size_t> row_start,
                                           std::vector<std::size_t> columns,
                                           std::vector<double> values)
    : diagonal_(std::move(diagonal)),
      row_start_(std::move(row_start)),
      columns_(std::move(columns)),
      values_(std::move(values)) {}

std::vector<OffDiagonalElement> ProjectedHamiltonian::off_diagonal() const {
    std::vector<OffDiagonalElement> out;
    for (std::size_t r = 0; r < dimension(); ++r) {
        for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) {
            if (columns_[k] > r) out.push_back({r, columns_[k], values_[k]});
        }
    }
    return out;
}

double ProjectedHamiltonian::element(std::size_t row, std::size_t col) const {
    if (row >= dimension() || col >= dimension()) {
        throw ValidationError("index_out_of_range", "matrix index out of range");
    }
    if (row == col) return diagonal_[row];
    double v = 0.0;
    for (std::size_t k = row_start_[row]; k < row_start_[row + 1]; ++k) {
        if (columns_[k] == col) v += values_[k];
    }
    return v;
}

void ProjectedHamiltonian::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < dimension(); ++r) {
        double acc = diagonal_[r] * x[r];
        for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) {
            acc += values_[k] * x[columns_[k]];
        }
        y[r] = acc;
    }
}

std::vector<double> ProjectedHamiltonian::dense() const {
    const std::size_t d = dimension();
    std::vector<double> m(d * d, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
        m[r * d + r] = diagonal_[r];
        for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) {
            m[r * d + columns_[k]] += values_[k];
        }
    }
    return m;
}

ProjectedHamiltonian project(const IsingModel& model, const Subspace& subspace) {
    if (subspace.basis.empty()) throw ValidationError("empty_subspace", "subspace is empty");
    if (subspace.n_sites != model.n_sites()) {
        throw ValidationError("length_mismatch", "subspace and model sizes differ");
    }
    const std::size_t d = subspace.size();
    std::vector<double> diagonal(d);
    std::vector<std::size_t> row_start(d + 1, 0);
    std::vector<std::size_t> columns;
    std::vector<double> values;
    const auto& masks = model.flip_masks();
    const auto& j = model.couplings();

    for (std::size_t r = 0; r < d; ++r) {
        const Bits s = subspace.basis[r];
        diagonal[r] = model.diagonal_energy(s);
        for (std::size_t e = 0; e < masks.size(); ++e) {
            if (j[e] == 0.0) continue;
            if (auto c = subspace.index_of(s ^ masks[e])) {
                columns.push_back(*c);
                values.push_back(j[e]);
            }
        }
        row_start[r + 1] = columns.size();
    }
    return ProjectedHamiltonian(std::move(diagonal), std::move(row_start), std::move(columns),
                                std::move(values));
}

SubspaceSolution ground_state(const ProjectedHamiltonian& h, const SolverOptions& options) {
    const std::size_t d = h.dimension();
    if (d == 0) throw ValidationError("empty_subspace", "projected Hamiltonian is empty");
    std::vector<double> start(d, 1.0 / std::sqrt(static_cast<double>(d)));
    LanczosOptions lo;
    lo.tolerance = options.tolerance;
    lo.max_iterations = options.max_iterations;
    lo.krylov_cap = options.krylov_cap;
    const auto result = lanczos_lowest(
        d, [&h](std::span<const double> x, std::span<double> y) { h.multiply(x, y); },
        std::move(start), lo);

    SubspaceSolution out;
    out.energy = result.value;
    out.amplitudes = result.vector;
    const auto big = std::max_element(out.amplitudes.begin(), out.amplitudes.end(),
                                      [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*big < 0.0) {
        for (auto& a : out.amplitudes) a = -a;
    }
    out.probabilities.resize(d);
    double total = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        out.probabilities[k] = out.amplitudes[k] * out.amplitudes[k];
        total += out.probabilities[k];
    }
    for (auto& p : out.probabilities) p /= total;
    out.residual = result.residual;
    out.n_iterations = result.iterations;
    out.converged = result.converged;
    if (options.detect_degeneracy && d >= 2) {
        // A single start vector only ever sees one copy of a degenerate level,
        // so the next level comes from a deflated run with a generic start.
        std::vector<double> generic(d);
        for (std::size_t k = 0; k < d; ++k) generic[k] = uniform01(0, kStartVectorStream, k) - 0.5;
        const std::vector<std::vector<double>> found{result.vector};
        const auto next = lanczos_lowest(
            d, [&h](std::span<const double> x, std::span<double> y) { h.multiply(x, y); },
            std::move(generic), lo, found);
        out.second_energy = next.value;
    } else if (std::isfinite(result.second_value)) {
        out.second_energy = result.second_value;
    }
    out.degenerate = std::isfinite(out.second_energy) &&
                     std::abs(out.second_energy - out.energy) <= kDegeneracyWindow;
    return out;
}

double average_spin(const SubspaceSolution& solution, const Subspace& subspace) {
    if (solution.probabilities.size() != subspace.size()) {
        throw ValidationError("size_mismatch", "solution does not match subspace");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < subspace.size(); ++k) {
        s += solution.probabilities[k] * total_spin(subspace.basis[k], subspace.n_sites);
    }
    return s / subspace.n_sites;
}

StateCensus significant_state_census(const SubspaceSolution& solution, const Subspace& subspace) {
    if (solution.probabilities.size() != subspace.size()) {
        throw ValidationError("size_mismatch", "solution does not match subspace");
    }
    StateCensus census;
    census.threshold = 0.1 / static_cast<double>(subspace.size());
    for (std::size_t k = 0; k < subspace.size(); ++k) {
        const double p = solution.probabilities[k];
        if (p > census.threshold) ++census.n_psi;
        census.spin_bins[total_spin(subspace.basis[k], subspace.n_sites)] += p;
    }
    return census;
}

}  // namespace cvqe
