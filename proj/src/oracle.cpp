#include "cvqe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "cvqe/error.hpp"
#include "cvqe/lanczos.hpp"
#include "cvqe/rng.hpp"
#include "cvqe/subspace.hpp"
#include "parallel.hpp"

namespace cvqe {

namespace {

std::size_t full_dimension(const IsingModel& model, int max_sites) {
    if (model.n_sites() > max_sites) {
        throw RuntimeError("exact diagonalization is limited to " + std::to_string(max_sites) +
                           " sites, model has " + std::to_string(model.n_sites()));
    }
    return std::size_t{1} << model.n_sites();
}

/// Krylov basis size that keeps the basis under ~256 MiB.
int krylov_cap_for(std::size_t dim) {
    const std::size_t budget = (std::size_t{256} << 20) / (sizeof(double) * dim);
    return static_cast<int>(std::clamp<std::size_t>(budget, 30, 250));
}

}  // namespace

void apply_full_hamiltonian(const IsingModel& model, std::span<const double> x,
                            std::span<double> y) {
    const int n = model.n_sites();
    const auto& masks = model.flip_masks();
    const auto& j = model.couplings();
    const double b = model.field_b();
    for (std::size_t s = 0; s < x.size(); ++s) {
        double acc = b * total_spin(s, n) * x[s];
        for (std::size_t e = 0; e < masks.size(); ++e) acc += j[e] * x[s ^ masks[e]];
        y[s] = acc;
    }
}

std::vector<double> dense_hamiltonian(const IsingModel& model) {
    const std::size_t dim = full_dimension(model, 13);
    std::vector<double> h(dim * dim, 0.0);
    for (Bits s = 0; s < dim; ++s) {
        for (const auto& term : model.apply(SpinConfiguration{s, model.n_sites()})) {
            h[term.config.bits * dim + s] += term.amplitude;
        }
    }
    return h;
}

ExactSpectrum exact_diagonalize(const IsingModel& model, int n_levels,
                                const ExactOptions& options) {
    if (n_levels < 1) throw ValidationError("bad_levels", "need at least one level");
    const std::size_t dim = full_dimension(model, options.max_sites);
    const auto wanted = static_cast<std::size_t>(n_levels);
    const std::size_t computed = std::min(dim, std::max<std::size_t>(wanted, static_cast<std::size_t>(std::max(options.min_levels, 1))));
    if (wanted > dim) {
        throw ValidationError("bad_levels", "requested " + std::to_string(n_levels) +
                                                " levels from a space of dimension " +
                                                std::to_string(dim));
    }

    LanczosOptions lo;
    lo.tolerance = options.tolerance;
    lo.max_iterations = options.max_iterations;
    lo.krylov_cap = krylov_cap_for(dim);
    const LinearOperator op = [&model](std::span<const double> x, std::span<double> y) {
        apply_full_hamiltonian(model, x, y);
    };

    ExactSpectrum out;
    std::vector<std::vector<double>> found;
    std::vector<double> energies;
    for (std::size_t level = 0; level < computed; ++level) {
        std::vector<double> start(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            start[k] = uniform01(options.start_seed, kStartVectorStream + level, k) - 0.5;
        }
        auto result = lanczos_lowest(dim, op, std::move(start), lo, found);
        out.converged = out.converged && result.converged;
        energies.push_back(result.value);
        found.push_back(std::move(result.vector));
    }

    // Deflated solves may come back slightly out of order near degeneracies.
    std::vector<std::size_t> order(found.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });

    for (std::size_t k = 0; k < wanted; ++k) out.energies.push_back(energies[order[k]]);
    out.gap = computed >= 2 ? energies[order[1]] - energies[order[0]] : 0.0;
    out.ground_vector = found[order[0]];
    if (options.keep_vectors) {
        for (std::size_t k = 0; k < wanted; ++k) out.vectors.push_back(found[order[k]]);
    }
    return out;
}

ExactCensus exact_state_census(const IsingModel& model, std::span<const double> ground_vector,
                               double support_fraction) {
    const std::size_t dim = ground_vector.size();
    if (dim != (std::size_t{1} << model.n_sites())) {
        throw ValidationError("size_mismatch", "ground vector does not span the full basis");
    }
    std::vector<double> p(dim);
    double total = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        p[s] = ground_vector[s] * ground_vector[s];
        total += p[s];
    }
    for (auto& x : p) x /= total;

    std::vector<Bits> order(dim);
    std::iota(order.begin(), order.end(), Bits{0});
    std::stable_sort(order.begin(), order.end(), [&](Bits a, Bits b) { return p[a] > p[b]; });
    std::vector<Bits> support;
    double covered = 0.0;
    for (Bits s : order) {
        if (covered >= support_fraction) break;
        support.push_back(s);
        covered += p[s];
    }

    ExactCensus census;
    census.support_size = support.size();
    const Subspace proxy = expand(support, model, 1);
    census.proxy_size = proxy.size();
    census.threshold = 0.1 / static_cast<double>(proxy.size());
    for (std::size_t s = 0; s < dim; ++s) {
        if (p[s] > census.threshold) ++census.n_psi;
        census.spin_bins[total_spin(s, model.n_sites())] += p[s];
    }
    return census;
}

std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t realization) {
    return random_bits(seed, kEnsembleStream, realization);
}

std::vector<CensusRow> ensemble_census(const Lattice& lattice, std::span<const double> delta_j_grid,
                                       int n_realizations, std::uint64_t seed,
                                       const EnsembleOptions& options) {
    if (n_realizations < 1) throw ValidationError("bad_realizations", "need at least one realization");
    if (delta_j_grid.empty()) throw ValidationError("empty_grid", "coupling grid is empty");
    if (lattice.n_sites() > ExactOptions{}.max_sites) {
        throw RuntimeError("lattice too large for the exact ensemble");
    }
    const std::size_t n_grid = delta_j_grid.size();
    const auto n_real = static_cast<std::size_t>(n_realizations);
    std::vector<ExactCensus> results(n_grid * n_real);

    detail::parallel_for(results.size(), options.workers, [&](std::size_t task) {
        const std::size_t g = task / n_real;
        const std::size_t r = task % n_real;
        const auto model = IsingModel::random_uniform(lattice, delta_j_grid[g],
                                                      realization_seed(seed, r), options.field_b);
        ExactOptions exact;
        exact.min_levels = 1;
        const auto spectrum = exact_diagonalize(model, 1, exact);
        results[task] = exact_state_census(model, spectrum.ground_vector, options.support_fraction);
    });

    std::vector<CensusRow> rows;
    for (std::size_t g = 0; g < n_grid; ++g) {
        CensusRow row;
        row.delta_j = delta_j_grid[g];
        row.n_q = lattice.n_sites();
        row.n_realizations = n_realizations;
        double sum = 0.0, sum_sq = 0.0, proxy = 0.0;
        for (std::size_t r = 0; r < n_real; ++r) {
            const auto& c = results[g * n_real + r];
            sum += c.n_psi;
            sum_sq += static_cast<double>(c.n_psi) * c.n_psi;
            proxy += static_cast<double>(c.proxy_size);
            for (const auto& [spin, prob] : c.spin_bins) row.spin_bins[spin] += prob / n_realizations;
        }
        row.mean_n_psi = sum / n_realizations;
        row.mean_proxy_size = proxy / n_realizations;
        if (n_realizations > 1) {
            const double var = std::max(0.0, (sum_sq - sum * sum / n_realizations) /
                                                 (n_realizations - 1));
            row.stderr_n_psi = std::sqrt(var / n_realizations);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

struct Eigenbasis {
    std::vector<double> energies;
    std::vector<std::vector<double>> vectors;
};

IsingModel ramped(const IsingModel& model, double fraction) {
    auto j = model.couplings();
    for (auto& x : j) x *= fraction;
    return IsingModel(model.lattice(), model.field_b(), std::move(j));
}

Eigenbasis lowest_levels(const IsingModel& h, int n_levels) {
    const std::size_t dim = std::size_t{1} << h.n_sites();
    Eigenbasis out;
    if (dim <= 1024) {
        const auto dense = dense_hamiltonian(h);
        const auto d = static_cast<Eigen::Index>(dim);
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            m(dense.data(), d, d);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
        for (int k = 0; k < n_levels; ++k) {
            out.energies.push_back(solver.eigenvalues()(k));
            const auto col = solver.eigenvectors().col(k);
            out.vectors.emplace_back(col.data(), col.data() + dim);
        }
        return out;
    }
    ExactOptions eo;
    eo.max_sites = 12;
    eo.keep_vectors = true;
    auto spectrum = exact_diagonalize(h, n_levels, eo);
    if (!spectrum.converged) throw RuntimeError("instantaneous eigensolve did not converge");
    out.energies = std::move(spectrum.energies);
    out.vectors = std::move(spectrum.vectors);
    return out;
}

}  // namespace

DiabaticTrace diabatic_trace(const IsingModel& model, double total_time, double integrator_step,
                             int n_levels, const DiabaticOptions& options) {
    if (model.n_sites() > 12) {
        throw RuntimeError("diabatic trace is limited to 12 sites");
    }
    if (!(total_time > 0.0) || !(integrator_step > 0.0)) {
        throw ValidationError("bad_schedule", "total time and integrator step must be positive");
    }
    const std::size_t dim = std::size_t{1} << model.n_sites();
    if (n_levels < 1 || static_cast<std::size_t>(n_levels) > dim) {
        throw ValidationError("bad_levels", "level count must lie in [1, 2^N]");
    }
    const int n_steps = static_cast<int>(std::ceil(total_time / integrator_step - 1e-12));
    const double h = total_time / n_steps;
    const int n_checkpoints = std::max(2, options.n_checkpoints);

    std::vector<int> checkpoint_steps;
    for (int c = 0; c < n_checkpoints; ++c) {
        checkpoint_steps.push_back(static_cast<int>(
            std::llround(static_cast<double>(c) * n_steps / (n_checkpoints - 1))));
    }
    checkpoint_steps.erase(std::unique(checkpoint_steps.begin(), checkpoint_steps.end()),
                           checkpoint_steps.end());

    DiabaticTrace trace;
    trace.step = h;
    trace.n_steps = n_steps;

    std::vector<std::complex<double>> psi(dim, {0.0, 0.0});
    Eigenbasis previous;

    auto record = [&](double t) {
        Eigenbasis basis = lowest_levels(ramped(model, t / total_time), n_levels);
        for (std::size_t n = 0; n < basis.vectors.size(); ++n) {
            auto& v = basis.vectors[n];
            double sign_ref = 0.0;
            if (n < previous.vectors.size()) {
                for (std::size_t x = 0; x < dim; ++x) sign_ref += previous.vectors[n][x] * v[x];
            }
            if (sign_ref == 0.0) {
                sign_ref = *std::max_element(v.begin(), v.end(), [](double a, double b) {
                    return std::abs(a) < std::abs(b);
                });
            }
            if (sign_ref < 0.0) {
                for (auto& x : v) x = -x;
            }
        }
        std::vector<double> pops;
        for (const auto& v : basis.vectors) {
            std::complex<double> c = 0.0;
            for (std::size_t x = 0; x < dim; ++x) c += v[x] * psi[x];
            pops.push_back(std::norm(c));
        }
        trace.times.push_back(t);
        trace.energies.push_back(basis.energies);
        trace.populations.push_back(std::move(pops));
        previous = std::move(basis);
    };

    // Initial state: ground state of H(0).
    {
        const Eigenbasis initial = lowest_levels(ramped(model, 0.0), 1);
        for (std::size_t x = 0; x < dim; ++x) psi[x] = initial.vectors[0][x];
    }

    std::size_t next_checkpoint = 0;
    if (checkpoint_steps[next_checkpoint] == 0) {
        record(0.0);
        ++next_checkpoint;
    }
    for (int step = 0; step < n_steps; ++step) {
        const double t_mid = (step + 0.5) * h;
        const IsingModel h_mid = ramped(model, t_mid / total_time);
        krylov_propagate(
            dim,
            [&h_mid](std::span<const double> x, std::span<double> y) {
                apply_full_hamiltonian(h_mid, x, y);
            },
            psi, h);
        double norm2 = 0.0;
        for (const auto& z : psi) norm2 += std::norm(z);
        const double drift = std::abs(norm2 - 1.0);
        trace.max_norm_drift = std::max(trace.max_norm_drift, drift);
        if (drift > options.norm_tolerance) {
            throw RuntimeError("norm drift " + std::to_string(drift) +
                               " exceeds tolerance; use a smaller integrator step");
        }
        if (next_checkpoint < checkpoint_steps.size() &&
            checkpoint_steps[next_checkpoint] == step + 1) {
            record((step + 1) * h);
            ++next_checkpoint;
        }
    }
    return trace;
}

std::vector<EnergyWindow> window_averages(std::span<const double> energies,
                                          std::span<const double> populations, double width) {
    if (energies.size() != populations.size() || energies.empty()) {
        throw ValidationError("size_mismatch", "energies and populations must match");
    }
    if (!(width > 0.0)) throw ValidationError("bad_width", "window width must be positive");
    const double e0 = *std::min_element(energies.begin(), energies.end());
    std::map<long long, EnergyWindow> windows;
    for (std::size_t n = 0; n < energies.size(); ++n) {
        const auto k = static_cast<long long>(std::floor((energies[n] - e0) / width));
        auto& w = windows[k];
        w.lower = k * width;
        w.upper = (k + 1) * width;
        ++w.n_levels;
        w.total_population += populations[n];
    }
    std::vector<EnergyWindow> out;
    for (auto& [k, w] : windows) {
        w.mean_population = w.total_population / w.n_levels;
        out.push_back(w);
    }
    return out;
}

double population_above(std::span<const double> energies, std::span<const double> populations,
                        double cutoff) {
    if (energies.size() != populations.size() || energies.empty()) {
        throw ValidationError("size_mismatch", "energies and populations must match");
    }
    const double e0 = *std::min_element(energies.begin(), energies.end());
    double total = 0.0;
    for (std::size_t n = 0; n < energies.size(); ++n) {
        if (energies[n] - e0 > cutoff) total += populations[n];
    }
    return total;
}

}  // namespace cvqe
