#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "cvqe/ising_model.hpp"
#include "cvqe/lattice.hpp"

namespace cvqe {

/// y = H x over the full 2^N basis, indexed by bit word.
void apply_full_hamiltonian(const IsingModel& model, std::span<const double> x,
                            std::span<double> y);

/// Row-major dense H over the full basis; N <= 13.
std::vector<double> dense_hamiltonian(const IsingModel& model);

struct ExactOptions {
    int max_sites = 20;
    double tolerance = 1e-10;
    int max_iterations = 0;
    bool keep_vectors = false;
    /// Levels solved for even when fewer are requested; 2 keeps the gap defined.
    int min_levels = 2;
    /// Seed of the Philox start vectors (one per level).
    std::uint64_t start_seed = 0x0bad'5eedULL;
};

struct ExactSpectrum {
    std::vector<double> energies;      // ascending, n_levels entries
    std::vector<double> ground_vector;  // full basis, normalized, real
    double gap = 0.0;                   // E_1 - E_0
    bool converged = true;
    std::vector<std::vector<double>> vectors;  // only with keep_vectors
};

/**
 * Lowest eigenpairs of the full Hamiltonian by matrix-free Lanczos with
 * deflation. Level k starts from a Philox pseudo-random vector and is kept
 * orthogonal to levels 0..k-1, so degenerate levels are resolved one copy at a
 * time. At least options.min_levels levels are computed; gap is 0 when only
 * one is.
 */
ExactSpectrum exact_diagonalize(const IsingModel& model, int n_levels,
                                const ExactOptions& options = {});

/// Significant-state census of an exact ground vector. The |B_1| stand-in is
/// the one-step expansion of the smallest set of basis states holding
/// `support_fraction` of the ground-state probability.
struct ExactCensus {
    int n_psi = 0;
    std::size_t support_size = 0;
    std::size_t proxy_size = 0;
    double threshold = 0.0;
    std::map<int, double> spin_bins;
};

inline constexpr double kDefaultSupportFraction = 0.9999;

ExactCensus exact_state_census(const IsingModel& model, std::span<const double> ground_vector,
                               double support_fraction = kDefaultSupportFraction);

struct EnsembleOptions {
    int workers = 1;
    double field_b = 1.0;
    double support_fraction = kDefaultSupportFraction;
};

struct CensusRow {
    double delta_j = 0.0;
    int n_q = 0;
    int n_realizations = 0;
    double mean_n_psi = 0.0;
    double stderr_n_psi = 0.0;
    double mean_proxy_size = 0.0;
    std::map<int, double> spin_bins;  // realization-averaged
};

/// Coupling seed of realization r: Philox(seed, kEnsembleStream, r).
std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t realization);

std::vector<CensusRow> ensemble_census(const Lattice& lattice, std::span<const double> delta_j_grid,
                                       int n_realizations, std::uint64_t seed,
                                       const EnsembleOptions& options = {});

struct DiabaticOptions {
    /// Checkpoints evenly spaced in integrator steps, including t = 0 and t = T.
    int n_checkpoints = 11;
    double norm_tolerance = 1e-6;
};

struct DiabaticTrace {
    std::vector<double> times;
    std::vector<std::vector<double>> energies;     // per checkpoint, ascending
    std::vector<std::vector<double>> populations;  // |c_n(t)|^2 per checkpoint
    double step = 0.0;
    int n_steps = 0;
    double max_norm_drift = 0.0;
};

/**
 * Integrates i d/dt psi = H(t) psi, H(t) = B sum Z + (t/T) sum J XX, from the
 * ground state of H(0) with the exponential midpoint rule
 * psi(t + h) = exp(-i h H(t + h/2)) psi(t), h <= integrator_step. At each
 * checkpoint the lowest n_levels instantaneous eigenpairs are computed and the
 * populations |<Psi_n(t)|psi(t)>|^2 recorded.
 */
DiabaticTrace diabatic_trace(const IsingModel& model, double total_time, double integrator_step,
                             int n_levels, const DiabaticOptions& options = {});

struct EnergyWindow {
    double lower = 0.0;  // relative to E_0
    double upper = 0.0;
    int n_levels = 0;
    double total_population = 0.0;
    double mean_population = 0.0;
};

/// Groups levels into windows [k w, (k+1) w) of excitation energy E_n - E_0.
/// Empty windows are omitted.
std::vector<EnergyWindow> window_averages(std::span<const double> energies,
                                          std::span<const double> populations, double width);

/// Total population of levels with E_n - E_0 > cutoff.
double population_above(std::span<const double> energies, std::span<const double> populations,
                        double cutoff);

}  // namespace cvqe
