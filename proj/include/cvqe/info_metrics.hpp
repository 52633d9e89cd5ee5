#pragma once

#include <optional>
#include <span>

#include "cvqe/ising_model.hpp"
#include "cvqe/subspace.hpp"
#include "cvqe/trotter.hpp"

namespace cvqe {

/// Shannon entropy in bits, with 0 log 0 = 0.
double shannon_entropy_bits(std::span<const double> probabilities);

double shot_entropy(const SampleSet& samples);
double max_shot_entropy(const SampleSet& samples);

/// |B| - 2^{S_B}; clamped at zero against round-off.
double info_gained(const SampleSet& samples);

struct DistributionInfo {
    double entropy = 0.0;  // S_Psi, bits
    double info = 1.0;     // I_Psi = 2^{S_Psi}
};

DistributionInfo distribution_info(const SubspaceSolution& solution);

/// Number of Hamiltonian terms that couple a basis state to other states:
/// the XX terms, one per edge.
int k_factor(const IsingModel& model);

/// log2(I_B / (K I_Psi)), or nullopt when I_B = 0 (R = -infinity).
struct InfoRatio {
    std::optional<double> value;
    bool defined() const noexcept { return value.has_value(); }
};

InfoRatio info_ratio(double info_gained, int k_factor, double info_used);
InfoRatio info_ratio(const SampleSet& samples, const SubspaceSolution& solution,
                     const IsingModel& model);

struct InfoReport {
    double shot_entropy = 0.0;
    double max_shot_entropy = 0.0;
    double info_gained = 0.0;
    double dist_entropy = 0.0;
    double info_used = 1.0;
    int k_factor = 0;
    InfoRatio ratio;
};

InfoReport info_report(const SampleSet& samples, const SubspaceSolution& solution,
                       const IsingModel& model);

}  // namespace cvqe
