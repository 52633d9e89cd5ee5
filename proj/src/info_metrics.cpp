#include "cvqe/info_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace cvqe {

double shannon_entropy_bits(std::span<const double> probabilities) {
    double s = 0.0;
    for (double p : probabilities) {
        if (p > 0.0) s -= p * std::log2(p);
    }
    return std::max(s, 0.0);
}

double shot_entropy(const SampleSet& samples) {
    const auto p = samples.probabilities();
    return shannon_entropy_bits(p);
}

double max_shot_entropy(const SampleSet& samples) {
    return std::log2(static_cast<double>(samples.n_distinct()));
}

double info_gained(const SampleSet& samples) {
    const auto& entries = samples.entries();
    const bool all_equal = std::all_of(entries.begin(), entries.end(), [&](const SampleEntry& e) {
        return e.count == entries.front().count;
    });
    if (all_equal) return 0.0;
    const double distinct = static_cast<double>(samples.n_distinct());
    return std::max(0.0, distinct - std::exp2(shot_entropy(samples)));
}

DistributionInfo distribution_info(const SubspaceSolution& solution) {
    DistributionInfo out;
    out.entropy = shannon_entropy_bits(solution.probabilities);
    out.info = std::exp2(out.entropy);
    return out;
}

int k_factor(const IsingModel& model) { return static_cast<int>(model.lattice().n_edges()); }

InfoRatio info_ratio(double info_gained, int k_factor, double info_used) {
    if (!(info_gained > 0.0) || k_factor <= 0) return {};
    return {std::log2(info_gained / (k_factor * info_used))};
}

InfoRatio info_ratio(const SampleSet& samples, const SubspaceSolution& solution,
                     const IsingModel& model) {
    return info_ratio(info_gained(samples), k_factor(model), distribution_info(solution).info);
}

InfoReport info_report(const SampleSet& samples, const SubspaceSolution& solution,
                       const IsingModel& model) {
    InfoReport r;
    r.shot_entropy = shot_entropy(samples);
    r.max_shot_entropy = max_shot_entropy(samples);
    r.info_gained = info_gained(samples);
    const auto dist = distribution_info(solution);
    r.dist_entropy = dist.entropy;
    r.info_used = dist.info;
    r.k_factor = k_factor(model);
    r.ratio = info_ratio(r.info_gained, r.k_factor, r.info_used);
    return r;
}

}  // namespace cvqe
