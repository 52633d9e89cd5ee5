#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cvqe/ising_model.hpp"

namespace cvqe {

/// Linear ramp discretization: T = n_steps * step.
class RampSchedule {
public:
    static constexpr double kDefaultStep = 0.5;
    static constexpr int kDefaultSteps = 2;

    RampSchedule(double step = kDefaultStep, int n_steps = kDefaultSteps);

    /// Derive n_steps = T / step; rejects T that is not a multiple of step.
    static RampSchedule from_total_time(double total_time, double step);

    double step() const noexcept { return step_; }
    int n_steps() const noexcept { return n_steps_; }
    double total_time() const noexcept { return step_ * n_steps_; }

    /// Ramp fraction t/T at layer k, where t = T - k*step. With n_steps == 0
    /// the single k = 0 layer is taken at full strength.
    double ramp_fraction(int k) const noexcept {
        return n_steps_ == 0 ? 1.0 : static_cast<double>(n_steps_ - k) / n_steps_;
    }

private:
    double step_;
    int n_steps_;
};

using Amplitude = std::complex<double>;

class StateVector {
public:
    explicit StateVector(int n_qubits);  // all-down basis state

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t size() const noexcept { return amplitudes_.size(); }
    const std::vector<Amplitude>& amplitudes() const noexcept { return amplitudes_; }
    std::vector<Amplitude>& amplitudes() noexcept { return amplitudes_; }

    double norm_squared() const noexcept;
    std::vector<double> probabilities() const;

    /// exp(-i theta X_i X_j).
    void apply_xx(int i, int j, double theta) noexcept;
    /// prod_q exp(-i angle Z_q).
    void apply_z_layer(double angle) noexcept;

private:
    int n_qubits_;
    std::vector<Amplitude> amplitudes_;
};

struct EvolveOptions {
    int statevector_limit = 26;
    /// Abort when |norm^2 - 1| exceeds this after any layer.
    double norm_tolerance = 1e-10;
};

/**
 * Trotterized linear ramp from the all-down state. For k = n_steps down to 0
 * (earliest time first) the XX layer exp(-i J_ij (t_k/T) step X_i X_j) is
 * applied on every edge in lexicographic order, followed by the Z layer
 * exp(-i B step Z) on every site.
 */
StateVector evolve(const IsingModel& model, const RampSchedule& schedule,
                   const EvolveOptions& options = {});

struct SampleEntry {
    SpinConfiguration config;
    std::int64_t count = 0;
};

enum class SampleSource { Simulated, External };

/// Distinct measured configurations with shot counts, sorted by configuration.
class SampleSet {
public:
    SampleSet(int n_qubits, std::vector<SampleEntry> entries, SampleSource source,
              std::uint64_t seed = 0, std::string origin = {});

    /// Build from raw bit words (duplicates are merged).
    static SampleSet from_counts(int n_qubits, const std::vector<std::pair<Bits, std::int64_t>>& counts,
                                 SampleSource source, std::uint64_t seed = 0,
                                 std::string origin = {});

    int n_qubits() const noexcept { return n_qubits_; }
    std::int64_t n_shots() const noexcept { return n_shots_; }
    const std::vector<SampleEntry>& entries() const noexcept { return entries_; }
    std::size_t n_distinct() const noexcept { return entries_.size(); }
    SampleSource source() const noexcept { return source_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& origin() const noexcept { return origin_; }

    /// count_s / n_shots per entry.
    std::vector<double> probabilities() const;
    std::vector<Bits> configurations() const;

    /// Fraction of shots with an odd number of up spins.
    double odd_parity_fraction() const noexcept;

private:
    int n_qubits_;
    std::vector<SampleEntry> entries_;
    std::int64_t n_shots_ = 0;
    SampleSource source_;
    std::uint64_t seed_;
    std::string origin_;
};

/// Shot i uses Philox(seed, kSampleStream, i), so results do not depend on
/// how draws are scheduled.
SampleSet sample(const StateVector& state, std::int64_t n_shots, std::uint64_t seed);

enum class Endianness {
    QubitZeroRightmost,  // "0011" -> qubits 0 and 1 up
    QubitZeroLeftmost,
};

Endianness endianness_from_string(const std::string& name);

/// JSON object mapping bitstrings to positive shot counts.
SampleSet parse_counts(const std::string& json_text, int n_qubits,
                       Endianness endianness = Endianness::QubitZeroRightmost,
                       std::string origin = "inline");

SampleSet ingest_counts(const std::filesystem::path& path, int n_qubits,
                        Endianness endianness = Endianness::QubitZeroRightmost);

}  // namespace cvqe
