#include "cvqe/trotter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "cvqe/error.hpp"
#include "cvqe/rng.hpp"

namespace cvqe {

RampSchedule::RampSchedule(double step, int n_steps) : step_(step), n_steps_(n_steps) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ValidationError("bad_schedule", "time step must be positive and finite");
    }
    if (n_steps < 0) {
        throw ValidationError("bad_schedule", "number of steps must be nonnegative");
    }
}

RampSchedule RampSchedule::from_total_time(double total_time, double step) {
    if (!(step > 0.0) || !(total_time >= 0.0)) {
        throw ValidationError("bad_schedule", "need step > 0 and total time >= 0");
    }
    const double ratio = total_time / step;
    const auto n = static_cast<int>(std::llround(ratio));
    if (std::abs(n * step - total_time) > 1e-12 * std::max(total_time, step)) {
        throw ValidationError("bad_schedule", "total time is not a whole number of steps");
    }
    return RampSchedule(step, n);
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 40) {
        throw ValidationError("bad_qubit_count", "state vector needs 1..40 qubits");
    }
    amplitudes_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amplitudes_[0] = 1.0;
}

double StateVector::norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amplitudes_.size());
    std::transform(amplitudes_.begin(), amplitudes_.end(), p.begin(),
                   [](const Amplitude& a) { return std::norm(a); });
    return p;
}

void StateVector::apply_xx(int i, int j, double theta) noexcept {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const std::size_t low = std::size_t{1} << i;
    const std::size_t mask = low | (std::size_t{1} << j);
    const Amplitude minus_i_s{0.0, -s};
    for (std::size_t x = 0; x < amplitudes_.size(); ++x) {
        if (x & low) continue;
        const std::size_t y = x ^ mask;
        const Amplitude a = amplitudes_[x];
        const Amplitude b = amplitudes_[y];
        amplitudes_[x] = c * a + minus_i_s * b;
        amplitudes_[y] = c * b + minus_i_s * a;
    }
}

void StateVector::apply_z_layer(double angle) noexcept {
    // Phase depends only on the number of up spins.
    std::vector<Amplitude> phase(static_cast<std::size_t>(n_qubits_) + 1);
    for (int up = 0; up <= n_qubits_; ++up) {
        phase[up] = std::polar(1.0, -angle * (2 * up - n_qubits_));
    }
    for (std::size_t x = 0; x < amplitudes_.size(); ++x) {
        amplitudes_[x] *= phase[popcount(x)];
    }
}

StateVector evolve(const IsingModel& model, const RampSchedule& schedule,
                   const EvolveOptions& options) {
    const int n = model.n_sites();
    if (n > options.statevector_limit) {
        throw RuntimeError("model has " + std::to_string(n) +
                           " qubits, above the statevector limit of " +
                           std::to_string(options.statevector_limit) +
                           "; supply hardware counts instead");
    }
    StateVector state(n);
    const auto& edges = model.lattice().edges();
    const auto& j = model.couplings();
    const double dt = schedule.step();

    auto check_norm = [&](int k) {
        const double drift = std::abs(state.norm_squared() - 1.0);
        if (drift > options.norm_tolerance) {
            throw RuntimeError("norm drifted by " + std::to_string(drift) + " at layer k=" +
                               std::to_string(k));
        }
    };

    for (int k = schedule.n_steps(); k >= 0; --k) {
        const double ramp = schedule.ramp_fraction(k);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const double theta = j[e] * ramp * dt;
            if (theta != 0.0) state.apply_xx(edges[e].first, edges[e].second, theta);
        }
        check_norm(k);
        state.apply_z_layer(model.field_b() * dt);
        check_norm(k);
    }
    return state;
}

SampleSet::SampleSet(int n_qubits, std::vector<SampleEntry> entries, SampleSource source,
                     std::uint64_t seed, std::string origin)
    : n_qubits_(n_qubits),
      entries_(std::move(entries)),
      source_(source),
      seed_(seed),
      origin_(std::move(origin)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const SampleEntry& a, const SampleEntry& b) { return a.config < b.config; });
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const auto& e = entries_[k];
        if (e.count < 1) {
            throw ValidationError("nonpositive_count", "configuration " + e.config.to_string() +
                                                           " has nonpositive count");
        }
        if (e.config.n_sites != n_qubits_) {
            throw ValidationError("length_mismatch", "configuration " + e.config.to_string() +
                                                         " does not have " +
                                                         std::to_string(n_qubits_) + " qubits");
        }
        if (k > 0 && entries_[k - 1].config == e.config) {
            throw ValidationError("duplicate_configuration",
                                  "configuration " + e.config.to_string() + " appears twice");
        }
        n_shots_ += e.count;
    }
    if (n_shots_ == 0) throw ValidationError("no_shots", "no shots");
}

SampleSet SampleSet::from_counts(int n_qubits,
                                 const std::vector<std::pair<Bits, std::int64_t>>& counts,
                                 SampleSource source, std::uint64_t seed, std::string origin) {
    std::map<Bits, std::int64_t> merged;
    for (const auto& [bits, c] : counts) merged[bits] += c;
    std::vector<SampleEntry> entries;
    entries.reserve(merged.size());
    for (const auto& [bits, c] : merged) entries.push_back({{bits, n_qubits}, c});
    return SampleSet(n_qubits, std::move(entries), source, seed, std::move(origin));
}

std::vector<double> SampleSet::probabilities() const {
    std::vector<double> p;
    p.reserve(entries_.size());
    for (const auto& e : entries_) {
        p.push_back(static_cast<double>(e.count) / static_cast<double>(n_shots_));
    }
    return p;
}

std::vector<Bits> SampleSet::configurations() const {
    std::vector<Bits> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.config.bits);
    return out;
}

double SampleSet::odd_parity_fraction() const noexcept {
    std::int64_t odd = 0;
    for (const auto& e : entries_) {
        if (e.config.n_up() % 2 == 1) odd += e.count;
    }
    return static_cast<double>(odd) / static_cast<double>(n_shots_);
}

SampleSet sample(const StateVector& state, std::int64_t n_shots, std::uint64_t seed) {
    if (n_shots < 1) throw ValidationError("no_shots", "number of shots must be positive");
    const auto& amps = state.amplitudes();
    std::vector<double> cumulative(amps.size());
    double running = 0.0;
    for (std::size_t x = 0; x < amps.size(); ++x) {
        running += std::norm(amps[x]);
        cumulative[x] = running;
    }
    if (std::abs(running - 1.0) > 1e-8) {
        throw ValidationError("not_normalized", "state is not normalized");
    }
    std::map<Bits, std::int64_t> counts;
    for (std::int64_t shot = 0; shot < n_shots; ++shot) {
        const double u = uniform01(seed, kSampleStream, static_cast<std::uint64_t>(shot)) * running;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) it = std::lower_bound(cumulative.begin(), cumulative.end(), running);
        ++counts[static_cast<Bits>(it - cumulative.begin())];
    }
    std::vector<std::pair<Bits, std::int64_t>> flat(counts.begin(), counts.end());
    return SampleSet::from_counts(state.n_qubits(), flat, SampleSource::Simulated, seed,
                                  "simulated");
}

Endianness endianness_from_string(const std::string& name) {
    if (name == "big" || name == "qubit0-rightmost" || name == "rightmost") {
        return Endianness::QubitZeroRightmost;
    }
    if (name == "little" || name == "qubit0-leftmost" || name == "leftmost") {
        return Endianness::QubitZeroLeftmost;
    }
    throw ValidationError("bad_endianness", "unknown endianness '" + name + "'");
}

SampleSet parse_counts(const std::string& json_text, int n_qubits, Endianness endianness,
                       std::string origin) {
    if (json_text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw ValidationError("no_shots", "no shots");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("malformed_counts", std::string("counts file is not valid JSON: ") +
                                                      e.what());
    }
    if (!doc.is_object()) {
        throw ValidationError("malformed_counts", "counts file must be a JSON object");
    }
    std::vector<std::pair<Bits, std::int64_t>> counts;
    for (const auto& [key, value] : doc.items()) {
        if (key.size() != static_cast<std::size_t>(n_qubits)) {
            throw ValidationError("length_mismatch", "bitstring '" + key + "' has length " +
                                                         std::to_string(key.size()) +
                                                         ", expected " + std::to_string(n_qubits));
        }
        if (!value.is_number_integer()) {
            throw ValidationError("malformed_counts",
                                  "count for '" + key + "' is not an integer");
        }
        const auto c = value.get<std::int64_t>();
        if (c < 1) {
            throw ValidationError("nonpositive_count",
                                  "count for '" + key + "' is " + std::to_string(c));
        }
        std::string text = key;
        if (endianness == Endianness::QubitZeroLeftmost) std::reverse(text.begin(), text.end());
        counts.emplace_back(SpinConfiguration::from_string(text).bits, c);
    }
    if (counts.empty()) throw ValidationError("no_shots", "no shots");
    return SampleSet::from_counts(n_qubits, counts, SampleSource::External, 0, std::move(origin));
}

SampleSet ingest_counts(const std::filesystem::path& path, int n_qubits, Endianness endianness) {
    std::ifstream in(path);
    if (!in) throw ValidationError("missing_file", "cannot open counts file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_counts(buffer.str(), n_qubits, endianness, path.filename().string());
}

}  // namespace cvqe
