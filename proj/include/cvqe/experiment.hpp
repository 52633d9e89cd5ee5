#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cvqe/info_metrics.hpp"
#include "cvqe/lattice.hpp"
#include "cvqe/oracle.hpp"
#include "cvqe/serialization.hpp"
#include "cvqe/trotter.hpp"

namespace cvqe {

inline constexpr const char* kVersion = "0.3.0";

enum class CouplingMode { Homogeneous, Random };
std::string to_string(CouplingMode mode);
CouplingMode coupling_mode_from_string(const std::string& name);

enum class AnalysisMode { Oracle, Gsa };
std::string to_string(AnalysisMode mode);
AnalysisMode analysis_mode_from_string(const std::string& name);

/**
 * Everything needed to reproduce a run or a sweep. The flat key names used by
 * config files and CLI flags are listed in config_keys(). Sizes are "NxM"
 * (heavy-hex columns x rows, or square L_x x L_y); a lattice_file replaces the
 * size list with one explicit lattice.
 */
struct RunConfig {
    LatticeKind lattice = LatticeKind::HeavyHex;
    std::string lattice_file;
    std::vector<std::pair<int, int>> sizes{{5, 5}};
    CouplingMode coupling = CouplingMode::Homogeneous;
    std::vector<double> j0{-0.5};
    std::vector<double> delta_j{0.5};
    double field_b = 1.0;
    double dt = RampSchedule::kDefaultStep;
    int n_steps = RampSchedule::kDefaultSteps;
    std::int64_t shots = 1000;
    std::uint64_t seed = 1;
    std::uint64_t coupling_seed = 7;
    int lambda = 1;
    double tolerance = 1e-10;
    int max_iterations = 0;
    int statevector_limit = 26;
    /// External counts: a JSON file for a single run, or a directory holding
    /// point_<index>.json for sweeps. Empty means simulate.
    std::string counts;
    Endianness endianness = Endianness::QubitZeroRightmost;
    int oracle_max_sites = 16;
    std::size_t max_states = 5'000'000;
    AnalysisMode mode = AnalysisMode::Oracle;
    int realizations = 100;
    double support_fraction = kDefaultSupportFraction;

    // Execution settings; not part of the echoed config.
    std::string output = "cvqe-out";
    int workers = 1;

    const std::vector<double>& grid() const {
        return coupling == CouplingMode::Homogeneous ? j0 : delta_j;
    }
};

std::vector<std::string> config_keys();

/// Sets one key from its text form. Lists are comma separated; a numeric grid
/// may also be written start:stop:count.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses "key = value" lines; '#' and ';' start comments. Keys that were set
/// are appended to `keys_set` when given.
RunConfig parse_config_text(const std::string& text, RunConfig base = {},
                            std::vector<std::string>* keys_set = nullptr);

void validate(const RunConfig& config);

/// Config echo: all reproducibility-relevant keys, without output and workers.
Json config_to_json(const RunConfig& config);
RunConfig config_from_json(const Json& doc);

/// Fowler-Noll-Vo 1a hash of the echoed config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

std::vector<double> default_j0_grid();       // -2.0, -1.9, ..., 0.0
std::vector<double> default_delta_j_grid();  // 0.0, 0.1, ..., 2.0

Lattice build_lattice(const RunConfig& config, std::size_t size_index);

struct RunRecord {
    Json config;
    std::size_t index = 0;
    bool ok = true;
    std::string error_code;
    std::string error_message;

    int n_qubits = 0;
    int n_edges = 0;
    double coupling_value = 0.0;
    std::optional<std::uint64_t> coupling_seed;
    SampleSource source = SampleSource::Simulated;
    std::int64_t n_shots = 0;
    std::size_t n_distinct = 0;
    double odd_parity_fraction = 0.0;
    std::size_t basis_size = 0;
    double energy = 0.0;
    bool converged = false;
    bool degenerate = false;
    double s_z = 0.0;
    int n_psi = 0;
    std::map<int, double> spin_bins;
    InfoReport info;
    std::optional<double> oracle_energy;

    /// Stage name -> seconds. Kept out of record_to_json so that records stay
    /// byte-identical across runs; sweeps write them to timings.csv.
    std::map<std::string, double> timings;
};

Json record_to_json(const RunRecord& record);
std::string record_to_line(const RunRecord& record);

/// One GSA pipeline run at the first size and first grid value.
RunRecord run_gsa(const RunConfig& config);

/// Single grid point; index = size_index * grid().size() + grid_index.
RunRecord run_point(const RunConfig& config, std::size_t size_index, std::size_t grid_index);

struct SweepResult {
    std::vector<RunRecord> records;  // ordered by point index
    std::size_t n_failed = 0;
};

/// Every (size, coupling) point, run on config.workers threads. A failing point
/// produces a record with ok = false and the sweep continues.
SweepResult sweep(const RunConfig& config);
SweepResult sweep_homogeneous(RunConfig config);
SweepResult sweep_random(RunConfig config);

/// records.jsonl, sweep.csv, timings.csv and manifest.json under config.output.
void write_sweep_outputs(const RunConfig& config, const SweepResult& result,
                         const std::string& command);

struct SizeFit {
    double coupling = 0.0;
    double slope = 0.0;        // d log N_psi / d log N_Q, least squares
    double linear_c = 0.0;     // least-squares c in N_psi = c N_Q
    double max_ratio = 0.0;    // max over sizes of N_psi / N_Q
    int n_sizes = 0;
};

struct CensusTables {
    AnalysisMode mode = AnalysisMode::Oracle;
    std::vector<CensusRow> rows;  // sizes outer, couplings inner
    std::vector<SizeFit> fits;    // one per coupling value
};

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

std::vector<SizeFit> fit_sizes(const std::vector<CensusRow>& rows);

/**
 * N_psi census across sizes and couplings. Oracle mode diagonalizes
 * config.realizations random-coupling models per point (couplings from
 * delta_j). GSA mode runs the sampling pipeline, over the j0 grid for
 * homogeneous couplings or averaging config.realizations seeds for random
 * ones.
 */
CensusTables analyze_subspace(const RunConfig& config);

/// census_vs_size.csv, census_per_site.csv, spin_bins.csv, fits.csv and
/// manifest.json under config.output.
void write_census_outputs(const RunConfig& config, const CensusTables& tables);

}  // namespace cvqe
