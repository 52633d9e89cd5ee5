#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "cvqe/info_metrics.hpp"
#include "cvqe/ising_model.hpp"
#include "cvqe/lattice.hpp"
#include "cvqe/subspace.hpp"
#include "cvqe/trotter.hpp"

namespace cvqe {

using Json = nlohmann::json;

/// {"n_sites": int, "edges": [[i, j], ...], "kind": string}, plus "dims" for
/// generated lattices and "positions" when requested.
Json lattice_to_json(const Lattice& lattice, bool with_positions = false);
Lattice lattice_from_json(const Json& doc);

/// {"field_b", "lattice", "couplings": [[i, j, J], ...], "seed"?, "delta_j"?}
Json model_to_json(const IsingModel& model);
IsingModel model_from_json(const Json& doc);

/// {"energy", "lambda", "basis_size", "n_psi", "s_z", "spin_bins", "converged"}
Json solution_to_json(const SubspaceSolution& solution, const Subspace& subspace);

/// InfoReport fields; R = -infinity is written as "ratio": null with
/// "ratio_defined": false.
Json info_to_json(const InfoReport& report);

Json samples_to_json(const SampleSet& samples);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest round-trip decimal representation, used in CSV output.
std::string format_double(double value);

}  // namespace cvqe
