#include "cvqe/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cvqe/error.hpp"
#include "cvqe/rng.hpp"
#include "cvqe/subspace.hpp"
#include "parallel.hpp"

namespace cvqe {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
    throw ValidationError("bad_value", "config key '" + key + "': cannot read '" + value +
                                           "' as " + expected);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        bad_value(key, text, "a number");
    }
    if (used != t.size()) bad_value(key, text, "a number");
    return v;
}

long long parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(t, &used);
    } catch (const std::exception&) {
        bad_value(key, text, "an integer");
    }
    if (used != t.size()) bad_value(key, text, "an integer");
    return v;
}

std::uint64_t parse_uint64(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    unsigned long long v = 0;
    if (t.empty() || t[0] == '-') bad_value(key, text, "an unsigned integer");
    try {
        v = std::stoull(t, &used, 0);
    } catch (const std::exception&) {
        bad_value(key, text, "an unsigned integer");
    }
    if (used != t.size()) bad_value(key, text, "an unsigned integer");
    return v;
}

std::vector<double> parse_grid(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) return {};
    if (t.find(':') != std::string::npos) {
        const auto parts = split(t, ':');
        if (parts.size() != 3) bad_value(key, text, "start:stop:count");
        const double start = parse_double(key, parts[0]);
        const double stop = parse_double(key, parts[1]);
        const long long count = parse_int(key, parts[2]);
        if (count < 1) bad_value(key, text, "start:stop:count with count >= 1");
        std::vector<double> grid;
        for (long long k = 0; k < count; ++k) {
            grid.push_back(count == 1 ? start
                                      : start + (stop - start) * static_cast<double>(k) /
                                                    static_cast<double>(count - 1));
        }
        return grid;
    }
    std::vector<double> grid;
    for (const auto& item : split(t, ',')) grid.push_back(parse_double(key, item));
    return grid;
}

std::pair<int, int> parse_size(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    const auto x = t.find_first_of("xX");
    if (x == std::string::npos) {
        const auto n = static_cast<int>(parse_int(key, t));
        return {n, n};
    }
    return {static_cast<int>(parse_int(key, t.substr(0, x))),
            static_cast<int>(parse_int(key, t.substr(x + 1)))};
}

std::string endianness_name(Endianness e) {
    return e == Endianness::QubitZeroRightmost ? "big" : "little";
}

std::string size_name(const std::pair<int, int>& size) {
    return std::to_string(size.first) + "x" + std::to_string(size.second);
}

std::string csv_number(double v) { return format_double(v); }

std::string csv_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig single_point(const RunConfig& config, std::size_t size_index, std::size_t grid_index) {
    RunConfig point = config;
    if (config.lattice_file.empty()) point.sizes = {config.sizes.at(size_index)};
    const double value = config.grid().at(grid_index);
    if (config.coupling == CouplingMode::Homogeneous) {
        point.j0 = {value};
    } else {
        point.delta_j = {value};
    }
    return point;
}

std::size_t n_sizes(const RunConfig& config) {
    return config.lattice_file.empty() ? config.sizes.size() : 1;
}

}  // namespace

std::string to_string(CouplingMode mode) {
    return mode == CouplingMode::Homogeneous ? "homogeneous" : "random";
}

CouplingMode coupling_mode_from_string(const std::string& name) {
    if (name == "homogeneous") return CouplingMode::Homogeneous;
    if (name == "random") return CouplingMode::Random;
    throw ValidationError("bad_value", "unknown coupling mode '" + name +
                                           "' (expected homogeneous or random)");
}

std::string to_string(AnalysisMode mode) { return mode == AnalysisMode::Oracle ? "oracle" : "gsa"; }

AnalysisMode analysis_mode_from_string(const std::string& name) {
    if (name == "oracle") return AnalysisMode::Oracle;
    if (name == "gsa") return AnalysisMode::Gsa;
    throw ValidationError("bad_value", "unknown analysis mode '" + name +
                                           "' (expected oracle or gsa)");
}

std::vector<std::string> config_keys() {
    return {"lattice",   "lattice_file",      "sizes",    "coupling",         "j0",
            "delta_j",   "field_b",           "dt",       "n_steps",          "shots",
            "seed",      "coupling_seed",     "lambda",   "tolerance",        "max_iterations",
            "statevector_limit", "counts",    "endianness", "oracle_max_sites", "max_states",
            "mode",      "realizations",      "support_fraction", "output",   "workers"};
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "lattice") {
        c.lattice = lattice_kind_from_string(value);
    } else if (key == "lattice_file") {
        c.lattice_file = value;
        if (!value.empty()) c.lattice = LatticeKind::Explicit;
    } else if (key == "sizes") {
        c.sizes.clear();
        if (!value.empty()) {
            for (const auto& item : split(value, ',')) c.sizes.push_back(parse_size(key, item));
        }
    } else if (key == "coupling") {
        c.coupling = coupling_mode_from_string(value);
    } else if (key == "j0") {
        c.j0 = parse_grid(key, value);
    } else if (key == "delta_j") {
        c.delta_j = parse_grid(key, value);
    } else if (key == "field_b") {
        c.field_b = parse_double(key, value);
    } else if (key == "dt") {
        c.dt = parse_double(key, value);
    } else if (key == "n_steps") {
        c.n_steps = static_cast<int>(parse_int(key, value));
    } else if (key == "shots") {
        c.shots = parse_int(key, value);
    } else if (key == "seed") {
        c.seed = parse_uint64(key, value);
    } else if (key == "coupling_seed") {
        c.coupling_seed = parse_uint64(key, value);
    } else if (key == "lambda") {
        c.lambda = static_cast<int>(parse_int(key, value));
    } else if (key == "tolerance") {
        c.tolerance = parse_double(key, value);
    } else if (key == "max_iterations") {
        c.max_iterations = static_cast<int>(parse_int(key, value));
    } else if (key == "statevector_limit") {
        c.statevector_limit = static_cast<int>(parse_int(key, value));
    } else if (key == "counts") {
        c.counts = value;
    } else if (key == "endianness") {
        c.endianness = endianness_from_string(value);
    } else if (key == "oracle_max_sites") {
        c.oracle_max_sites = static_cast<int>(parse_int(key, value));
    } else if (key == "max_states") {
        c.max_states = parse_uint64(key, value);
    } else if (key == "mode") {
        c.mode = analysis_mode_from_string(value);
    } else if (key == "realizations") {
        c.realizations = static_cast<int>(parse_int(key, value));
    } else if (key == "support_fraction") {
        c.support_fraction = parse_double(key, value);
    } else if (key == "output") {
        c.output = value;
    } else if (key == "workers") {
        c.workers = static_cast<int>(parse_int(key, value));
    } else {
        throw ValidationError("unknown_key", "unknown config key '" + key + "'");
    }
}

RunConfig parse_config_text(const std::string& text, RunConfig base,
                            std::vector<std::string>* keys_set) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("malformed_config",
                                  "line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        const std::string key = trim(line.substr(0, eq));
        apply_setting(base, key, value);
        if (keys_set) keys_set->push_back(key);
    }
    return base;
}

void validate(const RunConfig& c) {
    auto fail = [](const std::string& message) { throw ValidationError("invalid_config", message); };
    if (c.lattice == LatticeKind::Explicit && c.lattice_file.empty()) {
        fail("explicit lattices need lattice_file");
    }
    if (c.lattice_file.empty() && c.sizes.empty()) fail("size grid is empty");
    for (const auto& [a, b] : c.sizes) {
        if (a < 1 || b < 1) fail("lattice sizes must be positive");
    }
    if (c.grid().empty()) {
        fail(std::string(c.coupling == CouplingMode::Homogeneous ? "j0" : "delta_j") +
             " grid is empty");
    }
    for (double v : c.grid()) {
        if (!std::isfinite(v)) fail("coupling grid values must be finite");
    }
    if (c.coupling == CouplingMode::Random) {
        for (double v : c.delta_j) {
            if (v < 0.0) fail("delta_j values must be >= 0");
        }
    }
    if (!(c.field_b > 0.0) || !std::isfinite(c.field_b)) fail("field_b must be positive and finite");
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) fail("dt must be positive and finite");
    if (c.n_steps < 0) fail("n_steps must be >= 0");
    if (c.shots < 1) fail("shots must be >= 1");
    if (c.lambda < 0 || c.lambda > 2) fail("lambda must be 0, 1 or 2");
    if (!(c.tolerance > 0.0)) fail("tolerance must be positive");
    if (c.max_iterations < 0) fail("max_iterations must be >= 0");
    if (c.statevector_limit < 1 || c.statevector_limit > 30) {
        fail("statevector_limit must be in [1, 30]");
    }
    if (c.oracle_max_sites < 0 || c.oracle_max_sites > 20) {
        fail("oracle_max_sites must be in [0, 20]");
    }
    if (c.max_states < 1) fail("max_states must be >= 1");
    if (c.realizations < 1) fail("realizations must be >= 1");
    if (!(c.support_fraction > 0.0 && c.support_fraction <= 1.0)) {
        fail("support_fraction must be in (0, 1]");
    }
    if (c.workers < 1) fail("workers must be >= 1");
}

Json config_to_json(const RunConfig& c) {
    Json sizes = Json::array();
    if (c.lattice_file.empty()) {
        for (const auto& s : c.sizes) sizes.push_back(size_name(s));
    }
    return Json{{"lattice", to_string(c.lattice)},
                {"lattice_file", c.lattice_file},
                {"sizes", sizes},
                {"coupling", to_string(c.coupling)},
                {"j0", c.j0},
                {"delta_j", c.delta_j},
                {"field_b", c.field_b},
                {"dt", c.dt},
                {"n_steps", c.n_steps},
                {"shots", c.shots},
                {"seed", c.seed},
                {"coupling_seed", c.coupling_seed},
                {"lambda", c.lambda},
                {"tolerance", c.tolerance},
                {"max_iterations", c.max_iterations},
                {"statevector_limit", c.statevector_limit},
                {"counts", c.counts},
                {"endianness", endianness_name(c.endianness)},
                {"oracle_max_sites", c.oracle_max_sites},
                {"max_states", c.max_states},
                {"mode", to_string(c.mode)},
                {"realizations", c.realizations},
                {"support_fraction", c.support_fraction}};
}

RunConfig config_from_json(const Json& doc) {
    if (!doc.is_object()) throw ValidationError("malformed_config", "config must be a JSON object");
    RunConfig c;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (value.is_array()) {
                std::string joined;
                for (const auto& item : value) {
                    if (!joined.empty()) joined += ",";
                    joined += item.is_string() ? item.get<std::string>()
                              : item.is_number_float() ? format_double(item.get<double>())
                                                       : item.dump();
                }
                apply_setting(c, key, joined);
            } else if (value.is_string()) {
                apply_setting(c, key, value.get<std::string>());
            } else if (value.is_number_float()) {
                apply_setting(c, key, format_double(value.get<double>()));
            } else {
                apply_setting(c, key, value.dump());
            }
        }
    } catch (const Json::exception& e) {
        throw ValidationError("malformed_config", std::string("malformed config JSON: ") + e.what());
    }
    return c;
}

std::string config_hash(const RunConfig& config) {
    const std::string text = config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<double> default_j0_grid() {
    std::vector<double> grid;
    for (int k = -20; k <= 0; ++k) grid.push_back(k / 10.0);
    return grid;
}

std::vector<double> default_delta_j_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k) grid.push_back(k / 10.0);
    return grid;
}

Lattice build_lattice(const RunConfig& config, std::size_t size_index) {
    if (!config.lattice_file.empty()) return lattice_from_json(read_json_file(config.lattice_file));
    const auto [a, b] = config.sizes.at(size_index);
    switch (config.lattice) {
        case LatticeKind::HeavyHex:
            return Lattice::heavy_hex(a, b);
        case LatticeKind::Square:
            return Lattice::square(a, b);
        case LatticeKind::Explicit:
            break;
    }
    throw ValidationError("invalid_config", "explicit lattices need lattice_file");
}

Json record_to_json(const RunRecord& r) {
    Json doc{{"index", r.index}, {"ok", r.ok}, {"config", r.config}, {"version", kVersion}};
    if (!r.ok) {
        doc["error"] = {{"code", r.error_code}, {"message", r.error_message}};
        return doc;
    }
    Json bins = Json::object();
    for (const auto& [spin, p] : r.spin_bins) bins[std::to_string(spin)] = p;
    doc["n_qubits"] = r.n_qubits;
    doc["n_edges"] = r.n_edges;
    doc["coupling_value"] = r.coupling_value;
    doc["coupling_seed"] = r.coupling_seed ? Json(*r.coupling_seed) : Json(nullptr);
    doc["samples"] = {{"source", r.source == SampleSource::Simulated ? "simulated" : "external"},
                      {"n_shots", r.n_shots},
                      {"n_distinct", r.n_distinct},
                      {"odd_parity_fraction", r.odd_parity_fraction}};
    doc["basis_size"] = r.basis_size;
    doc["energy"] = r.energy;
    doc["converged"] = r.converged;
    doc["degenerate"] = r.degenerate;
    doc["s_z"] = r.s_z;
    doc["n_psi"] = r.n_psi;
    doc["spin_bins"] = bins;
    doc["info"] = info_to_json(r.info);
    doc["oracle_energy"] = r.oracle_energy ? Json(*r.oracle_energy) : Json(nullptr);
    return doc;
}

std::string record_to_line(const RunRecord& record) { return record_to_json(record).dump(); }

RunRecord run_point(const RunConfig& config, std::size_t size_index, std::size_t grid_index) {
    validate(config);
    const RunConfig point = single_point(config, size_index, grid_index);
    RunRecord r;
    r.index = size_index * config.grid().size() + grid_index;
    r.coupling_value = config.grid()[grid_index];

    const std::string context = "point " + std::to_string(r.index) + " (" +
                                (config.lattice_file.empty()
                                     ? to_string(config.lattice) + " " +
                                           size_name(config.sizes[size_index])
                                     : config.lattice_file) +
                                ", " + to_string(config.coupling) + " " +
                                format_double(r.coupling_value) + "): ";
    try {
        auto t0 = std::chrono::steady_clock::now();
        const Lattice lattice = build_lattice(config, size_index);
        const IsingModel model =
            config.coupling == CouplingMode::Homogeneous
                ? IsingModel::homogeneous(lattice, r.coupling_value, config.field_b)
                : IsingModel::random_uniform(lattice, r.coupling_value, config.coupling_seed,
                                             config.field_b);
        r.n_qubits = model.n_sites();
        r.n_edges = static_cast<int>(lattice.n_edges());
        if (config.coupling == CouplingMode::Random) r.coupling_seed = config.coupling_seed;

        RunConfig echo = point;
        std::optional<SampleSet> samples;
        if (config.counts.empty()) {
            EvolveOptions eo;
            eo.statevector_limit = config.statevector_limit;
            const StateVector state = evolve(model, RampSchedule(config.dt, config.n_steps), eo);
            r.timings["evolve"] = seconds_since(t0);
            t0 = std::chrono::steady_clock::now();
            samples.emplace(sample(state, config.shots, config.seed));
            r.timings["sample"] = seconds_since(t0);
        } else {
            std::filesystem::path path = config.counts;
            if (std::filesystem::is_directory(path)) {
                path /= "point_" + std::to_string(r.index) + ".json";
                echo.counts = path.string();
            }
            samples.emplace(ingest_counts(path, model.n_sites(), config.endianness));
            r.timings["ingest"] = seconds_since(t0);
        }
        r.config = config_to_json(echo);
        r.source = samples->source();
        r.n_shots = samples->n_shots();
        r.n_distinct = samples->n_distinct();
        r.odd_parity_fraction = samples->odd_parity_fraction();

        t0 = std::chrono::steady_clock::now();
        ExpandOptions xo;
        xo.max_states = config.max_states;
        const Subspace subspace = expand(*samples, model, config.lambda, xo);
        const ProjectedHamiltonian h = project(model, subspace);
        r.timings["project"] = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        SolverOptions so;
        so.tolerance = config.tolerance;
        so.max_iterations = config.max_iterations;
        const SubspaceSolution solution = ground_state(h, so);
        r.timings["solve"] = seconds_since(t0);

        r.basis_size = subspace.size();
        r.energy = solution.energy;
        r.converged = solution.converged;
        r.degenerate = solution.degenerate;
        r.s_z = average_spin(solution, subspace);
        const StateCensus census = significant_state_census(solution, subspace);
        r.n_psi = census.n_psi;
        r.spin_bins = census.spin_bins;
        r.info = info_report(*samples, solution, model);

        if (model.n_sites() <= config.oracle_max_sites) {
            t0 = std::chrono::steady_clock::now();
            ExactOptions eo;
            eo.max_sites = config.oracle_max_sites;
            eo.tolerance = config.tolerance;
            eo.min_levels = 1;
            r.oracle_energy = exact_diagonalize(model, 1, eo).energies.front();
            r.timings["oracle"] = seconds_since(t0);
        }
    } catch (const ValidationError& e) {
        throw ValidationError(e.code(), context + e.what());
    } catch (const RuntimeError& e) {
        throw RuntimeError(context + e.what());
    }
    return r;
}

RunRecord run_gsa(const RunConfig& config) { return run_point(config, 0, 0); }

SweepResult sweep(const RunConfig& config) {
    validate(config);
    const std::size_t n_grid = config.grid().size();
    const std::size_t n_points = n_sizes(config) * n_grid;
    SweepResult result;
    result.records.resize(n_points);
    detail::parallel_for(n_points, config.workers, [&](std::size_t k) {
        const std::size_t si = k / n_grid;
        const std::size_t gi = k % n_grid;
        try {
            result.records[k] = run_point(config, si, gi);
        } catch (const std::exception& e) {
            RunRecord failed;
            failed.index = k;
            failed.ok = false;
            failed.coupling_value = config.grid()[gi];
            failed.config = config_to_json(single_point(config, si, gi));
            const auto* v = dynamic_cast<const ValidationError*>(&e);
            failed.error_code = v ? v->code() : "runtime";
            failed.error_message = e.what();
            result.records[k] = std::move(failed);
        }
    });
    result.n_failed = static_cast<std::size_t>(
        std::count_if(result.records.begin(), result.records.end(),
                      [](const RunRecord& r) { return !r.ok; }));
    return result;
}

SweepResult sweep_homogeneous(RunConfig config) {
    config.coupling = CouplingMode::Homogeneous;
    return sweep(config);
}

SweepResult sweep_random(RunConfig config) {
    config.coupling = CouplingMode::Random;
    return sweep(config);
}

void write_sweep_outputs(const RunConfig& config, const SweepResult& result,
                         const std::string& command) {
    const std::filesystem::path dir = config.output;
    std::string jsonl;
    std::string csv =
        "index,status,lattice,size,n_q,coupling_mode,coupling,energy,oracle_energy,rel_error,"
        "s_z,ratio,n_psi,n_distinct,basis_size\n";
    std::string timings = "index,stage,seconds\n";
    for (const auto& r : result.records) {
        jsonl += record_to_line(r) + "\n";
        const auto& cfg = r.config;
        const std::string size =
            cfg.at("sizes").empty() ? cfg.at("lattice_file").get<std::string>()
                                    : cfg.at("sizes").at(0).get<std::string>();
        csv += std::to_string(r.index) + "," + (r.ok ? "ok" : "failed") + "," +
               cfg.at("lattice").get<std::string>() + "," + size + ",";
        if (r.ok) {
            std::optional<double> rel;
            if (r.oracle_energy && *r.oracle_energy != 0.0) {
                rel = std::abs((r.energy - *r.oracle_energy) / *r.oracle_energy);
            }
            const double ratio = r.info.ratio.defined() ? *r.info.ratio.value
                                                        : -std::numeric_limits<double>::infinity();
            csv += std::to_string(r.n_qubits) + "," + to_string(config.coupling) + "," +
                   csv_number(r.coupling_value) + "," + csv_number(r.energy) + "," +
                   csv_optional(r.oracle_energy) + "," + csv_optional(rel) + "," +
                   csv_number(r.s_z) + "," + csv_number(ratio) + "," + std::to_string(r.n_psi) +
                   "," + std::to_string(r.n_distinct) + "," + std::to_string(r.basis_size) + "\n";
        } else {
            csv += "," + to_string(config.coupling) + "," + csv_number(r.coupling_value) +
                   ",,,,,,,,\n";
        }
        for (const auto& [stage, seconds] : r.timings) {
            timings += std::to_string(r.index) + "," + stage + "," + csv_number(seconds) + "\n";
        }
    }
    write_text_file(dir / "records.jsonl", jsonl);
    write_text_file(dir / "sweep.csv", csv);
    write_text_file(dir / "timings.csv", timings);
    const Json manifest{{"command", command},
                        {"version", kVersion},
                        {"config", config_to_json(config)},
                        {"config_hash", config_hash(config)},
                        {"n_points", result.records.size()},
                        {"n_failed", result.n_failed},
                        {"files", {"records.jsonl", "sweep.csv", "timings.csv"}}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ValidationError("bad_fit", "slope fit needs at least two (x, y) pairs");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0)) {
            throw ValidationError("bad_fit", "log-log fit needs positive values");
        }
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) throw ValidationError("bad_fit", "all sizes are equal");
    return (n * sxy - sx * sy) / denom;
}

std::vector<SizeFit> fit_sizes(const std::vector<CensusRow>& rows) {
    std::map<double, std::vector<const CensusRow*>> by_coupling;
    for (const auto& row : rows) by_coupling[row.delta_j].push_back(&row);
    std::vector<SizeFit> fits;
    for (const auto& [coupling, group] : by_coupling) {
        SizeFit fit;
        fit.coupling = coupling;
        fit.n_sizes = static_cast<int>(group.size());
        std::vector<double> x, y;
        double sxy = 0.0, sxx = 0.0;
        for (const CensusRow* row : group) {
            const double nq = row->n_q;
            x.push_back(nq);
            y.push_back(row->mean_n_psi);
            sxy += nq * row->mean_n_psi;
            sxx += nq * nq;
            fit.max_ratio = std::max(fit.max_ratio, row->mean_n_psi / nq);
        }
        fit.linear_c = sxx > 0.0 ? sxy / sxx : 0.0;
        bool distinct = false;
        for (double v : x) distinct = distinct || v != x.front();
        fit.slope = distinct ? log_log_slope(x, y) : std::numeric_limits<double>::quiet_NaN();
        fits.push_back(fit);
    }
    return fits;
}

CensusTables analyze_subspace(const RunConfig& config) {
    validate(config);
    CensusTables tables;
    tables.mode = config.mode;
    const auto& grid = config.grid();
    const std::size_t sizes = n_sizes(config);

    if (config.mode == AnalysisMode::Oracle) {
        for (std::size_t si = 0; si < sizes; ++si) {
            const Lattice lattice = build_lattice(config, si);
            EnsembleOptions eo;
            eo.workers = config.workers;
            eo.field_b = config.field_b;
            eo.support_fraction = config.support_fraction;
            if (config.coupling == CouplingMode::Random) {
                auto rows = ensemble_census(lattice, grid, config.realizations,
                                            config.coupling_seed, eo);
                tables.rows.insert(tables.rows.end(), rows.begin(), rows.end());
                continue;
            }
            std::vector<CensusRow> rows(grid.size());
            detail::parallel_for(grid.size(), config.workers, [&](std::size_t g) {
                const auto model = IsingModel::homogeneous(lattice, grid[g], config.field_b);
                ExactOptions xo;
                xo.min_levels = 1;
                const auto spectrum = exact_diagonalize(model, 1, xo);
                const auto census =
                    exact_state_census(model, spectrum.ground_vector, config.support_fraction);
                CensusRow& row = rows[g];
                row.delta_j = grid[g];
                row.n_q = lattice.n_sites();
                row.n_realizations = 1;
                row.mean_n_psi = census.n_psi;
                row.mean_proxy_size = static_cast<double>(census.proxy_size);
                row.spin_bins = census.spin_bins;
            });
            tables.rows.insert(tables.rows.end(), rows.begin(), rows.end());
        }
    } else {
        const int n_real = config.coupling == CouplingMode::Random ? config.realizations : 1;
        const std::size_t per_size = grid.size() * static_cast<std::size_t>(n_real);
        for (std::size_t si = 0; si < sizes; ++si) {
            std::vector<RunRecord> runs(per_size);
            RunConfig serial = config;
            serial.workers = 1;
            detail::parallel_for(per_size, config.workers, [&](std::size_t task) {
                const std::size_t g = task / static_cast<std::size_t>(n_real);
                const std::size_t r = task % static_cast<std::size_t>(n_real);
                RunConfig point = serial;
                point.oracle_max_sites = 0;
                if (config.coupling == CouplingMode::Random) {
                    point.coupling_seed = realization_seed(config.coupling_seed, r);
                }
                runs[task] = run_point(point, si, g);
            });
            for (std::size_t g = 0; g < grid.size(); ++g) {
                CensusRow row;
                row.delta_j = grid[g];
                row.n_realizations = n_real;
                double sum = 0.0, sum_sq = 0.0, basis = 0.0;
                for (int r = 0; r < n_real; ++r) {
                    const RunRecord& run = runs[g * static_cast<std::size_t>(n_real) +
                                                static_cast<std::size_t>(r)];
                    row.n_q = run.n_qubits;
                    sum += run.n_psi;
                    sum_sq += static_cast<double>(run.n_psi) * run.n_psi;
                    basis += static_cast<double>(run.basis_size);
                    for (const auto& [spin, p] : run.spin_bins) row.spin_bins[spin] += p / n_real;
                }
                row.mean_n_psi = sum / n_real;
                row.mean_proxy_size = basis / n_real;
                if (n_real > 1) {
                    const double var =
                        std::max(0.0, (sum_sq - sum * sum / n_real) / (n_real - 1));
                    row.stderr_n_psi = std::sqrt(var / n_real);
                }
                tables.rows.push_back(std::move(row));
            }
        }
    }
    tables.fits = fit_sizes(tables.rows);
    return tables;
}

void write_census_outputs(const RunConfig& config, const CensusTables& tables) {
    const std::filesystem::path dir = config.output;
    const std::string mode = to_string(tables.mode);
    std::string vs_size = "mode,coupling,n_q,n_realizations,mean_n_psi,stderr_n_psi,mean_proxy_size\n";
    std::string per_site = "mode,n_q,coupling,n_psi_per_site,stderr_per_site\n";
    std::string bins = "mode,n_q,coupling,total_spin,n_flipped,probability\n";
    for (const auto& row : tables.rows) {
        vs_size += mode + "," + csv_number(row.delta_j) + "," + std::to_string(row.n_q) + "," +
                   std::to_string(row.n_realizations) + "," + csv_number(row.mean_n_psi) + "," +
                   csv_number(row.stderr_n_psi) + "," + csv_number(row.mean_proxy_size) + "\n";
        per_site += mode + "," + std::to_string(row.n_q) + "," + csv_number(row.delta_j) + "," +
                    csv_number(row.mean_n_psi / row.n_q) + "," +
                    csv_number(row.stderr_n_psi / row.n_q) + "\n";
        for (const auto& [spin, p] : row.spin_bins) {
            bins += mode + "," + std::to_string(row.n_q) + "," + csv_number(row.delta_j) + "," +
                    std::to_string(spin) + "," + std::to_string((spin + row.n_q) / 2) + "," +
                    csv_number(p) + "\n";
        }
    }
    std::string fits = "mode,coupling,slope,linear_c,max_ratio,n_sizes\n";
    for (const auto& f : tables.fits) {
        fits += mode + "," + csv_number(f.coupling) + "," + csv_number(f.slope) + "," +
                csv_number(f.linear_c) + "," + csv_number(f.max_ratio) + "," +
                std::to_string(f.n_sizes) + "\n";
    }
    write_text_file(dir / "census_vs_size.csv", vs_size);
    write_text_file(dir / "census_per_site.csv", per_site);
    write_text_file(dir / "spin_bins.csv", bins);
    write_text_file(dir / "fits.csv", fits);
    const Json manifest{
        {"command", "analyze-subspace"},
        {"version", kVersion},
        {"config", config_to_json(config)},
        {"config_hash", config_hash(config)},
        {"n_rows", tables.rows.size()},
        {"files", {"census_vs_size.csv", "census_per_site.csv", "spin_bins.csv", "fits.csv"}}};
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace cvqe
