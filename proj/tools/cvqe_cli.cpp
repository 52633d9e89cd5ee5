#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "cvqe/error.hpp"
#include "cvqe/experiment.hpp"
#include "cvqe/plot.hpp"
#include "cvqe/serialization.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPartial = 3;

/// Config keys exposed as --key (and --key-with-dashes) on a subcommand.
struct ConfigOptions {
    std::string config_file;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App& app) {
        app.add_option("-c,--config", config_file, "flat key = value config file")
            ->check(CLI::ExistingFile);
        for (const auto& key : cvqe::config_keys()) {
            std::string names = "--" + key;
            std::string dashed = key;
            std::replace(dashed.begin(), dashed.end(), '_', '-');
            if (dashed != key) names += ",--" + dashed;
            options[key] = app.add_option(names, values[key], "config key " + key)
                               ->allow_extra_args(false);
        }
    }

    /// Defaults, then the config file, then flags.
    cvqe::RunConfig resolve(cvqe::RunConfig base, std::set<std::string>* set_keys = nullptr) const {
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            std::ostringstream text;
            text << in.rdbuf();
            std::vector<std::string> keys;
            base = cvqe::parse_config_text(text.str(), base, &keys);
            if (set_keys) set_keys->insert(keys.begin(), keys.end());
        }
        for (const auto& [key, opt] : options) {
            if (opt->count() > 0) {
                cvqe::apply_setting(base, key, values.at(key));
                if (set_keys) set_keys->insert(key);
            }
        }
        return base;
    }
};

void print_sweep_summary(const cvqe::SweepResult& result, const cvqe::RunConfig& config) {
    std::cerr << "points: " << result.records.size() << ", failed: " << result.n_failed
              << ", output: " << config.output << "\n";
    for (const auto& r : result.records) {
        if (!r.ok) std::cerr << "  point " << r.index << ": " << r.error_message << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Guided-sampling subspace solver for the transverse-field Ising model"};
    app.set_version_flag("--version", std::string(cvqe::kVersion));
    app.require_subcommand(1);

    // lattice
    auto* lattice_cmd = app.add_subcommand("lattice", "print a lattice as JSON");
    std::string lattice_kind = "heavy_hex";
    std::string lattice_size = "5x5";
    std::string lattice_out;
    bool with_positions = false;
    lattice_cmd->add_option("--lattice", lattice_kind, "heavy_hex or square")->capture_default_str();
    lattice_cmd->add_option("--size", lattice_size, "NxM")->capture_default_str();
    lattice_cmd->add_option("-o,--output", lattice_out, "write to this file instead of stdout");
    lattice_cmd->add_flag("--positions", with_positions, "include site coordinates");

    // run / sweeps / analysis
    auto* run_cmd = app.add_subcommand("run", "one guided-sampling run; prints the record JSON");
    ConfigOptions run_opts;
    run_opts.attach(*run_cmd);

    auto* homo_cmd = app.add_subcommand("sweep-homogeneous", "J0 grid x size grid");
    ConfigOptions homo_opts;
    homo_opts.attach(*homo_cmd);

    auto* rand_cmd = app.add_subcommand("sweep-random", "delta_J grid x size grid");
    ConfigOptions rand_opts;
    rand_opts.attach(*rand_cmd);

    auto* analyze_cmd = app.add_subcommand("analyze-subspace", "significant-state census");
    ConfigOptions analyze_opts;
    analyze_opts.attach(*analyze_cmd);

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "render SVG figures from records or CSV tables");
    std::string plot_input;
    std::string plot_out = ".";
    plot_cmd->add_option("input", plot_input, "records.jsonl, record JSON, sweep.csv or census_vs_size.csv")
        ->required();
    plot_cmd->add_option("-o,--output", plot_out, "output directory")->capture_default_str();

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "validate an external counts file");
    std::string ingest_path;
    int ingest_qubits = 0;
    std::string ingest_endianness = "big";
    std::string ingest_out;
    ingest_cmd->add_option("counts", ingest_path, "JSON object of bitstring -> count")->required();
    ingest_cmd->add_option("-n,--n-qubits", ingest_qubits, "number of qubits")->required();
    ingest_cmd->add_option("--endianness", ingest_endianness, "big (qubit 0 rightmost) or little")
        ->capture_default_str();
    ingest_cmd->add_option("-o,--output", ingest_out, "write the normalized samples here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (lattice_cmd->parsed()) {
            cvqe::RunConfig c;
            cvqe::apply_setting(c, "lattice", lattice_kind);
            cvqe::apply_setting(c, "sizes", lattice_size);
            const auto lattice = cvqe::build_lattice(c, 0);
            auto doc = cvqe::lattice_to_json(lattice, with_positions);
            doc["n_edges"] = lattice.n_edges();
            doc["max_degree"] = lattice.max_degree();
            const std::string text = doc.dump(2) + "\n";
            if (lattice_out.empty()) {
                std::cout << text;
            } else {
                cvqe::write_text_file(lattice_out, text);
            }
            return kExitOk;
        }

        if (run_cmd->parsed()) {
            std::set<std::string> set_keys;
            const auto config = run_opts.resolve({}, &set_keys);
            const auto record = cvqe::run_gsa(config);
            const std::string text = cvqe::record_to_json(record).dump(2) + "\n";
            std::cout << text;
            if (set_keys.count("output")) {
                cvqe::write_text_file(std::filesystem::path(config.output) / "record.json", text);
            }
            return kExitOk;
        }

        if (homo_cmd->parsed() || rand_cmd->parsed()) {
            const bool homogeneous = homo_cmd->parsed();
            std::set<std::string> set_keys;
            cvqe::RunConfig config = (homogeneous ? homo_opts : rand_opts).resolve({}, &set_keys);
            if (homogeneous && !set_keys.count("j0")) config.j0 = cvqe::default_j0_grid();
            if (!homogeneous && !set_keys.count("delta_j")) config.delta_j = cvqe::default_delta_j_grid();
            const auto result =
                homogeneous ? cvqe::sweep_homogeneous(config) : cvqe::sweep_random(config);
            config.coupling = homogeneous ? cvqe::CouplingMode::Homogeneous : cvqe::CouplingMode::Random;
            cvqe::write_sweep_outputs(config, result,
                                      homogeneous ? "sweep-homogeneous" : "sweep-random");
            print_sweep_summary(result, config);
            return result.n_failed > 0 ? kExitPartial : kExitOk;
        }

        if (analyze_cmd->parsed()) {
            cvqe::RunConfig base;
            base.lattice = cvqe::LatticeKind::Square;
            base.sizes = {{2, 2}, {2, 3}, {3, 3}, {3, 4}, {4, 4}};
            base.coupling = cvqe::CouplingMode::Random;
            base.delta_j = {0.0, 0.2, 0.5, 0.8, 1.6, 3.2, 7.6};
            const auto config = analyze_opts.resolve(base);
            const auto tables = cvqe::analyze_subspace(config);
            cvqe::write_census_outputs(config, tables);
            std::cout << "coupling,slope,linear_c,max_ratio\n";
            for (const auto& f : tables.fits) {
                std::cout << cvqe::format_double(f.coupling) << "," << cvqe::format_double(f.slope)
                          << "," << cvqe::format_double(f.linear_c) << ","
                          << cvqe::format_double(f.max_ratio) << "\n";
            }
            return kExitOk;
        }

        if (plot_cmd->parsed()) {
            for (const auto& path : cvqe::render_plots(plot_input, plot_out)) {
                std::cout << path.string() << "\n";
            }
            return kExitOk;
        }

        if (ingest_cmd->parsed()) {
            const auto samples = cvqe::ingest_counts(ingest_path, ingest_qubits,
                                                     cvqe::endianness_from_string(ingest_endianness));
            const std::string text = cvqe::samples_to_json(samples).dump(2) + "\n";
            if (ingest_out.empty()) {
                std::cout << text;
            } else {
                cvqe::write_text_file(ingest_out, text);
            }
            if (samples.odd_parity_fraction() > 0.0) {
                std::cerr << "warning: " << samples.odd_parity_fraction()
                          << " of the shots have odd parity (noise)\n";
            }
            return kExitOk;
        }
    } catch (const cvqe::ValidationError& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
