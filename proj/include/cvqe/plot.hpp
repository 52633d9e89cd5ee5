#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cvqe {

struct CsvTable {
    std::string origin;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool has_column(const std::string& name) const;
    /// Throws ValidationError("schema") naming the column when absent.
    std::size_t column(const std::string& name) const;
};

/// Comma-separated text with a header row; no quoting.
CsvTable parse_csv(const std::string& text, const std::string& origin = "csv");
CsvTable read_csv(const std::filesystem::path& path);

/// Sweep table (n_q, coupling, s_z, energy, ratio) built from records.jsonl or
/// a single record JSON file. Failed records are skipped.
CsvTable records_table(const std::filesystem::path& path);

struct PlotStyle {
    int width = 640;
    int height = 420;
    std::string title;
    bool log_x = false;
    bool log_y = false;
};

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string line_plot_svg(const std::vector<Series>& series, const std::string& x_label,
                          const std::string& y_label, const PlotStyle& style = {});

/// Cells are row-major over (y, x). NaN leaves a cell blank; -infinity is drawn
/// with a hatch pattern and excluded from the color scale.
struct Heatmap {
    std::vector<double> x_values;
    std::vector<double> y_values;
    std::vector<double> cells;
};

std::string heatmap_svg(const Heatmap& map, const std::string& x_label, const std::string& y_label,
                        const PlotStyle& style = {});

/// spin.svg, energy.svg and ratio.svg from a sweep table.
std::vector<std::filesystem::path> render_sweep_plots(const CsvTable& table,
                                                      const std::filesystem::path& out_dir);

/// census.svg (N_psi against N_Q, log-log, one line per coupling).
std::vector<std::filesystem::path> render_census_plots(const CsvTable& table,
                                                       const std::filesystem::path& out_dir);

/// Dispatches on the input: .json/.jsonl records, a census CSV (has
/// mean_n_psi) or a sweep CSV.
std::vector<std::filesystem::path> render_plots(const std::filesystem::path& input,
                                                const std::filesystem::path& out_dir);

}  // namespace cvqe
