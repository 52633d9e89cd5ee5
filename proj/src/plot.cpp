#include "cvqe/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "cvqe/error.hpp"
#include "cvqe/serialization.hpp"

namespace cvqe {

namespace {

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

const std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                             "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, ',')) out.push_back(item);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double cell_number(const CsvTable& table, const std::vector<std::string>& row, std::size_t col) {
    const std::string& text = row.at(col);
    if (text.empty()) return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) {
        throw ValidationError("schema", table.origin + ": column '" + table.header.at(col) +
                                            "' has non-numeric value '" + text + "'");
    }
    return v;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double map(double v, double p0, double p1) const {
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        const double t = ((log ? std::log10(v) : v) - a) / (b - a);
        return p0 + t * (p1 - p0);
    }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            for (double d = std::floor(std::log10(lo)); d <= std::ceil(std::log10(hi)); d += 1.0) {
                const double v = std::pow(10.0, d);
                if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) out.push_back(v);
            }
            if (out.size() < 2) out = {lo, hi};
            return out;
        }
        // Step of 1, 2 or 5 times a power of ten giving about five ticks.
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        const double unit = raw / mag;
        const double step = mag * (unit < 1.5 ? 1.0 : unit < 3.5 ? 2.0 : unit < 7.5 ? 5.0 : 10.0);
        for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + step * 1e-9; v += step) {
            out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
        }
        if (out.size() < 2) out = {lo, hi};
        return out;
    }
};

Axis make_axis(double lo, double hi, bool log) {
    Axis a;
    a.log = log;
    if (log) {
        lo = std::max(lo, std::numeric_limits<double>::min());
        if (hi <= lo) {
            a.lo = lo / 2;
            a.hi = lo * 2;
        } else {
            a.lo = lo / 1.15;
            a.hi = hi * 1.15;
        }
        return a;
    }
    if (hi <= lo) {
        const double pad = lo == 0.0 ? 0.5 : std::abs(lo) * 0.1;
        a.lo = lo - pad;
        a.hi = hi + pad;
    } else {
        const double pad = (hi - lo) * 0.05;
        a.lo = lo - pad;
        a.hi = hi + pad;
    }
    return a;
}

std::string svg_open(const PlotStyle& style) {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(style.width) + "\" height=\"" + std::to_string(style.height) +
                    "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
                    std::to_string(style.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty()) {
        s += "<text x=\"" + fmt(style.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" "
             "font-size=\"14\">" + escape(style.title) + "</text>\n";
    }
    return s;
}

std::string axis_labels(const PlotStyle& style, const std::string& x_label,
                        const std::string& y_label) {
    const double plot_bottom = style.height - kMarginBottom;
    const double mid_x = (kMarginLeft + style.width - kMarginRight) / 2.0;
    const double mid_y = (kMarginTop + plot_bottom) / 2.0;
    return "<text x=\"" + fmt(mid_x) + "\" y=\"" + fmt(style.height - 12.0) +
           "\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n" +
           "<text x=\"16\" y=\"" + fmt(mid_y) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt(mid_y) + ")\">" + escape(y_label) + "</text>\n";
}

/// Piecewise-linear viridis approximation, t in [0, 1].
std::string colormap(double t) {
    static const std::array<std::array<double, 3>, 5> stops = {{{68, 1, 84},
                                                                {59, 82, 139},
                                                                {33, 145, 140},
                                                                {94, 201, 98},
                                                                {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double f = t - static_cast<double>(k);
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                  static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                  static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
    return buf;
}

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::filesystem::path write_svg(const std::filesystem::path& path, const std::string& svg) {
    write_text_file(path, svg);
    return path;
}

}  // namespace

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw ValidationError("schema", origin + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
    CsvTable table;
    table.origin = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ValidationError("schema", origin + ": line " + std::to_string(line_no) + " has " +
                                                std::to_string(fields.size()) + " fields, header has " +
                                                std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) throw ValidationError("schema", origin + ": empty CSV");
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("missing_file", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

CsvTable records_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("missing_file", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::vector<Json> docs;
    try {
        if (path.extension() == ".jsonl") {
            std::istringstream lines(text);
            std::string line;
            while (std::getline(lines, line)) {
                if (line.find_first_not_of(" \t\r") != std::string::npos) docs.push_back(Json::parse(line));
            }
        } else {
            const Json doc = Json::parse(text);
            if (doc.is_array()) {
                docs.assign(doc.begin(), doc.end());
            } else {
                docs.push_back(doc);
            }
        }
    } catch (const Json::parse_error& e) {
        throw ValidationError("malformed_json", path.string() + ": " + e.what());
    }

    CsvTable table;
    table.origin = path.string();
    table.header = {"n_q", "coupling", "s_z", "energy", "ratio"};
    for (const auto& doc : docs) {
        if (!doc.is_object()) throw ValidationError("schema", path.string() + ": record is not an object");
        if (!doc.value("ok", false)) continue;
        for (const char* key : {"n_qubits", "coupling_value", "s_z", "energy", "info"}) {
            if (!doc.contains(key)) {
                throw ValidationError("schema", path.string() + ": record is missing '" +
                                                    std::string(key) + "'");
            }
        }
        const auto& ratio = doc.at("info").value("ratio", Json(nullptr));
        table.rows.push_back(
            {std::to_string(doc.at("n_qubits").get<int>()),
             format_double(doc.at("coupling_value").get<double>()),
             format_double(doc.at("s_z").get<double>()), format_double(doc.at("energy").get<double>()),
             ratio.is_null() ? "-inf" : format_double(ratio.get<double>())});
    }
    return table;
}

std::string line_plot_svg(const std::vector<Series>& series, const std::string& x_label,
                          const std::string& y_label, const PlotStyle& style) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series) {
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            if (style.log_x && s.x[k] <= 0.0) continue;
            if (style.log_y && s.y[k] <= 0.0) continue;
            x_lo = std::min(x_lo, s.x[k]);
            x_hi = std::max(x_hi, s.x[k]);
            y_lo = std::min(y_lo, s.y[k]);
            y_hi = std::max(y_hi, s.y[k]);
        }
    }
    if (!std::isfinite(x_lo)) {
        x_lo = style.log_x ? 1.0 : 0.0;
        x_hi = x_lo;
        y_lo = style.log_y ? 1.0 : 0.0;
        y_hi = y_lo;
    }
    const Axis ax = make_axis(x_lo, x_hi, style.log_x);
    const Axis ay = make_axis(y_lo, y_hi, style.log_y);
    const double left = kMarginLeft, right = style.width - kMarginRight;
    const double top = kMarginTop, bottom = style.height - kMarginBottom;

    std::string s = svg_open(style);
    s += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(right - left) +
         "\" height=\"" + fmt(bottom - top) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ax.ticks()) {
        const double px = ax.map(t, left, right);
        s += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(bottom) + "\" x2=\"" + fmt(px) + "\" y2=\"" +
             fmt(bottom + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(bottom + 18) + "\" text-anchor=\"middle\">" +
             fmt(t) + "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double py = ay.map(t, bottom, top);
        s += "<line x1=\"" + fmt(left - 5) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(left) +
             "\" y2=\"" + fmt(py) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt(left - 8) + "\" y=\"" + fmt(py + 4) + "\" text-anchor=\"end\">" +
             fmt(t) + "</text>\n";
    }
    s += axis_labels(style, x_label, y_label);

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& ser = series[i];
        const std::string color = kPalette[i % kPalette.size()];
        std::string points;
        std::string markers;
        for (std::size_t k = 0; k < ser.x.size(); ++k) {
            if (!std::isfinite(ser.x[k]) || !std::isfinite(ser.y[k])) continue;
            if ((style.log_x && ser.x[k] <= 0.0) || (style.log_y && ser.y[k] <= 0.0)) continue;
            const double px = ax.map(ser.x[k], left, right);
            const double py = ay.map(ser.y[k], bottom, top);
            points += fmt(px) + "," + fmt(py) + " ";
            markers += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) + "\" r=\"3\" fill=\"" +
                       color + "\"/>\n";
        }
        if (!points.empty()) {
            s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" +
                 points + "\"/>\n";
        }
        s += markers;
        const double ly = top + 14.0 + 18.0 * static_cast<double>(i);
        s += "<line x1=\"" + fmt(right + 12) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
             fmt(right + 32) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + fmt(right + 38) + "\" y=\"" + fmt(ly) + "\">" + escape(ser.label) +
             "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

std::string heatmap_svg(const Heatmap& map, const std::string& x_label, const std::string& y_label,
                        const PlotStyle& style) {
    const std::size_t nx = map.x_values.size();
    const std::size_t ny = map.y_values.size();
    if (map.cells.size() != nx * ny) {
        throw ValidationError("schema", "heatmap has " + std::to_string(map.cells.size()) +
                                            " cells for a " + std::to_string(ny) + " x " +
                                            std::to_string(nx) + " grid");
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : map.cells) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;

    const double left = kMarginLeft, right = style.width - kMarginRight;
    const double top = kMarginTop, bottom = style.height - kMarginBottom;
    const double cw = nx > 0 ? (right - left) / static_cast<double>(nx) : 0.0;
    const double ch = ny > 0 ? (bottom - top) / static_cast<double>(ny) : 0.0;

    std::string s = svg_open(style);
    s += "<defs><pattern id=\"neg-inf\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\">"
         "<rect width=\"6\" height=\"6\" fill=\"#eeeeee\"/>"
         "<path d=\"M0,6 L6,0\" stroke=\"#555555\" stroke-width=\"1\"/></pattern></defs>\n";
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double v = map.cells[iy * nx + ix];
            if (std::isnan(v)) continue;
            const double px = left + cw * static_cast<double>(ix);
            const double py = bottom - ch * static_cast<double>(iy + 1);
            std::string fill;
            if (std::isinf(v) && v < 0) {
                fill = "url(#neg-inf)";
            } else {
                fill = colormap(hi > lo ? (v - lo) / (hi - lo) : 0.5);
            }
            s += "<rect x=\"" + fmt(px) + "\" y=\"" + fmt(py) + "\" width=\"" + fmt(cw) +
                 "\" height=\"" + fmt(ch) + "\" fill=\"" + fill + "\"><title>" + fmt(v) +
                 "</title></rect>\n";
        }
    }
    s += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(right - left) +
         "\" height=\"" + fmt(bottom - top) + "\" fill=\"none\" stroke=\"black\"/>\n";
    const std::size_t x_stride = std::max<std::size_t>(1, nx / 8);
    for (std::size_t ix = 0; ix < nx; ix += x_stride) {
        const double px = left + cw * (static_cast<double>(ix) + 0.5);
        s += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(bottom + 18) + "\" text-anchor=\"middle\">" +
             fmt(map.x_values[ix]) + "</text>\n";
    }
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double py = bottom - ch * (static_cast<double>(iy) + 0.5);
        s += "<text x=\"" + fmt(left - 8) + "\" y=\"" + fmt(py + 4) + "\" text-anchor=\"end\">" +
             fmt(map.y_values[iy]) + "</text>\n";
    }
    s += axis_labels(style, x_label, y_label);

    // Color bar.
    const double bx = right + 20, bw = 16;
    for (int k = 0; k < 50; ++k) {
        const double t0 = k / 50.0;
        s += "<rect x=\"" + fmt(bx) + "\" y=\"" + fmt(bottom - (bottom - top) * (t0 + 0.02)) +
             "\" width=\"" + fmt(bw) + "\" height=\"" + fmt((bottom - top) * 0.02 + 0.5) +
             "\" fill=\"" + colormap(t0) + "\"/>\n";
    }
    s += "<text x=\"" + fmt(bx + bw + 4) + "\" y=\"" + fmt(bottom) + "\">" + fmt(lo) + "</text>\n";
    s += "<text x=\"" + fmt(bx + bw + 4) + "\" y=\"" + fmt(top + 10) + "\">" + fmt(hi) + "</text>\n";
    const bool any_neg_inf = std::any_of(map.cells.begin(), map.cells.end(),
                                         [](double v) { return std::isinf(v) && v < 0; });
    if (any_neg_inf) {
        s += "<rect x=\"" + fmt(bx) + "\" y=\"" + fmt(bottom + 14) + "\" width=\"" + fmt(bw) +
             "\" height=\"12\" fill=\"url(#neg-inf)\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt(bx + bw + 4) + "\" y=\"" + fmt(bottom + 24) + "\">-inf</text>\n";
    }
    s += "</svg>\n";
    return s;
}

std::vector<std::filesystem::path> render_sweep_plots(const CsvTable& table,
                                                      const std::filesystem::path& out_dir) {
    const std::size_t c_nq = table.column("n_q");
    const std::size_t c_coupling = table.column("coupling");
    const std::size_t c_sz = table.column("s_z");
    const std::size_t c_energy = table.column("energy");
    const std::size_t c_ratio = table.column("ratio");
    const bool has_status = table.has_column("status");
    const std::size_t c_status = has_status ? table.column("status") : 0;

    std::map<double, Series> spin;
    std::vector<double> xs, ys;
    struct Point {
        double n_q, coupling, energy, ratio;
    };
    std::vector<Point> points;
    for (const auto& row : table.rows) {
        if (has_status && row[c_status] != "ok") continue;
        Point p{cell_number(table, row, c_nq), cell_number(table, row, c_coupling),
                cell_number(table, row, c_energy), cell_number(table, row, c_ratio)};
        const double sz = cell_number(table, row, c_sz);
        auto& ser = spin[p.n_q];
        ser.label = "N_Q = " + fmt(p.n_q);
        ser.x.push_back(p.coupling);
        ser.y.push_back(sz);
        xs.push_back(p.coupling);
        ys.push_back(p.n_q);
        points.push_back(p);
    }
    std::vector<Series> spin_series;
    for (auto& [nq, ser] : spin) {
        std::vector<std::size_t> order(ser.x.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ser.x[a] < ser.x[b]; });
        Series sorted{ser.label, {}, {}};
        for (std::size_t k : order) {
            sorted.x.push_back(ser.x[k]);
            sorted.y.push_back(ser.y[k]);
        }
        spin_series.push_back(std::move(sorted));
    }

    Heatmap energy, ratio;
    energy.x_values = ratio.x_values = sorted_unique(xs);
    energy.y_values = ratio.y_values = sorted_unique(ys);
    const std::size_t nx = energy.x_values.size();
    energy.cells.assign(nx * energy.y_values.size(), std::numeric_limits<double>::quiet_NaN());
    ratio.cells = energy.cells;
    for (const auto& p : points) {
        const auto ix = static_cast<std::size_t>(
            std::lower_bound(energy.x_values.begin(), energy.x_values.end(), p.coupling) -
            energy.x_values.begin());
        const auto iy = static_cast<std::size_t>(
            std::lower_bound(energy.y_values.begin(), energy.y_values.end(), p.n_q) -
            energy.y_values.begin());
        energy.cells[iy * nx + ix] = p.energy;
        ratio.cells[iy * nx + ix] = p.ratio;
    }

    std::vector<std::filesystem::path> out;
    PlotStyle style;
    style.title = "average spin";
    out.push_back(write_svg(out_dir / "spin.svg", line_plot_svg(spin_series, "coupling / B", "s_Z", style)));
    style.title = "ground-state energy";
    out.push_back(write_svg(out_dir / "energy.svg", heatmap_svg(energy, "coupling / B", "N_Q", style)));
    style.title = "information ratio R";
    out.push_back(write_svg(out_dir / "ratio.svg", heatmap_svg(ratio, "coupling / B", "N_Q", style)));
    return out;
}

std::vector<std::filesystem::path> render_census_plots(const CsvTable& table,
                                                       const std::filesystem::path& out_dir) {
    const std::size_t c_nq = table.column("n_q");
    const std::size_t c_coupling = table.column("coupling");
    const std::size_t c_mean = table.column("mean_n_psi");
    std::map<double, Series> by_coupling;
    for (const auto& row : table.rows) {
        const double coupling = cell_number(table, row, c_coupling);
        auto& ser = by_coupling[coupling];
        ser.label = "coupling " + fmt(coupling);
        ser.x.push_back(cell_number(table, row, c_nq));
        ser.y.push_back(cell_number(table, row, c_mean));
    }
    std::vector<Series> series;
    for (auto& [c, ser] : by_coupling) series.push_back(std::move(ser));
    PlotStyle style;
    style.title = "significant basis states";
    style.log_x = true;
    style.log_y = true;
    return {write_svg(out_dir / "census.svg", line_plot_svg(series, "N_Q", "mean N_psi", style))};
}

std::vector<std::filesystem::path> render_plots(const std::filesystem::path& input,
                                                const std::filesystem::path& out_dir) {
    const auto ext = input.extension();
    if (ext == ".json" || ext == ".jsonl") return render_sweep_plots(records_table(input), out_dir);
    const CsvTable table = read_csv(input);
    if (table.has_column("mean_n_psi")) return render_census_plots(table, out_dir);
    return render_sweep_plots(table, out_dir);
}

}  // namespace cvqe
