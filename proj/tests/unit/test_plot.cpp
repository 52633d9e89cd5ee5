#include "cvqe/plot.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "cvqe/error.hpp"
#include "cvqe/experiment.hpp"

using namespace cvqe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cvqe_plot_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kSweepCsv =
    "index,status,n_q,coupling,energy,s_z,ratio\n"
    "0,ok,18,-1,-19.5,-0.8,-2.5\n"
    "1,ok,18,0,-18,-1,-inf\n"
    "2,ok,23,-1,-25.1,-0.79,-2.9\n"
    "3,failed,23,0,,,\n";

}  // namespace

TEST(Csv, ParseAndColumns) {
    const auto t = parse_csv("a,b\n1,2\n3,4\n", "t.csv");
    EXPECT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.column("b"), 1u);
    EXPECT_FALSE(t.has_column("c"));
    EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), ValidationError);
    EXPECT_THROW(parse_csv(""), ValidationError);
}

TEST(Csv, MissingColumnIsNamed) {
    const auto dir = scratch("missing");
    const auto t = parse_csv("index,n_q,coupling,energy,ratio\n0,18,-1,-19,-2\n1,23,-1,-25,-3\n",
                             "mixed.csv");
    try {
        render_sweep_plots(t, dir);
        FAIL() << "expected a schema error";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.code(), "schema");
        EXPECT_NE(std::string(e.what()).find("'s_z'"), std::string::npos) << e.what();
    }
}

TEST(Render, SweepTableGivesThreeFigures) {
    const auto dir = scratch("sweep");
    std::ofstream(dir / "sweep.csv") << kSweepCsv;
    const auto files = render_plots(dir / "sweep.csv", dir / "figs");
    ASSERT_EQ(files.size(), 3u);
    for (const char* name : {"spin.svg", "energy.svg", "ratio.svg"}) {
        const auto text = slurp(dir / "figs" / name);
        EXPECT_EQ(text.rfind("<svg", 0), 0u) << name;
        EXPECT_NE(text.find("</svg>"), std::string::npos) << name;
    }
    EXPECT_NE(slurp(dir / "figs" / "ratio.svg").find("url(#neg-inf)"), std::string::npos);
}

TEST(Render, SingleRecord) {
    const auto dir = scratch("record");
    RunConfig c;
    c.j0 = {0.0};
    const auto record = run_gsa(c);
    std::ofstream(dir / "record.json") << record_to_json(record).dump(2);
    const auto table = records_table(dir / "record.json");
    ASSERT_EQ(table.rows.size(), 1u);
    const auto files = render_plots(dir / "record.json", dir);
    EXPECT_EQ(files.size(), 3u);
    for (const auto& f : files) EXPECT_TRUE(fs::exists(f));
}

TEST(Render, CensusTable) {
    const auto dir = scratch("census");
    std::ofstream(dir / "census_vs_size.csv")
        << "mode,coupling,n_q,n_realizations,mean_n_psi,stderr_n_psi,mean_proxy_size\n"
           "oracle,0.5,4,10,1,0,8\noracle,0.5,9,10,6,0.4,90\n";
    const auto files = render_plots(dir / "census_vs_size.csv", dir);
    ASSERT_EQ(files.size(), 1u);
    EXPECT_EQ(files[0].filename(), "census.svg");
}

TEST(Render, Errors) {
    const auto dir = scratch("errors");
    EXPECT_THROW(render_plots(dir / "absent.csv", dir), ValidationError);
    std::ofstream(dir / "bad.jsonl") << "{not json\n";
    EXPECT_THROW(render_plots(dir / "bad.jsonl", dir), ValidationError);
}

TEST(Svg, HeatmapCells) {
    Heatmap map{{0.0, 1.0}, {4.0}, {1.0, -std::numeric_limits<double>::infinity()}};
    const auto svg = heatmap_svg(map, "x", "y");
    EXPECT_NE(svg.find("url(#neg-inf)"), std::string::npos);
    Heatmap bad{{0.0, 1.0}, {4.0}, {1.0}};
    EXPECT_THROW(heatmap_svg(bad, "x", "y"), ValidationError);
    const auto line = line_plot_svg({{"a", {1, 2, 3}, {1, 4, 9}}}, "x", "y");
    EXPECT_NE(line.find("<polyline"), std::string::npos);
}
