#include "cvqe/trotter.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>

#include "cvqe/error.hpp"
#include "cvqe/oracle.hpp"

using namespace cvqe;
using cd = std::complex<double>;

namespace {

Lattice pair() { return Lattice::from_edge_list(2, {{0, 1}}); }

std::string code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ValidationError& e) {
        return e.code();
    }
    return "";
}

/// Even sector {|00>, |11>} of the 2-site model as a 2-vector.
using Pair = std::array<cd, 2>;

Pair apply_xx(const Pair& v, double theta) {
    const cd c = std::cos(theta), s = cd(0, -std::sin(theta));
    return {c * v[0] + s * v[1], s * v[0] + c * v[1]};
}

Pair apply_z(const Pair& v, double angle) {
    // exp(-i angle (Z0 + Z1)): |00> has Z sum -2, |11> has +2.
    return {v[0] * std::exp(cd(0, 2 * angle)), v[1] * std::exp(cd(0, -2 * angle))};
}

/// Exact ramp exp(-i int H(t) dt) on the even sector, fine exponential midpoint steps.
Pair exact_ramp(double j, double b, double total, int steps) {
    Pair v{1.0, 0.0};
    const double h = total / steps;
    for (int k = 0; k < steps; ++k) {
        const double t = (k + 0.5) * h;
        const double jt = j * t / total;
        // H = [[-2b, jt], [jt, 2b]]; exp(-i h H) = cos(w h) I - i sin(w h) H / w.
        const double w = std::sqrt(4 * b * b + jt * jt);
        const cd c = std::cos(w * h);
        const cd s = cd(0, -std::sin(w * h) / w);
        v = {c * v[0] + s * (-2 * b * v[0] + jt * v[1]), c * v[1] + s * (jt * v[0] + 2 * b * v[1])};
    }
    return v;
}

}  // namespace

TEST(RampSchedule, Defaults) {
    const RampSchedule s;
    EXPECT_DOUBLE_EQ(s.step(), 0.5);
    EXPECT_EQ(s.n_steps(), 2);
    EXPECT_DOUBLE_EQ(s.total_time(), 1.0);
    EXPECT_DOUBLE_EQ(s.ramp_fraction(2), 0.0);
    EXPECT_DOUBLE_EQ(s.ramp_fraction(1), 0.5);
    EXPECT_DOUBLE_EQ(s.ramp_fraction(0), 1.0);
    EXPECT_DOUBLE_EQ(RampSchedule(0.3, 0).ramp_fraction(0), 1.0);
}

TEST(RampSchedule, FromTotalTime) {
    EXPECT_EQ(RampSchedule::from_total_time(10.0, 0.05).n_steps(), 200);
    EXPECT_EQ(code_of([] { RampSchedule::from_total_time(1.0, 0.3); }), "bad_schedule");
    EXPECT_EQ(code_of([] { RampSchedule(0.0, 2); }), "bad_schedule");
    EXPECT_EQ(code_of([] { RampSchedule(0.5, -1); }), "bad_schedule");
}

TEST(Evolve, ZeroCouplingIsPointMass) {
    const auto m = IsingModel::homogeneous(Lattice::heavy_hex(3, 4), 0.0);
    const auto p = evolve(m, RampSchedule(0.5, 4)).probabilities();
    EXPECT_NEAR(p[0], 1.0, 1e-14);
}

TEST(Evolve, SingleRxxClosedForm) {
    for (double dt : {0.1, 0.5, 1.3}) {
        const auto m = IsingModel::homogeneous(pair(), 1.0);
        const auto p = evolve(m, RampSchedule(dt, 1)).probabilities();
        EXPECT_NEAR(p[3], std::pow(std::sin(dt), 2), 1e-14) << "dt = " << dt;
        EXPECT_NEAR(p[1] + p[2], 0.0, 1e-15);
    }
}

TEST(Evolve, NoStepsAppliesOneFullLayer) {
    const auto m = IsingModel::homogeneous(pair(), 0.7);
    const auto p = evolve(m, RampSchedule(0.4, 0)).probabilities();
    EXPECT_NEAR(p[3], std::pow(std::sin(0.7 * 0.4), 2), 1e-14);
}

TEST(Evolve, MatchesTwoLevelProduct) {
    const double j = -0.8, b = 1.3, dt = 0.37;
    const int n_t = 5;
    const IsingModel m(pair(), b, {j});
    const auto state = evolve(m, RampSchedule(dt, n_t));
    Pair v{1.0, 0.0};
    for (int k = n_t; k >= 0; --k) {
        v = apply_xx(v, j * static_cast<double>(n_t - k) / n_t * dt);
        v = apply_z(v, b * dt);
    }
    EXPECT_NEAR(std::abs(state.amplitudes()[0] - v[0]), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(state.amplitudes()[3] - v[1]), 0.0, 1e-13);
}

TEST(Evolve, NormAndParity) {
    const auto m = IsingModel::random_uniform(Lattice::heavy_hex(5, 4), 2.0, 9);
    const auto state = evolve(m, RampSchedule(0.5, 6));
    EXPECT_NEAR(state.norm_squared(), 1.0, 1e-10);
    const auto p = state.probabilities();
    for (std::size_t s = 0; s < p.size(); ++s) {
        if (popcount(s) % 2 == 1) ASSERT_EQ(p[s], 0.0) << s;
    }
}

TEST(Evolve, TrotterConsistency) {
    const double j = -1.0, b = 1.0, total = 2.0;
    const auto exact = exact_ramp(j, b, total, 20000);
    const double p_exact = std::norm(exact[1]);
    double previous = 1.0;
    for (double dt : {0.2, 0.1, 0.05, 0.025}) {
        const IsingModel m(pair(), b, {j});
        const auto p = evolve(m, RampSchedule::from_total_time(total, dt)).probabilities();
        const double tv = std::abs(p[3] - p_exact);
        EXPECT_LT(tv, 2.0 * dt) << "dt = " << dt;
        EXPECT_LT(tv, previous);
        previous = tv;
    }
}

TEST(Evolve, SlowRampFollowsGroundState) {
    const auto m = IsingModel::homogeneous(Lattice::heavy_hex(3, 4), -0.5);
    ASSERT_EQ(m.n_sites(), 8);
    const auto state = evolve(m, RampSchedule::from_total_time(10.0, 0.05));
    ExactOptions opts;
    opts.min_levels = 1;
    const auto exact = exact_diagonalize(m, 1, opts);
    cd overlap = 0.0;
    for (std::size_t s = 0; s < state.size(); ++s) overlap += exact.ground_vector[s] * state.amplitudes()[s];
    EXPECT_GT(std::norm(overlap), 0.99);
}

TEST(Evolve, QubitLimit) {
    const auto m = IsingModel::homogeneous(Lattice::heavy_hex(5, 5), -0.5);
    EvolveOptions opts;
    opts.statevector_limit = 12;
    EXPECT_THROW(evolve(m, RampSchedule(), opts), RuntimeError);
}

TEST(Sample, PointMass) {
    const StateVector s(5);
    const auto set = sample(s, 1000, 1);
    ASSERT_EQ(set.n_distinct(), 1u);
    EXPECT_EQ(set.entries()[0].count, 1000);
    EXPECT_EQ(set.entries()[0].config.bits, 0u);
    EXPECT_EQ(set.source(), SampleSource::Simulated);
}

TEST(Sample, UniformTwoQubitConcentration) {
    StateVector s(2);
    for (auto& a : s.amplitudes()) a = 0.5;
    const auto set = sample(s, 1'000'000, 77);
    ASSERT_EQ(set.n_distinct(), 4u);
    for (double p : set.probabilities()) EXPECT_NEAR(p, 0.25, 0.01);
}

TEST(Sample, DeterministicPerSeed) {
    const auto m = IsingModel::homogeneous(Lattice::heavy_hex(3, 4), -0.7);
    const auto state = evolve(m, RampSchedule());
    const auto a = sample(state, 5000, 3);
    const auto b = sample(state, 5000, 3);
    const auto c = sample(state, 5000, 4);
    ASSERT_EQ(a.n_distinct(), b.n_distinct());
    for (std::size_t k = 0; k < a.n_distinct(); ++k) {
        EXPECT_EQ(a.entries()[k].config, b.entries()[k].config);
        EXPECT_EQ(a.entries()[k].count, b.entries()[k].count);
    }
    bool differs = a.n_distinct() != c.n_distinct();
    for (std::size_t k = 0; !differs && k < a.n_distinct(); ++k) {
        differs = a.entries()[k].count != c.entries()[k].count;
    }
    EXPECT_TRUE(differs);
    EXPECT_EQ(a.n_shots(), 5000);
    EXPECT_EQ(a.odd_parity_fraction(), 0.0);
}

TEST(Sample, Rejections) {
    EXPECT_EQ(code_of([] { sample(StateVector(2), 0, 1); }), "no_shots");
    StateVector bad(2);
    bad.amplitudes()[0] = 2.0;
    EXPECT_EQ(code_of([&] { sample(bad, 10, 1); }), "not_normalized");
}

TEST(SampleSet, Invariants) {
    const int n = 3;
    EXPECT_EQ(code_of([] { SampleSet(3, {{SpinConfiguration{0, 3}, 0}}, SampleSource::External); }),
              "nonpositive_count");
    EXPECT_EQ(code_of([] {
                  SampleSet(3, {{SpinConfiguration{0, 3}, 1}, {SpinConfiguration{0, 3}, 2}},
                            SampleSource::External);
              }),
              "duplicate_configuration");
    EXPECT_EQ(code_of([] { SampleSet(3, {{SpinConfiguration{0, 2}, 1}}, SampleSource::External); }),
              "length_mismatch");
    EXPECT_EQ(code_of([] { SampleSet(3, {}, SampleSource::External); }), "no_shots");
    const auto merged = SampleSet::from_counts(n, {{5, 2}, {0, 1}, {5, 3}}, SampleSource::External);
    ASSERT_EQ(merged.n_distinct(), 2u);
    EXPECT_EQ(merged.entries()[0].config.bits, 0u);
    EXPECT_EQ(merged.entries()[1].count, 5);
    EXPECT_EQ(merged.n_shots(), 6);
}

TEST(ParseCounts, Example) {
    const auto set = parse_counts(R"({"000": 600, "011": 400})", 3);
    EXPECT_EQ(set.n_shots(), 1000);
    ASSERT_EQ(set.n_distinct(), 2u);
    EXPECT_EQ(set.entries()[1].config.bits, 0b011u);
    EXPECT_EQ(set.source(), SampleSource::External);
}

TEST(ParseCounts, Endianness) {
    const auto big = parse_counts(R"({"001": 1})", 3, Endianness::QubitZeroRightmost);
    const auto little = parse_counts(R"({"001": 1})", 3, Endianness::QubitZeroLeftmost);
    EXPECT_EQ(big.entries()[0].config.bits, 0b001u);
    EXPECT_EQ(little.entries()[0].config.bits, 0b100u);
    EXPECT_EQ(endianness_from_string("little"), Endianness::QubitZeroLeftmost);
    EXPECT_EQ(code_of([] { endianness_from_string("middle"); }), "bad_endianness");
}

TEST(ParseCounts, Errors) {
    try {
        parse_counts(R"({"000": 3, "01": 2})", 3);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.code(), "length_mismatch");
        EXPECT_NE(std::string(e.what()).find("'01'"), std::string::npos);
    }
    EXPECT_EQ(code_of([] { parse_counts("", 3); }), "no_shots");
    EXPECT_EQ(code_of([] { parse_counts("{}", 3); }), "no_shots");
    EXPECT_EQ(code_of([] { parse_counts("[1, 2]", 3); }), "malformed_counts");
    EXPECT_EQ(code_of([] { parse_counts("{\"000\": ", 3); }), "malformed_counts");
    EXPECT_EQ(code_of([] { parse_counts(R"({"000": 1.5})", 3); }), "malformed_counts");
    EXPECT_EQ(code_of([] { parse_counts(R"({"000": 0})", 3); }), "nonpositive_count");
    EXPECT_EQ(code_of([] { parse_counts(R"({"0a0": 1})", 3); }), "bad_bitstring");
}

TEST(ParseCounts, OddParityIsReportedNotRejected) {
    const auto set = parse_counts(R"({"000": 90, "001": 10})", 3);
    EXPECT_DOUBLE_EQ(set.odd_parity_fraction(), 0.1);
}

TEST(IngestCounts, FileRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "cvqe_ingest_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "counts.json";
    std::ofstream(path) << R"({"000": 600, "011": 400})";
    const auto set = ingest_counts(path, 3);
    EXPECT_EQ(set.n_shots(), 1000);
    EXPECT_EQ(set.origin(), "counts.json");
    std::ofstream(dir / "empty.json") << "";
    EXPECT_EQ(code_of([&] { ingest_counts(dir / "empty.json", 3); }), "no_shots");
    EXPECT_EQ(code_of([&] { ingest_counts(dir / "missing.json", 3); }), "missing_file");
}
