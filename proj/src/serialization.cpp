#include "cvqe/serialization.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cvqe/error.hpp"

namespace cvqe {

Json lattice_to_json(const Lattice& lattice, bool with_positions) {
    Json edges = Json::array();
    for (const auto& e : lattice.edges()) edges.push_back({e.first, e.second});
    Json doc{{"n_sites", lattice.n_sites()}, {"edges", edges}, {"kind", to_string(lattice.kind())}};
    if (lattice.kind() != LatticeKind::Explicit) {
        doc["dims"] = {lattice.dims().first, lattice.dims().second};
    }
    if (with_positions && !lattice.positions().empty()) {
        Json pos = Json::array();
        for (const auto& p : lattice.positions()) pos.push_back({p.x, p.y});
        doc["positions"] = pos;
    }
    return doc;
}

Lattice lattice_from_json(const Json& doc) {
    try {
        if (!doc.is_object()) throw ValidationError("malformed_lattice", "lattice must be an object");
        const int n_sites = doc.at("n_sites").get<int>();
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : doc.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw ValidationError("malformed_lattice", "each edge must be a pair [i, j]");
            }
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        const auto kind = lattice_kind_from_string(doc.value("kind", std::string("explicit")));
        if (kind != LatticeKind::Explicit && doc.contains("dims")) {
            const auto& dims = doc.at("dims");
            Lattice generated = kind == LatticeKind::HeavyHex
                                    ? Lattice::heavy_hex(dims.at(0).get<int>(), dims.at(1).get<int>())
                                    : Lattice::square(dims.at(0).get<int>(), dims.at(1).get<int>());
            if (!(generated == Lattice::from_edge_list(n_sites, edges))) {
                throw ValidationError("lattice_mismatch",
                                      "edge list does not match the generated " + to_string(kind) +
                                          " lattice with the stated dims");
            }
            return generated;
        }
        Lattice lattice = Lattice::from_edge_list(n_sites, edges);
        if (kind == LatticeKind::HeavyHex && lattice.max_degree() > 3) {
            throw ValidationError("degree", "heavy-hex lattice has a site of degree > 3");
        }
        return lattice;
    } catch (const Json::exception& e) {
        throw ValidationError("malformed_lattice", std::string("malformed lattice JSON: ") + e.what());
    }
}

Json model_to_json(const IsingModel& model) {
    Json couplings = Json::array();
    const auto& edges = model.lattice().edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        couplings.push_back({edges[e].first, edges[e].second, model.couplings()[e]});
    }
    Json doc{{"field_b", model.field_b()},
             {"lattice", lattice_to_json(model.lattice())},
             {"couplings", couplings}};
    if (model.seed()) doc["seed"] = *model.seed();
    if (model.delta_j()) doc["delta_j"] = *model.delta_j();
    return doc;
}

IsingModel model_from_json(const Json& doc) {
    try {
        Lattice lattice = lattice_from_json(doc.at("lattice"));
        std::map<Edge, double> by_edge;
        for (const auto& c : doc.at("couplings")) {
            if (!c.is_array() || c.size() != 3) {
                throw ValidationError("malformed_model", "each coupling must be [i, j, J]");
            }
            const int a = c[0].get<int>();
            const int b = c[1].get<int>();
            const Edge key{std::min(a, b), std::max(a, b)};
            if (!by_edge.emplace(key, c[2].get<double>()).second) {
                throw ValidationError("malformed_model", "coupling listed twice for an edge");
            }
        }
        std::vector<double> j;
        for (const auto& e : lattice.edges()) {
            const auto it = by_edge.find(e);
            if (it == by_edge.end()) {
                throw ValidationError("coupling_count",
                                      "missing coupling for edge (" + std::to_string(e.first) +
                                          ", " + std::to_string(e.second) + ")");
            }
            j.push_back(it->second);
        }
        if (j.size() != by_edge.size()) {
            throw ValidationError("coupling_count", "coupling given for a non-edge");
        }
        return IsingModel(std::move(lattice), doc.value("field_b", 1.0), std::move(j));
    } catch (const Json::exception& e) {
        throw ValidationError("malformed_model", std::string("malformed model JSON: ") + e.what());
    }
}

Json solution_to_json(const SubspaceSolution& solution, const Subspace& subspace) {
    const auto census = significant_state_census(solution, subspace);
    Json bins = Json::object();
    for (const auto& [spin, p] : census.spin_bins) bins[std::to_string(spin)] = p;
    return Json{{"energy", solution.energy},
                {"lambda", subspace.lambda},
                {"basis_size", subspace.size()},
                {"n_psi", census.n_psi},
                {"s_z", average_spin(solution, subspace)},
                {"spin_bins", bins},
                {"converged", solution.converged},
                {"degenerate", solution.degenerate}};
}

Json info_to_json(const InfoReport& report) {
    Json doc{{"shot_entropy", report.shot_entropy},
             {"max_shot_entropy", report.max_shot_entropy},
             {"info_gained", report.info_gained},
             {"dist_entropy", report.dist_entropy},
             {"info_used", report.info_used},
             {"k_factor", report.k_factor},
             {"ratio_defined", report.ratio.defined()}};
    doc["ratio"] = report.ratio.defined() ? Json(*report.ratio.value) : Json(nullptr);
    return doc;
}

Json samples_to_json(const SampleSet& samples) {
    Json counts = Json::object();
    for (const auto& e : samples.entries()) counts[e.config.to_string()] = e.count;
    return Json{{"n_qubits", samples.n_qubits()},
                {"n_shots", samples.n_shots()},
                {"n_distinct", samples.n_distinct()},
                {"source", samples.source() == SampleSource::Simulated ? "simulated" : "external"},
                {"origin", samples.origin()},
                {"odd_parity_fraction", samples.odd_parity_fraction()},
                {"counts", counts}};
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("missing_file", "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("malformed_json", path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeError("cannot write " + path.string());
    out << text;
    if (!out) throw RuntimeError("failed writing " + path.string());
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

}  // namespace cvqe
