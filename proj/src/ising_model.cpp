#include "cvqe/ising_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cvqe/error.hpp"
#include "cvqe/rng.hpp"

namespace cvqe {

SpinConfiguration SpinConfiguration::from_string(const std::string& text) {
    if (text.empty() || text.size() > static_cast<std::size_t>(kMaxSites)) {
        throw ValidationError("bad_bitstring", "bitstring '" + text + "' has invalid length");
    }
    SpinConfiguration c{0, static_cast<int>(text.size())};
    for (std::size_t k = 0; k < text.size(); ++k) {
        const char ch = text[text.size() - 1 - k];
        if (ch == '1') {
            c.bits |= Bits{1} << k;
        } else if (ch != '0') {
            throw ValidationError("bad_bitstring", "bitstring '" + text + "' contains '" +
                                                       std::string(1, ch) + "'");
        }
    }
    return c;
}

std::string SpinConfiguration::to_string() const {
    std::string s(static_cast<std::size_t>(n_sites), '0');
    for (int q = 0; q < n_sites; ++q) {
        if (up(q)) s[static_cast<std::size_t>(n_sites - 1 - q)] = '1';
    }
    return s;
}

IsingModel::IsingModel(Lattice lattice, double field_b, std::vector<double> couplings)
    : lattice_(std::move(lattice)), field_b_(field_b), couplings_(std::move(couplings)) {
    if (!(field_b_ > 0.0) || !std::isfinite(field_b_)) {
        throw ValidationError("bad_field", "field B must be positive and finite");
    }
    if (couplings_.size() != lattice_.n_edges()) {
        throw ValidationError("coupling_count", "expected " + std::to_string(lattice_.n_edges()) +
                                                    " couplings, got " +
                                                    std::to_string(couplings_.size()));
    }
    for (double j : couplings_) {
        if (!std::isfinite(j)) throw ValidationError("bad_coupling", "coupling is not finite");
    }
    flip_masks_.reserve(lattice_.n_edges());
    for (const auto& e : lattice_.edges()) {
        flip_masks_.push_back((Bits{1} << e.first) | (Bits{1} << e.second));
    }
}

IsingModel IsingModel::homogeneous(const Lattice& lattice, double j0, double field_b) {
    return IsingModel(lattice, field_b, std::vector<double>(lattice.n_edges(), j0));
}

IsingModel IsingModel::random_uniform(const Lattice& lattice, double delta_j, std::uint64_t seed,
                                      double field_b) {
    if (!(delta_j >= 0.0) || !std::isfinite(delta_j)) {
        throw ValidationError("bad_delta_j", "delta_j must be finite and nonnegative");
    }
    std::vector<double> j(lattice.n_edges());
    for (std::size_t e = 0; e < j.size(); ++e) {
        j[e] = delta_j * (uniform01(seed, e, 0) - 0.5);
    }
    IsingModel model(lattice, field_b, std::move(j));
    model.seed_ = seed;
    model.delta_j_ = delta_j;
    return model;
}

double IsingModel::coupling(int i, int j) const {
    const Edge key{std::min(i, j), std::max(i, j)};
    const auto& edges = lattice_.edges();
    const auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key) {
        throw ValidationError("no_such_edge", "(" + std::to_string(i) + ", " + std::to_string(j) +
                                                  ") is not a lattice edge");
    }
    return couplings_[static_cast<std::size_t>(it - edges.begin())];
}

void IsingModel::check_length(const SpinConfiguration& phi) const {
    if (phi.n_sites != n_sites()) {
        throw ValidationError("length_mismatch",
                              "configuration has " + std::to_string(phi.n_sites) +
                                  " spins, model has " + std::to_string(n_sites()));
    }
}

std::vector<HamiltonianTerm> IsingModel::apply(const SpinConfiguration& phi) const {
    check_length(phi);
    std::vector<HamiltonianTerm> out;
    out.reserve(1 + flip_masks_.size());
    out.push_back({phi, diagonal_energy(phi.bits)});
    for (std::size_t e = 0; e < flip_masks_.size(); ++e) {
        out.push_back({SpinConfiguration{phi.bits ^ flip_masks_[e], phi.n_sites}, couplings_[e]});
    }
    return out;
}

double IsingModel::diagonal_energy(const SpinConfiguration& phi) const {
    check_length(phi);
    return diagonal_energy(phi.bits);
}

IsingModel IsingModel::relabeled(const std::vector<int>& perm) const {
    Lattice mapped = lattice_.relabeled(perm);
    std::map<Edge, double> by_edge;
    const auto& edges = lattice_.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int a = perm[edges[e].first];
        const int b = perm[edges[e].second];
        by_edge[Edge{std::min(a, b), std::max(a, b)}] = couplings_[e];
    }
    std::vector<double> j;
    j.reserve(by_edge.size());
    for (const auto& e : mapped.edges()) j.push_back(by_edge.at(e));
    return IsingModel(std::move(mapped), field_b_, std::move(j));
}

}  // namespace cvqe
