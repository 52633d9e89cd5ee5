#include "cvqe/lattice.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <string>

#include "cvqe/error.hpp"

namespace cvqe {

namespace {

void require_site_budget(long long n_sites) {
    if (n_sites < 1) {
        throw ValidationError("empty_lattice", "lattice must contain at least one site");
    }
    if (n_sites > kMaxSites) {
        throw ValidationError("too_many_sites", "lattice has " + std::to_string(n_sites) +
                                                    " sites; at most " + std::to_string(kMaxSites) +
                                                    " are supported");
    }
}

bool is_connected(int n_sites, const std::vector<Edge>& edges) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_sites));
    for (const auto& e : edges) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    std::vector<char> seen(static_cast<std::size_t>(n_sites), 0);
    std::queue<int> todo;
    todo.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!todo.empty()) {
        const int v = todo.front();
        todo.pop();
        for (int w : adj[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                todo.push(w);
            }
        }
    }
    return reached == n_sites;
}

std::vector<Edge> normalize_edges(int n_sites, const std::vector<std::pair<int, int>>& raw) {
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (const auto& [a, b] : raw) {
        if (a < 0 || b < 0 || a >= n_sites || b >= n_sites) {
            throw ValidationError("index_out_of_range",
                                  "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                      ") references a site outside [0, " +
                                      std::to_string(n_sites) + ")");
        }
        if (a == b) {
            throw ValidationError("self_loop", "edge (" + std::to_string(a) + ", " +
                                                   std::to_string(b) + ") is a self-loop");
        }
        edges.push_back(Edge{std::min(a, b), std::max(a, b)});
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

}  // namespace

std::string to_string(LatticeKind kind) {
    switch (kind) {
        case LatticeKind::HeavyHex: return "heavy_hex";
        case LatticeKind::Square: return "square";
        case LatticeKind::Explicit: return "explicit";
    }
    return "explicit";
}

LatticeKind lattice_kind_from_string(const std::string& name) {
    if (name == "heavy_hex" || name == "heavy-hex") return LatticeKind::HeavyHex;
    if (name == "square") return LatticeKind::Square;
    if (name == "explicit") return LatticeKind::Explicit;
    throw ValidationError("unknown_lattice_kind", "unknown lattice kind '" + name + "'");
}

Lattice::Lattice(int n_sites, std::vector<Edge> edges, LatticeKind kind, std::pair<int, int> dims,
                 std::vector<SitePosition> positions)
    : n_sites_(n_sites),
      edges_(std::move(edges)),
      kind_(kind),
      dims_(dims),
      positions_(std::move(positions)) {}

Lattice Lattice::heavy_hex(int n_x, int n_y) {
    if (n_x < 2 || n_y < 2) {
        throw ValidationError("too_small", "heavy-hex fragment needs n_x >= 2 and n_y >= 2, got (" +
                                               std::to_string(n_x) + ", " + std::to_string(n_y) +
                                               ")");
    }
    if (n_x > 4 * kMaxSites || n_y > 4 * kMaxSites) {
        throw ValidationError("too_many_sites", "heavy-hex layer counts are far too large");
    }

    // Bridge rows alternate their column offset: 0 on row 1, 2 on row 3, ...
    auto occupied = [n_x](int x, int y) {
        if (x < 0 || x >= n_x) return false;
        if (y % 2 == 0) return true;
        const int offset = ((y / 2) % 2 == 0) ? 0 : 2;
        return (x - offset) % 4 == 0 && x >= offset;
    };

    std::map<std::pair<int, int>, int> index;  // (y, x) -> site
    std::vector<SitePosition> positions;
    for (int y = 0; y < n_y; ++y) {
        for (int x = 0; x < n_x; ++x) {
            if (occupied(x, y)) {
                index[{y, x}] = static_cast<int>(positions.size());
                positions.push_back({x, y});
            }
        }
    }
    require_site_budget(static_cast<long long>(positions.size()));

    std::vector<std::pair<int, int>> raw;
    for (const auto& [yx, site] : index) {
        const auto [y, x] = yx;
        if (y % 2 == 0) {
            if (auto it = index.find({y, x + 1}); it != index.end()) raw.emplace_back(site, it->second);
        } else {
            if (auto it = index.find({y - 1, x}); it != index.end()) raw.emplace_back(site, it->second);
            if (auto it = index.find({y + 1, x}); it != index.end()) raw.emplace_back(site, it->second);
        }
    }
    const int n_sites = static_cast<int>(positions.size());
    auto edges = normalize_edges(n_sites, raw);
    if (!is_connected(n_sites, edges)) {
        throw ValidationError("disconnected",
                              "heavy-hex fragment (" + std::to_string(n_x) + ", " +
                                  std::to_string(n_y) +
                                  ") has a bridge row with no bridge inside the fragment; use "
                                  "n_x >= 3");
    }
    return Lattice(n_sites, std::move(edges), LatticeKind::HeavyHex, {n_x, n_y},
                   std::move(positions));
}

Lattice Lattice::square(int l_x, int l_y) {
    if (l_x < 1 || l_y < 1) {
        throw ValidationError("too_small", "square lattice needs l_x >= 1 and l_y >= 1");
    }
    require_site_budget(static_cast<long long>(l_x) * l_y);
    std::vector<SitePosition> positions;
    std::vector<std::pair<int, int>> raw;
    for (int y = 0; y < l_y; ++y) {
        for (int x = 0; x < l_x; ++x) {
            const int site = y * l_x + x;
            positions.push_back({x, y});
            if (x + 1 < l_x) raw.emplace_back(site, site + 1);
            if (y + 1 < l_y) raw.emplace_back(site, site + l_x);
        }
    }
    const int n_sites = l_x * l_y;
    return Lattice(n_sites, normalize_edges(n_sites, raw), LatticeKind::Square, {l_x, l_y},
                   std::move(positions));
}

Lattice Lattice::from_edge_list(int n_sites, const std::vector<std::pair<int, int>>& edges) {
    require_site_budget(n_sites);
    auto normalized = normalize_edges(n_sites, edges);
    if (!is_connected(n_sites, normalized)) {
        throw ValidationError("disconnected", "lattice with " + std::to_string(n_sites) +
                                                  " sites is not connected");
    }
    return Lattice(n_sites, std::move(normalized), LatticeKind::Explicit, {0, 0}, {});
}

std::vector<int> Lattice::degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n_sites_), 0);
    for (const auto& e : edges_) {
        ++deg[e.first];
        ++deg[e.second];
    }
    return deg;
}

int Lattice::max_degree() const {
    const auto deg = degrees();
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

bool Lattice::is_bridge(int site) const {
    return kind_ == LatticeKind::HeavyHex && site >= 0 && site < n_sites_ &&
           positions_[site].y % 2 == 1;
}

Lattice Lattice::relabeled(const std::vector<int>& perm) const {
    if (perm.size() != static_cast<std::size_t>(n_sites_)) {
        throw ValidationError("bad_permutation", "permutation length does not match site count");
    }
    std::vector<int> check(perm);
    std::sort(check.begin(), check.end());
    std::vector<int> iota(perm.size());
    std::iota(iota.begin(), iota.end(), 0);
    if (check != iota) {
        throw ValidationError("bad_permutation", "relabeling is not a permutation");
    }
    std::vector<std::pair<int, int>> raw;
    raw.reserve(edges_.size());
    for (const auto& e : edges_) raw.emplace_back(perm[e.first], perm[e.second]);
    return Lattice(n_sites_, normalize_edges(n_sites_, raw), LatticeKind::Explicit, {0, 0}, {});
}

}  // namespace cvqe
