#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cvqe {

/// Sites are encoded as bits of a 64-bit word, which bounds every lattice.
inline constexpr int kMaxSites = 64;

enum class LatticeKind { HeavyHex, Square, Explicit };

std::string to_string(LatticeKind kind);
LatticeKind lattice_kind_from_string(const std::string& name);

/// Undirected edge with first < second.
struct Edge {
    int first = 0;
    int second = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Integer grid position of a site, used for coordinate export and plotting.
struct SitePosition {
    int x = 0;
    int y = 0;

    friend bool operator==(const SitePosition&, const SitePosition&) = default;
};

/**
 * Connected spin lattice: a site count plus a sorted, duplicate-free edge list.
 *
 * Heavy-hex fragments are laid out on an integer grid of `n_x` columns and
 * `n_y` rows. Even rows are full lines of `n_x` sites joined horizontally.
 * Odd rows only hold bridge sites, one every four columns, linking the site
 * directly below to the site directly above (when that row exists). Bridge
 * columns start at x = 0 on row 1 and alternate with x = 2 on the next odd
 * row, which closes hexagonal cells of twelve sites. A bridge on the last row
 * has no row above it and dangles with degree one. Sites are numbered in
 * row-major order (y first, then x).
 *
 * With this truncation the square fragments n = 5..10 contain
 * 18, 23, 34, 40, 55 and 63 sites.
 */
class Lattice {
public:
    static Lattice heavy_hex(int n_x, int n_y);
    static Lattice square(int l_x, int l_y);
    static Lattice from_edge_list(int n_sites, const std::vector<std::pair<int, int>>& edges);

    int n_sites() const noexcept { return n_sites_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t n_edges() const noexcept { return edges_.size(); }
    LatticeKind kind() const noexcept { return kind_; }

    /// Layer counts for HeavyHex/Square, {0, 0} for Explicit.
    std::pair<int, int> dims() const noexcept { return dims_; }

    /// Grid positions; empty for Explicit lattices.
    const std::vector<SitePosition>& positions() const noexcept { return positions_; }

    std::vector<int> degrees() const;
    int max_degree() const;

    /// Bridge sites of a heavy-hex fragment (odd rows). Always false otherwise.
    bool is_bridge(int site) const;

    /// Relabel sites: new index of old site i is perm[i].
    Lattice relabeled(const std::vector<int>& perm) const;

    friend bool operator==(const Lattice& a, const Lattice& b) {
        return a.n_sites_ == b.n_sites_ && a.edges_ == b.edges_;
    }

private:
    Lattice(int n_sites, std::vector<Edge> edges, LatticeKind kind, std::pair<int, int> dims,
            std::vector<SitePosition> positions);

    int n_sites_ = 0;
    std::vector<Edge> edges_;
    LatticeKind kind_ = LatticeKind::Explicit;
    std::pair<int, int> dims_{0, 0};
    std::vector<SitePosition> positions_;
};

}  // namespace cvqe
