#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvqe/lattice.hpp"

namespace cvqe {

/// Raw computational-basis word; bit q set means spin q is up.
using Bits = std::uint64_t;

inline int popcount(Bits b) noexcept { return std::popcount(b); }

/// n_up - n_down for an n-spin word.
inline int total_spin(Bits b, int n_sites) noexcept { return 2 * popcount(b) - n_sites; }

/**
 * Basis state of N_Q spins. Bit q = 1 is spin up (sigma^Z = +1), bit q = 0 is
 * spin down. The all-zeros word is the fully polarized reference state.
 * Ordered by integer value of the bit word.
 */
struct SpinConfiguration {
    Bits bits = 0;
    int n_sites = 0;

    static SpinConfiguration all_down(int n) { return {0, n}; }
    static SpinConfiguration all_up(int n) {
        return {n >= 64 ? ~Bits{0} : ((Bits{1} << n) - 1), n};
    }
    /// Parse "1010" with qubit 0 as the rightmost character.
    static SpinConfiguration from_string(const std::string& text);

    bool up(int q) const noexcept { return (bits >> q) & 1u; }
    int n_up() const noexcept { return popcount(bits); }
    int n_down() const noexcept { return n_sites - n_up(); }
    std::string to_string() const;

    friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;
    friend std::strong_ordering operator<=>(const SpinConfiguration& a,
                                            const SpinConfiguration& b) {
        if (auto c = a.n_sites <=> b.n_sites; c != 0) return c;
        return a.bits <=> b.bits;
    }
};

/// One term of H|phi>: amplitude times a basis state.
struct HamiltonianTerm {
    SpinConfiguration config;
    double amplitude = 0.0;
};

/// Couplings with magnitude at or below this count as absent when deciding
/// which basis states the Hamiltonian connects.
inline constexpr double kCouplingZero = 1e-14;

/**
 * Transverse-field Ising Hamiltonian
 *     H = B sum_i Z_i + sum_<ij> J_ij X_i X_j
 * on a lattice, with B > 0 fixing the energy unit. Couplings are stored per
 * lattice edge, in the lattice's edge order.
 */
class IsingModel {
public:
    IsingModel(Lattice lattice, double field_b, std::vector<double> couplings);

    static IsingModel homogeneous(const Lattice& lattice, double j0, double field_b = 1.0);

    /// J_ij ~ Uniform(-delta_j/2, delta_j/2), drawn from Philox stream e for
    /// edge e: J = delta_j * (u - 1/2).
    static IsingModel random_uniform(const Lattice& lattice, double delta_j, std::uint64_t seed,
                                     double field_b = 1.0);

    const Lattice& lattice() const noexcept { return lattice_; }
    int n_sites() const noexcept { return lattice_.n_sites(); }
    double field_b() const noexcept { return field_b_; }
    const std::vector<double>& couplings() const noexcept { return couplings_; }
    double coupling(int i, int j) const;

    /// XOR masks flipping the two spins of each edge, in edge order.
    const std::vector<Bits>& flip_masks() const noexcept { return flip_masks_; }

    std::optional<std::uint64_t> seed() const noexcept { return seed_; }
    std::optional<double> delta_j() const noexcept { return delta_j_; }

    /// H|phi> as 1 + |edges| terms: the diagonal first, then one pair flip per
    /// edge in edge order. Zero-coupling flips are kept.
    std::vector<HamiltonianTerm> apply(const SpinConfiguration& phi) const;

    /// B (n_up - n_down).
    double diagonal_energy(const SpinConfiguration& phi) const;
    double diagonal_energy(Bits bits) const noexcept {
        return field_b_ * static_cast<double>(total_spin(bits, n_sites()));
    }

    /// Same model with every site index mapped through perm.
    IsingModel relabeled(const std::vector<int>& perm) const;

private:
    void check_length(const SpinConfiguration& phi) const;

    Lattice lattice_;
    double field_b_;
    std::vector<double> couplings_;
    std::vector<Bits> flip_masks_;
    std::optional<std::uint64_t> seed_;
    std::optional<double> delta_j_;
};

}  // namespace cvqe
