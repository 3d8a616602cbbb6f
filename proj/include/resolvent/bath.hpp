#pragma once

#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

#include "resolvent/types.hpp"

namespace resolvent {

/// Directed storage of one Hermitian hopping pair: J at (from, to), conj(J) at (to, from).
struct Hopping {
    Site from;
    Site to;
    cplx amplitude;
};

/// Photonic bath: cavity frequencies plus Hermitian hopping edges.
///
/// Construction validates the edge list (indices in range, no self-loops, at most one
/// edge per unordered pair), so every BathSpec in circulation is a valid Hamiltonian.
class BathSpec {
public:
    BathSpec(std::vector<double> frequencies, std::vector<Hopping> hoppings);

    std::size_t n_sites() const { return frequencies_.size(); }
    const std::vector<double>& frequencies() const { return frequencies_; }
    const std::vector<Hopping>& hoppings() const { return hoppings_; }

    /// Dense H_B.
    ComplexMatrix matrix() const;

    /// Same Hamiltonian (entrywise), regardless of edge order or orientation.
    bool operator==(const BathSpec& other) const;

private:
    std::vector<double> frequencies_;
    std::vector<Hopping> hoppings_;
};

BathSpec build_uniform_chain(std::size_t n, double omega_c, double j);

/// Two sites per cell: j1 inside a cell, j2 between neighbouring cells.
BathSpec build_ssh_chain(std::size_t n_cells, double omega_c, double j1, double j2);

/// Parses a bath-spec document (YAML or JSON): keys `n_sites`, `frequencies`
/// (list or scalar broadcast) and `hoppings` ([x, x', re, im] quadruples).
/// Throws ParseError naming the offending line.
BathSpec load_bath_spec(std::string_view text, std::string_view source_name = {});

/// Eigenpairs of H_B. Immutable; the engine behind every Green-function evaluation.
class SpectralData {
public:
    const RealVector& eigenvalues() const { return eigenvalues_; }
    /// Column k holds <x|k>.
    const ComplexMatrix& eigenvectors() const { return eigenvectors_; }
    const BathSpec& source() const { return source_; }

    std::size_t n_sites() const { return source_.n_sites(); }
    std::size_t n_modes() const { return static_cast<std::size_t>(eigenvalues_.size()); }
    double min_energy() const { return eigenvalues_(0); }
    double max_energy() const { return eigenvalues_(eigenvalues_.size() - 1); }
    double spectral_width() const { return max_energy() - min_energy(); }

    double unitarity_residual() const;
    double reconstruction_residual() const;

private:
    friend SpectralData diagonalize_bath(const BathSpec& spec);
    SpectralData(RealVector values, ComplexMatrix vectors, BathSpec source);

    RealVector eigenvalues_;
    ComplexMatrix eigenvectors_;
    BathSpec source_;
};

/// Ascending eigenvalues; each eigenvector's first nonzero component is real-positive.
SpectralData diagonalize_bath(const BathSpec& spec);

/// Default omega^+ regularizer: 1e-8 x spectral width (1e-8 for a flat spectrum).
double default_delta(const SpectralData& s);

struct Interval {
    double lower;
    double upper;

    bool contains(double omega) const { return omega >= lower && omega <= upper; }
    bool contains_open(double omega) const { return omega > lower && omega < upper; }
    bool bounded() const { return std::isfinite(lower) && std::isfinite(upper); }
};

/// Bands are closed intervals spanned by clustered eigenvalues; gaps are the open
/// complement, including the two semi-infinite tails.
///
/// Finite lattices have no true continua: clustering is a heuristic controlled by
/// gap_factor (a spacing larger than gap_factor x median spacing opens a gap).
struct BandStructure {
    std::vector<Interval> bands;
    std::vector<Interval> gaps;

    bool in_gap(double omega) const;
    bool in_band(double omega) const;
    /// Gap whose open interval contains omega, or nullptr.
    const Interval* gap_containing(double omega) const;
};

inline constexpr double kDefaultGapFactor = 5.0;

BandStructure detect_bands(const SpectralData& s, double gap_factor = kDefaultGapFactor);

/// Modes closer than this to a real z are treated as sitting on the pole.
inline constexpr double kPoleTolerance = 1e-12;
/// A coinciding mode is dropped (0/0) when its summed numerator is below this.
inline constexpr double kNodeTolerance = 1e-12;

/// <x|G_B(z)|x'> = sum_k <x|k><k|x'> / (z - omega_k).
cplx bath_green_element(const SpectralData& s, ComplexEnergy z, Site x, Site x_prime);

/// <x|G_B(z)^2|x'> = sum_k <x|k><k|x'> / (z - omega_k)^2.
cplx bath_green_squared_element(const SpectralData& s, ComplexEnergy z, Site x, Site x_prime);

/// Dense G_B(z) (or G_B(z)^2 for power = 2).
ComplexMatrix bath_green_matrix(const SpectralData& s, ComplexEnergy z, int power = 1);

/// G_B(z)|x> as a vector over sites.
ComplexVector bath_green_column(const SpectralData& s, ComplexEnergy z, Site x);

/// <x|G_B(z) as a vector over sites (the row; differs from the column for complex hoppings).
ComplexVector bath_green_row(const SpectralData& s, ComplexEnergy z, Site x);

/// M x M block <x_i|G_B(z)^power|x_j>.
ComplexMatrix bath_green_block(const SpectralData& s, ComplexEnergy z, const std::vector<Site>& sites,
                               int power = 1);

/// Infinite uniform chain: y^|d| / (j (1/y - y)), y the root of j y^2 - (z - omega_c) y + j = 0
/// inside the unit circle. Throws BranchError for real z in [omega_c - 2|j|, omega_c + 2|j|].
cplx analytic_chain_green(ComplexEnergy z, double omega_c, double j, long d);

} // namespace resolvent
