#pragma once

#include <limits>
#include <vector>

#include "resolvent/bath.hpp"
#include "resolvent/roots.hpp"

namespace resolvent {

/// Strength standing for an infinite contact potential (the cavity becomes a vacancy).
inline constexpr double kVacancy = std::numeric_limits<double>::infinity();

/// Static contact potential epsilon |site><site|.
struct ImpuritySpec {
    Site site;
    double strength;

    bool is_vacancy() const { return strength == kVacancy; }
};

/// |f| below this counts as sitting on a pole of the impurity resolvent.
inline constexpr double kPoleFunctionTolerance = 1e-13;
/// |<0|k>| below this marks a node of mode k at the impurity site.
inline constexpr double kModeNodeTolerance = 1e-10;

/// |psi(z)> = G_B(z)|site>, unnormalized.
ComplexVector impurity_state(const SpectralData& s, const ImpuritySpec& spec, ComplexEnergy z);

/// f(z) = 1/epsilon - <0|G_B(z)|0>. Infinite for epsilon = 0.
cplx impurity_pole_function(const SpectralData& s, const ImpuritySpec& spec, ComplexEnergy z);

/// G_B + |psi><psi-bar| / f with the row <0|G_B(z) as bra.
ComplexMatrix impurity_green(const SpectralData& s, const ImpuritySpec& spec, ComplexEnergy z);

struct ImpurityBoundState {
    double energy;
    ComplexVector wavefunction; ///< N psi(omega_BS), unit norm
    double norm_factor;         ///< <0|G_B^2|0>^(-1/2)
    double residue_trace;       ///< trace of the pole residue; 1 for a non-degenerate state
};

/// Real roots of f in the gaps of `bands`, ascending.
std::vector<ImpurityBoundState> solve_impurity_bound_state(const SpectralData& s, const ImpuritySpec& spec,
                                                           const BandStructure& bands,
                                                           const RootOptions& options = {});

/// Lippmann-Schwinger state of bath mode k evaluated at omega_k + i delta.
ComplexVector impurity_scattering_state(const SpectralData& s, const ImpuritySpec& spec, std::size_t k_index,
                                        double delta);
ComplexVector impurity_scattering_state(const SpectralData& s, const ImpuritySpec& spec, std::size_t k_index);

/// epsilon -> infinity limit: G_B - |psi><psi-bar| / <0|G_B|0>.
ComplexMatrix vacancy_green(const SpectralData& s, Site site, ComplexEnergy z);

} // namespace resolvent
