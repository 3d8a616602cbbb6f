#pragma once

#include <optional>
#include <vector>

#include "resolvent/bath.hpp"
#include "resolvent/roots.hpp"

namespace resolvent {

/// Two-level emitter of frequency omega0 coupled with strength g to cavity `site`.
struct EmitterSpec {
    double omega0;
    double g;
    Site site;
};

/// Throws invalid_argument unless the site is in the bath, omega0 is finite and g > 0.
void validate_emitter(const SpectralData& s, const EmitterSpec& e);

// Vectors over the emitter plus the bath use the basis order [e, x_0 .. x_{N-1}].

/// |Psi(z)> = (1/g)|e> + G_B(z)|site>, with F(z).
struct DressedStateFunction {
    ComplexEnergy z;
    cplx atomic_amplitude;
    ComplexVector photonic;
    cplx F_value;

    ComplexVector full() const;
};

/// epsilon(z) = g^2 / (z - omega0). PoleError at z = omega0 on the real axis.
cplx self_potential(const EmitterSpec& e, ComplexEnergy z);

/// Sigma(z) = g^2 <site|G_B(z)|site>.
cplx self_energy(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z);

/// F(z) = (z - omega0)/g^2 - <site|G_B(z)|site>.
cplx pole_function_F(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z);

DressedStateFunction dressed_state_function(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z);

/// (N+1) x (N+1) resolvent G_B + |Psi><Psi-bar| / F.
ComplexMatrix dressed_green(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z);

/// <e|G(z)|e> = 1 / (z - omega0 - Sigma(z)).
cplx excitonic_green(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z);

/// Field block: G_B + |psi><psi-bar| / F, the impurity resolvent with epsilon(z).
ComplexMatrix field_green(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z);

struct BoundState {
    double energy;
    cplx atomic_amplitude;  ///< N
    ComplexVector photonic; ///< N g psi(omega_BS)
    double norm_factor;     ///< (1 + g^2 <0|G_B^2|0>)^(-1/2)
    bool is_vds;            ///< photonic amplitude at the atom's cavity below 1e-9
    bool in_band;           ///< energy inside a band (bound state in the continuum)

    ComplexVector full() const;
};

/// Photonic amplitude below this at the atom's cavity marks a vacancy-like state.
inline constexpr double kVdsNodeTolerance = 1e-9;

/// Real roots of F in the gaps of `bands`, plus the in-band VDS at omega0 when
/// <0|G_B(omega0)|0> vanishes under the 0/0 rule. Ascending in energy.
std::vector<BoundState> solve_dressed_bound_states(const SpectralData& s, const EmitterSpec& e,
                                                   const BandStructure& bands, const RootOptions& options = {});

struct ScatteringState {
    double energy;
    std::size_t mode;
    ComplexVector vector; ///< over [e, x...], not normalized
    bool regular;         ///< false when the bare mode is returned untouched
    double residual;      ///< ||(H - omega_k) vector||
};

ScatteringState dressed_scattering_state(const SpectralData& s, const EmitterSpec& e, std::size_t k_index,
                                         double delta);
ScatteringState dressed_scattering_state(const SpectralData& s, const EmitterSpec& e, std::size_t k_index);

enum class VdsKind { none, bound, unbound };

const char* to_string(VdsKind kind);

struct VdsClassification {
    bool is_vds = false;
    VdsKind kind = VdsKind::none;
    /// Photonic part of the stationary state at omega0, unit norm (empty for none).
    ComplexVector witness;
    /// |<site|witness>| before normalization relative to the witness norm.
    double node_amplitude = 0.0;
    /// Bath mode used for the unbound construction.
    std::optional<std::size_t> mode;
};

VdsClassification classify_vds(const SpectralData& s, const EmitterSpec& e, const BandStructure& bands);
VdsClassification classify_vds(const SpectralData& s, const EmitterSpec& e);

/// (H - omega) v for the emitter plus bath Hamiltonian, without forming H.
ComplexVector apply_shifted_hamiltonian(const SpectralData& s, const EmitterSpec& e, double omega,
                                        const ComplexVector& v);

} // namespace resolvent
