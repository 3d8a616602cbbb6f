#pragma once

#include <optional>
#include <vector>

#include "resolvent/bath.hpp"
#include "resolvent/dressed.hpp"
#include "resolvent/roots.hpp"

namespace resolvent {

/// M identical emitters (shared omega0 and g) on distinct cavities.
///
/// Vectors over emitters plus bath use the basis order [e_1 .. e_M, x_0 .. x_{N-1}].
class EmitterArraySpec {
public:
    EmitterArraySpec(double omega0, double g, std::vector<Site> sites);
    /// All entries must share omega0 and g.
    static EmitterArraySpec from_emitters(const std::vector<EmitterSpec>& emitters);

    double omega0() const { return omega0_; }
    double g() const { return g_; }
    const std::vector<Site>& sites() const { return sites_; }
    std::size_t size() const { return sites_.size(); }
    EmitterSpec emitter(std::size_t i) const { return {omega0_, g_, sites_.at(i)}; }

    /// Throws invalid_argument when a site lies outside the bath.
    void validate(const SpectralData& s) const;

private:
    double omega0_;
    double g_;
    std::vector<Site> sites_;
};

/// F_ij(z) = (z - omega0)/g^2 delta_ij - <x_i|G_B(z)|x_j>.
struct FMatrix {
    ComplexEnergy z;
    ComplexMatrix entries;
    // Two-emitter scalars (zero unless M = 2).
    cplx asymmetry{0.0};      ///< A = (g^2/2)(F22 - F11)
    cplx splitting{0.0};      ///< delta = sqrt(g^4 F12 F21 + A^2)
    cplx shifted_center{0.0}; ///< omega0 + (g^2/2)(G_11 + G_22)
};

FMatrix f_matrix(const SpectralData& s, const EmitterArraySpec& arr, ComplexEnergy z);

struct MultiGreen {
    ComplexMatrix matrix; ///< (M+N) x (M+N)
    double condition_number;
};

/// G_B + sum_ij (F^-1)_ij |Psi_i><Psi-bar_j|. PoleError when F is singular.
MultiGreen multi_green(const SpectralData& s, const EmitterArraySpec& arr, ComplexEnergy z);

/// Same assembly from a caller-supplied F (lets the oracle inject a corrupted F).
MultiGreen assemble_multi_green(const SpectralData& s, const EmitterArraySpec& arr, ComplexEnergy z,
                                const ComplexMatrix& f_entries);

struct SeriesReport {
    ComplexMatrix matrix;       ///< G from the series truncated at `orders`
    int orders;
    double spectral_radius;     ///< of g^2 gamma_e gamma^B
    bool convergent;            ///< spectral_radius < 1
    /// max |G_k - closed form| for k = 1..orders (empty if the closed form is at a pole).
    std::vector<double> order_residuals;
};

/// T-matrix expansion G = G_0 + G_0 T G_0 with T = V + V G_0 V + ..., truncated
/// after k_max powers of V. Never throws on divergence; reports it instead.
SeriesReport t_matrix_series_green(const SpectralData& s, const EmitterArraySpec& arr, ComplexEnergy z, int k_max);

struct PoleState {
    double energy;
    ComplexVector state;    ///< normalized residue state over [e_1.., x_0..]
    ComplexMatrix residue;  ///< residue of F^-1, M x M
};

/// Real roots of det F in the gaps of `bands`: each eigenvalue branch of F(omega)
/// rises monotonically, so every branch is bisected separately. Ascending.
std::vector<PoleState> solve_multi_poles(const SpectralData& s, const EmitterArraySpec& arr,
                                         const BandStructure& bands, const RootOptions& options = {});

struct TwoAtomPoles {
    std::vector<PoleState> poles;      ///< every in-gap pole, ascending
    std::optional<double> omega_minus; ///< lower of the two poles closest to omega0
    std::optional<double> omega_plus;
    std::vector<ComplexVector> residue_states; ///< states of omega_minus, omega_plus
    /// max over poles of |g^2 adj(F)/beta - null-vector residue|.
    double adjugate_residue_error = 0.0;
};

TwoAtomPoles solve_two_atom_poles(const SpectralData& s, const EmitterArraySpec& arr, const BandStructure& bands,
                                  const RootOptions& options = {});

/// Residue of F^-1 at a two-emitter pole written as g^2 adj(F) / beta.
ComplexMatrix two_atom_adjugate_residue(const SpectralData& s, const EmitterArraySpec& arr, double omega);

/// Gram matrix <Psi_i(omega0)|Psi_j(omega0)>, atomic weight 1/g^2 included.
ComplexMatrix overlap_matrix(const SpectralData& s, const EmitterArraySpec& arr);

/// Weak-coupling pieces of the two-emitter Hamiltonian, evaluated at omega0.
/// Matrices are coefficients over the normalized states |Psi~_i>.
struct TwoEmitterDecomposition {
    double asymmetry;      ///< A_0
    double splitting;      ///< delta_0
    double shifted_center; ///< omega~_0(omega0)
    double beta_plus;
    double beta_minus;
    double lambda_s;
    double lambda_a;
    double big_omega_1;
    double big_omega_2;
    double omega_plus;  ///< omega~_0 + delta_0
    double omega_minus; ///< omega~_0 - delta_0
    ComplexMatrix h_s;
    ComplexMatrix h_a;
    ComplexMatrix residue_route; ///< sum over poles of omega |Psi_BS><Psi_BS| from the reduced residues
    double deviation;            ///< max |h_s + h_a - residue_route|
    bool deviation_flagged;      ///< deviation above 1e-10 (relative to the entries)
    bool used_residue_route;     ///< matrix taken from the residue route (beta near zero or deviation flagged)
};

struct EffectiveHamiltonian {
    std::vector<ComplexVector> basis;  ///< normalized |Psi~_i(omega0)>
    ComplexMatrix matrix;
    RealVector eigenvalues;
    RealVector single_emitter_energies; ///< omega0 + g^2 <x_i|G_B(omega0)|x_i>
    RealVector norms_squared;           ///< <Psi_i|Psi_i>
    ComplexMatrix f_at_omega0;
    double gap_detuning;           ///< distance from omega0 to the nearest band edge
    double approximation_quality;  ///< max |omega_BS^(i) - omega0| / gap_detuning
    RealVector spectral_route_energies; ///< omega0 + g^2 eig(gamma^B(omega0))
    double route_agreement;             ///< max |eigenvalues - spectral_route_energies|
    std::optional<TwoEmitterDecomposition> decomposition;
};

/// H_s + H_a for two emitters; falls back to the residue route when beta degenerates
/// or the assembly deviates from it.
/// RegimeError unless omega0 lies in a gap.
EffectiveHamiltonian effective_hamiltonian_two(const SpectralData& s, const EmitterArraySpec& arr,
                                               const BandStructure& bands);
EffectiveHamiltonian effective_hamiltonian_two(const SpectralData& s, const EmitterArraySpec& arr);

/// omega0 + g^2 gamma^B(omega0) over the normalized single-emitter states.
EffectiveHamiltonian effective_hamiltonian_many(const SpectralData& s, const EmitterArraySpec& arr,
                                                const BandStructure& bands);
EffectiveHamiltonian effective_hamiltonian_many(const SpectralData& s, const EmitterArraySpec& arr);

/// effective_hamiltonian_many over a list of couplings, evaluated in parallel.
std::vector<EffectiveHamiltonian> effective_hamiltonian_sweep(const SpectralData& s, double omega0,
                                                              const std::vector<Site>& sites,
                                                              const std::vector<double>& couplings,
                                                              const BandStructure& bands);

} // namespace resolvent
