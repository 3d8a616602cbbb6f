#include "resolvent/dressed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "resolvent/errors.hpp"
#include "resolvent/impurity.hpp"

namespace resolvent {
namespace {

ComplexVector stack(cplx atomic, const ComplexVector& photonic)
{
    ComplexVector v(photonic.size() + 1);
    v(0) = atomic;
    v.tail(photonic.size()) = photonic;
    return v;
}

} // namespace

void validate_emitter(const SpectralData& s, const EmitterSpec& e)
{
    if (e.site >= s.n_sites()) {
        throw std::invalid_argument("emitter site " + std::to_string(e.site) + " outside bath of " +
                                    std::to_string(s.n_sites()) + " sites");
    }
    if (!std::isfinite(e.omega0)) {
        throw std::invalid_argument("omega0 must be finite");
    }
    if (!(e.g > 0.0) || !std::isfinite(e.g)) {
        throw std::invalid_argument("coupling g must be positive and finite");
    }
}

ComplexVector DressedStateFunction::full() const { return stack(atomic_amplitude, photonic); }

ComplexVector BoundState::full() const { return stack(atomic_amplitude, photonic); }

cplx self_potential(const EmitterSpec& e, ComplexEnergy z)
{
    const cplx detuning = z.value() - e.omega0;
    if (detuning == 0.0) {
        throw PoleError("self-potential evaluated at z = omega0");
    }
    return e.g * e.g / detuning;
}

cplx self_energy(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z)
{
    if (e.g == 0.0) {
        return 0.0;
    }
    return e.g * e.g * bath_green_element(s, z, e.site, e.site);
}

cplx pole_function_F(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z)
{
    validate_emitter(s, e);
    return (z.value() - e.omega0) / (e.g * e.g) - bath_green_element(s, z, e.site, e.site);
}

DressedStateFunction dressed_state_function(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z)
{
    validate_emitter(s, e);
    ComplexVector psi = bath_green_column(s, z, e.site);
    const cplx f = (z.value() - e.omega0) / (e.g * e.g) - psi(static_cast<Eigen::Index>(e.site));
    return {z, 1.0 / e.g, std::move(psi), f};
}

ComplexMatrix dressed_green(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z)
{
    validate_emitter(s, e);
    const auto n = static_cast<Eigen::Index>(s.n_sites());
    const auto i = static_cast<Eigen::Index>(e.site);
    const ComplexMatrix gb = bath_green_matrix(s, z);
    const cplx f = (z.value() - e.omega0) / (e.g * e.g) - gb(i, i);
    if (std::abs(f) < kPoleFunctionTolerance) {
        std::ostringstream msg;
        msg << "dressed resolvent at its pole: |F(z)| = " << std::abs(f);
        throw PoleError(msg.str());
    }
    const ComplexVector ket = stack(1.0 / e.g, gb.col(i));
    const ComplexVector bra = stack(1.0 / e.g, gb.row(i).transpose());
    ComplexMatrix g = ket * bra.transpose() / f;
    g.bottomRightCorner(n, n) += gb;
    return g;
}

cplx excitonic_green(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z)
{
    validate_emitter(s, e);
    const cplx denominator = z.value() - e.omega0 - self_energy(s, e, z);
    if (std::abs(denominator) < kPoleFunctionTolerance * e.g * e.g) {
        throw PoleError("excitonic resolvent at its pole");
    }
    return 1.0 / denominator;
}

ComplexMatrix field_green(const SpectralData& s, const EmitterSpec& e, ComplexEnergy z)
{
    validate_emitter(s, e);
    const auto i = static_cast<Eigen::Index>(e.site);
    ComplexMatrix g = bath_green_matrix(s, z);
    const cplx f = (z.value() - e.omega0) / (e.g * e.g) - g(i, i);
    if (std::abs(f) < kPoleFunctionTolerance) {
        throw PoleError("field resolvent at a pole of F");
    }
    const ComplexVector ket = g.col(i);
    const ComplexVector bra = g.row(i).transpose();
    g.noalias() += ket * bra.transpose() / f;
    return g;
}

ComplexVector apply_shifted_hamiltonian(const SpectralData& s, const EmitterSpec& e, double omega,
                                        const ComplexVector& v)
{
    const auto n = static_cast<Eigen::Index>(s.n_sites());
    const auto i = static_cast<Eigen::Index>(e.site);
    const BathSpec& bath = s.source();
    ComplexVector out(n + 1);
    out(0) = (e.omega0 - omega) * v(0) + e.g * v(1 + i);
    for (Eigen::Index x = 0; x < n; ++x) {
        out(1 + x) = (bath.frequencies()[static_cast<std::size_t>(x)] - omega) * v(1 + x);
    }
    for (const Hopping& h : bath.hoppings()) {
        const auto a = static_cast<Eigen::Index>(h.from);
        const auto b = static_cast<Eigen::Index>(h.to);
        out(1 + a) += h.amplitude * v(1 + b);
        out(1 + b) += std::conj(h.amplitude) * v(1 + a);
    }
    out(1 + i) += e.g * v(0);
    return out;
}

std::vector<BoundState> solve_dressed_bound_states(const SpectralData& s, const EmitterSpec& e,
                                                   const BandStructure& bands, const RootOptions& options)
{
    validate_emitter(s, e);
    const auto site = static_cast<Eigen::Index>(e.site);
    const auto make_state = [&](double energy, bool in_band) {
        const ComplexVector psi = bath_green_column(s, energy, e.site);
        const double g2 = bath_green_squared_element(s, energy, e.site, e.site).real();
        const double norm = 1.0 / std::sqrt(1.0 + e.g * e.g * g2);
        ComplexVector photonic = norm * e.g * psi;
        const bool vds = std::abs(photonic(site)) < kVdsNodeTolerance;
        return BoundState{energy, norm, std::move(photonic), norm, vds, in_band};
    };

    // Roots obey |omega - omega0| <= g^2 / dist(omega, spectrum), so they stay within
    // g (plus a margin) of the interval spanned by omega0 and the spectrum.
    const double lower = std::min(e.omega0, s.min_energy()) - e.g - 1.0;
    const double upper = std::max(e.omega0, s.max_energy()) + e.g + 1.0;
    const auto f = [&](double w) { return pole_function_F(s, e, w).real(); };

    std::vector<BoundState> out;
    for (const SearchInterval& iv : gap_search_intervals(bands, lower, upper)) {
        if (const auto root = find_increasing_root(f, iv, options)) {
            out.push_back(make_state(*root, false));
        }
    }

    if (bands.in_band(e.omega0)) {
        try {
            const cplx g00 = bath_green_element(s, e.omega0, e.site, e.site);
            if (std::abs(g00) < 1e-10) {
                out.push_back(make_state(e.omega0, true));
            }
        } catch (const PoleError&) {
            // genuine resonance with a mode that touches the atom: no stationary state
        }
    }
    std::sort(out.begin(), out.end(), [](const BoundState& a, const BoundState& b) { return a.energy < b.energy; });
    return out;
}

ScatteringState dressed_scattering_state(const SpectralData& s, const EmitterSpec& e, std::size_t k_index,
                                         double delta)
{
    validate_emitter(s, e);
    if (k_index >= s.n_modes()) {
        throw std::out_of_range("mode index " + std::to_string(k_index) + " out of range");
    }
    const auto k = static_cast<Eigen::Index>(k_index);
    const double omega = s.eigenvalues()(k);
    const ComplexVector bare = stack(0.0, s.eigenvectors().col(k));
    const cplx overlap = s.eigenvectors()(static_cast<Eigen::Index>(e.site), k);

    ScatteringState out{omega, k_index, bare, false, 0.0};
    if (std::abs(overlap) >= kModeNodeTolerance) {
        const DressedStateFunction psi = dressed_state_function(s, e, above_axis(omega, delta));
        if (std::abs(psi.F_value) >= 1e-10) {
            out.vector = bare + (overlap / psi.F_value) * psi.full();
            out.regular = true;
        }
    }
    out.residual = apply_shifted_hamiltonian(s, e, omega, out.vector).norm();
    return out;
}

ScatteringState dressed_scattering_state(const SpectralData& s, const EmitterSpec& e, std::size_t k_index)
{
    return dressed_scattering_state(s, e, k_index, default_delta(s));
}

const char* to_string(VdsKind kind)
{
    switch (kind) {
    case VdsKind::bound:
        return "bound";
    case VdsKind::unbound:
        return "unbound";
    case VdsKind::none:
        break;
    }
    return "none";
}

VdsClassification classify_vds(const SpectralData& s, const EmitterSpec& e, const BandStructure& bands)
{
    validate_emitter(s, e);
    const auto site = static_cast<Eigen::Index>(e.site);
    VdsClassification out;

    cplx g00;
    ComplexVector psi;
    try {
        psi = bath_green_column(s, e.omega0, e.site);
        g00 = psi(site);
    } catch (const PoleError&) {
        return out; // omega0 resonant with a mode that touches the atom
    }

    if (std::abs(g00) < 1e-10 && psi.norm() > 0.0) {
        out.kind = VdsKind::bound;
        out.node_amplitude = std::abs(g00) / psi.norm();
        out.witness = psi / psi.norm();
        out.is_vds = out.node_amplitude < kVdsNodeTolerance;
        return out;
    }
    if (!bands.in_band(e.omega0)) {
        return out;
    }

    // omega0 inside a band: the scattering state of the nearest mode evaluated at
    // omega0 always has a node at the atom.
    const RealVector& omega = s.eigenvalues();
    Eigen::Index k0 = 0;
    (omega.array() - e.omega0).abs().minCoeff(&k0);
    const ComplexVector mode = s.eigenvectors().col(k0);
    ComplexVector photonic = mode - (mode(site) / g00) * psi;
    const double norm = photonic.norm();
    if (norm == 0.0) {
        return out;
    }
    out.kind = VdsKind::unbound;
    out.mode = static_cast<std::size_t>(k0);
    out.node_amplitude = std::abs(photonic(site)) / norm;
    out.witness = photonic / norm;
    out.is_vds = out.node_amplitude < kVdsNodeTolerance;
    return out;
}

VdsClassification classify_vds(const SpectralData& s, const EmitterSpec& e)
{
    return classify_vds(s, e, detect_bands(s));
}

} // namespace resolvent
