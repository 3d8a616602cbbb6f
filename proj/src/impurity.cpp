#include "resolvent/impurity.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "resolvent/errors.hpp"

namespace resolvent {
namespace {

void check_site(const SpectralData& s, Site site)
{
    if (site >= s.n_sites()) {
        throw std::out_of_range("impurity site " + std::to_string(site) + " outside bath of " +
                                std::to_string(s.n_sites()) + " sites");
    }
}

void check_finite(const ImpuritySpec& spec)
{
    if (spec.is_vacancy()) {
        throw std::invalid_argument("vacancy strength: use vacancy_green for the infinite-potential limit");
    }
    if (!std::isfinite(spec.strength)) {
        throw std::invalid_argument("impurity strength must be finite or kVacancy");
    }
}

} // namespace

ComplexVector impurity_state(const SpectralData& s, const ImpuritySpec& spec, ComplexEnergy z)
{
    check_site(s, spec.site);
    return bath_green_column(s, z, spec.site);
}

cplx impurity_pole_function(const SpectralData& s, const ImpuritySpec& spec, ComplexEnergy z)
{
    check_finite(spec);
    check_site(s, spec.site);
    if (spec.strength == 0.0) {
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    return 1.0 / spec.strength - bath_green_element(s, z, spec.site, spec.site);
}

ComplexMatrix impurity_green(const SpectralData& s, const ImpuritySpec& spec, ComplexEnergy z)
{
    check_finite(spec);
    check_site(s, spec.site);
    ComplexMatrix g = bath_green_matrix(s, z);
    if (spec.strength == 0.0) {
        return g;
    }
    const auto i = static_cast<Eigen::Index>(spec.site);
    const cplx f = 1.0 / spec.strength - g(i, i);
    if (std::abs(f) < kPoleFunctionTolerance) {
        std::ostringstream msg;
        msg << "impurity resolvent at its pole: |f(z)| = " << std::abs(f);
        throw PoleError(msg.str());
    }
    const ComplexVector ket = g.col(i);
    const ComplexVector bra = g.row(i).transpose();
    g.noalias() += ket * bra.transpose() / f;
    return g;
}

std::vector<ImpurityBoundState> solve_impurity_bound_state(const SpectralData& s, const ImpuritySpec& spec,
                                                           const BandStructure& bands, const RootOptions& options)
{
    check_finite(spec);
    check_site(s, spec.site);
    std::vector<ImpurityBoundState> out;
    if (spec.strength == 0.0) {
        return out;
    }
    // |G00(w)| <= 1/dist(w, spectrum), so a root lies within |eps| of the spectrum.
    const double reach = std::abs(spec.strength) + 1.0;
    const auto f = [&](double w) { return impurity_pole_function(s, spec, w).real(); };
    for (const SearchInterval& iv : gap_search_intervals(bands, s.min_energy() - reach, s.max_energy() + reach)) {
        const auto root = find_increasing_root(f, iv, options);
        if (!root) {
            continue;
        }
        ComplexVector psi = bath_green_column(s, *root, spec.site);
        const double g2 = bath_green_squared_element(s, *root, spec.site, spec.site).real();
        const double norm = 1.0 / std::sqrt(g2);
        out.push_back({*root, psi * norm, norm, psi.squaredNorm() / g2});
    }
    return out;
}

ComplexVector impurity_scattering_state(const SpectralData& s, const ImpuritySpec& spec, std::size_t k_index,
                                        double delta)
{
    check_finite(spec);
    check_site(s, spec.site);
    if (k_index >= s.n_modes()) {
        throw std::out_of_range("mode index " + std::to_string(k_index) + " out of range");
    }
    const auto k = static_cast<Eigen::Index>(k_index);
    const ComplexVector mode = s.eigenvectors().col(k);
    const cplx overlap = mode(static_cast<Eigen::Index>(spec.site));
    if (spec.strength == 0.0 || std::abs(overlap) < kModeNodeTolerance) {
        return mode;
    }
    const ComplexEnergy z = above_axis(s.eigenvalues()(k), delta);
    const cplx f = impurity_pole_function(s, spec, z);
    if (std::abs(f) < 1e-10) {
        return mode;
    }
    return mode + (overlap / f) * bath_green_column(s, z, spec.site);
}

ComplexVector impurity_scattering_state(const SpectralData& s, const ImpuritySpec& spec, std::size_t k_index)
{
    return impurity_scattering_state(s, spec, k_index, default_delta(s));
}

ComplexMatrix vacancy_green(const SpectralData& s, Site site, ComplexEnergy z)
{
    check_site(s, site);
    ComplexMatrix g = bath_green_matrix(s, z);
    const auto i = static_cast<Eigen::Index>(site);
    const cplx g00 = g(i, i);
    if (std::abs(g00) < kPoleFunctionTolerance) {
        std::ostringstream msg;
        msg << "vacancy resolvent at its pole: |<0|G_B(z)|0>| = " << std::abs(g00);
        throw PoleError(msg.str());
    }
    const ComplexVector ket = g.col(i);
    const ComplexVector bra = g.row(i).transpose();
    g.noalias() -= ket * bra.transpose() / g00;
    return g;
}

} // namespace resolvent
