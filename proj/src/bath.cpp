#include "resolvent/bath.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "resolvent/errors.hpp"
#include "resolvent/kernels.hpp"
#include "resolvent/linalg.hpp"
#include "yaml_support.hpp"

namespace resolvent {

BathSpec::BathSpec(std::vector<double> frequencies, std::vector<Hopping> hoppings)
    : frequencies_(std::move(frequencies)), hoppings_(std::move(hoppings))
{
    if (frequencies_.empty()) {
        throw std::invalid_argument("bath needs at least one site");
    }
    std::set<std::pair<Site, Site>> seen;
    for (const Hopping& h : hoppings_) {
        if (h.from >= n_sites() || h.to >= n_sites()) {
            throw std::invalid_argument("hopping index outside [0, n_sites)");
        }
        if (h.from == h.to) {
            throw std::invalid_argument("self-loop; use frequencies");
        }
        if (!seen.insert(std::minmax(h.from, h.to)).second) {
            throw std::invalid_argument("duplicate edge between sites " + std::to_string(h.from) + " and " +
                                        std::to_string(h.to));
        }
    }
}

ComplexMatrix BathSpec::matrix() const
{
    const auto n = static_cast<Eigen::Index>(n_sites());
    ComplexMatrix h = ComplexMatrix::Zero(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        h(x, x) = frequencies_[static_cast<std::size_t>(x)];
    }
    for (const Hopping& e : hoppings_) {
        const auto a = static_cast<Eigen::Index>(e.from);
        const auto b = static_cast<Eigen::Index>(e.to);
        h(a, b) = e.amplitude;
        h(b, a) = std::conj(e.amplitude);
    }
    return h;
}

bool BathSpec::operator==(const BathSpec& other) const
{
    return n_sites() == other.n_sites() && matrix() == other.matrix();
}

BathSpec build_uniform_chain(std::size_t n, double omega_c, double j)
{
    if (n == 0) {
        throw std::invalid_argument("chain length must be positive");
    }
    std::vector<Hopping> hops;
    hops.reserve(n - 1);
    for (Site x = 0; x + 1 < n; ++x) {
        hops.push_back({x, x + 1, cplx(j, 0.0)});
    }
    return BathSpec(std::vector<double>(n, omega_c), std::move(hops));
}

BathSpec build_ssh_chain(std::size_t n_cells, double omega_c, double j1, double j2)
{
    if (n_cells == 0) {
        throw std::invalid_argument("SSH chain needs at least one cell");
    }
    const std::size_t n = 2 * n_cells;
    std::vector<Hopping> hops;
    hops.reserve(n - 1);
    for (Site x = 0; x + 1 < n; ++x) {
        hops.push_back({x, x + 1, cplx(x % 2 == 0 ? j1 : j2, 0.0)});
    }
    return BathSpec(std::vector<double>(n, omega_c), std::move(hops));
}

BathSpec load_bath_spec(std::string_view text, std::string_view source_name)
{
    const std::string source(source_name);
    const YAML::Node root = detail::load_document(text, source);
    if (!root.IsMap()) {
        detail::fail(root, "bath spec must be a map with keys n_sites, frequencies, hoppings", source);
    }
    detail::require_known_keys(root, {"n_sites", "frequencies", "hoppings"}, "bath spec", source);
    return detail::parse_bath_fields(root, source);
}

// ---------------------------------------------------------------------------
// Spectral data

SpectralData::SpectralData(RealVector values, ComplexMatrix vectors, BathSpec source)
    : eigenvalues_(std::move(values)), eigenvectors_(std::move(vectors)), source_(std::move(source))
{
}

double SpectralData::unitarity_residual() const
{
    const auto n = eigenvectors_.cols();
    return (eigenvectors_.adjoint() * eigenvectors_ - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

double SpectralData::reconstruction_residual() const
{
    const ComplexMatrix rebuilt = eigenvectors_ * eigenvalues_.cast<cplx>().asDiagonal() * eigenvectors_.adjoint();
    return (rebuilt - source_.matrix()).cwiseAbs().maxCoeff();
}

SpectralData diagonalize_bath(const BathSpec& spec)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(spec.matrix());
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("bath diagonalization failed");
    }
    ComplexMatrix vectors = solver.eigenvectors();
    linalg::canonicalize_phases(vectors);
    return SpectralData(solver.eigenvalues(), std::move(vectors), spec);
}

double default_delta(const SpectralData& s)
{
    const double width = s.spectral_width();
    return 1e-8 * (width > 0.0 ? width : 1.0);
}

// ---------------------------------------------------------------------------
// Bands

bool BandStructure::in_gap(double omega) const { return gap_containing(omega) != nullptr; }

bool BandStructure::in_band(double omega) const
{
    return std::any_of(bands.begin(), bands.end(), [omega](const Interval& b) { return b.contains(omega); });
}

const Interval* BandStructure::gap_containing(double omega) const
{
    for (const Interval& g : gaps) {
        if (g.contains_open(omega)) {
            return &g;
        }
    }
    return nullptr;
}

BandStructure detect_bands(const SpectralData& s, double gap_factor)
{
    if (!(gap_factor > 1.0)) {
        throw std::invalid_argument("gap_factor must exceed 1");
    }
    const RealVector& omega = s.eigenvalues();
    const Eigen::Index n = omega.size();

    std::vector<double> positive_spacings;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double spacing = omega(k + 1) - omega(k);
        if (spacing > kPoleTolerance) {
            positive_spacings.push_back(spacing);
        }
    }
    double threshold = std::numeric_limits<double>::infinity();
    if (!positive_spacings.empty()) {
        std::vector<double> sorted = positive_spacings;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
        threshold = gap_factor * sorted[sorted.size() / 2];
    }

    BandStructure out;
    Interval current{omega(0), omega(0)};
    for (Eigen::Index k = 1; k < n; ++k) {
        if (omega(k) - omega(k - 1) < threshold) {
            current.upper = omega(k);
        } else {
            out.bands.push_back(current);
            current = Interval{omega(k), omega(k)};
        }
    }
    out.bands.push_back(current);

    const double inf = std::numeric_limits<double>::infinity();
    out.gaps.push_back({-inf, out.bands.front().lower});
    for (std::size_t b = 0; b + 1 < out.bands.size(); ++b) {
        out.gaps.push_back({out.bands[b].upper, out.bands[b + 1].lower});
    }
    out.gaps.push_back({out.bands.back().upper, inf});
    return out;
}

// ---------------------------------------------------------------------------
// Green functions

cplx bath_green_element(const SpectralData& s, ComplexEnergy z, Site x, Site x_prime)
{
    return kernels::green_entry(s, z.value(), x, x_prime, 1);
}

cplx bath_green_squared_element(const SpectralData& s, ComplexEnergy z, Site x, Site x_prime)
{
    return kernels::green_entry(s, z.value(), x, x_prime, 2);
}

ComplexMatrix bath_green_matrix(const SpectralData& s, ComplexEnergy z, int power)
{
    return kernels::green_matrix(s, z.value(), power);
}

ComplexVector bath_green_column(const SpectralData& s, ComplexEnergy z, Site x)
{
    const Site site[1] = {x};
    return kernels::green_columns(s, z.value(), site, 1).col(0);
}

ComplexVector bath_green_row(const SpectralData& s, ComplexEnergy z, Site x)
{
    const Site site[1] = {x};
    return kernels::green_rows(s, z.value(), site, 1).row(0).transpose();
}

ComplexMatrix bath_green_block(const SpectralData& s, ComplexEnergy z, const std::vector<Site>& sites, int power)
{
    return kernels::green_block(s, z.value(), sites, power);
}

cplx analytic_chain_green(ComplexEnergy z, double omega_c, double j, long d)
{
    const cplx detuning = z.value() - omega_c;
    const long distance = d < 0 ? -d : d;
    if (j == 0.0) {
        if (z.on_real_axis() && detuning == 0.0) {
            throw BranchError("isolated cavity evaluated at its own frequency");
        }
        return distance == 0 ? 1.0 / detuning : 0.0;
    }
    if (z.on_real_axis() && std::abs(detuning.real()) <= 2.0 * std::abs(j)) {
        std::ostringstream msg;
        msg << "z = " << z.real() << " lies on the chain band [" << omega_c - 2.0 * std::abs(j) << ", "
            << omega_c + 2.0 * std::abs(j) << "]";
        throw BranchError(msg.str());
    }
    // The roots multiply to 1; take the large one without cancellation and invert it.
    const cplx root = std::sqrt(detuning * detuning - 4.0 * j * j);
    const cplx plus = detuning + root;
    const cplx minus = detuning - root;
    const cplx y = 2.0 * j / (std::abs(plus) >= std::abs(minus) ? plus : minus);
    return std::pow(y, static_cast<double>(distance)) / (j * (1.0 / y - y));
}

} // namespace resolvent
