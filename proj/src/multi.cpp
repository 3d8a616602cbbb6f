#include "resolvent/multi.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "resolvent/errors.hpp"
#include "resolvent/impurity.hpp"
#include "resolvent/kernels.hpp"
#include "resolvent/linalg.hpp"

namespace resolvent {
namespace {

using Index = Eigen::Index;

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

RealVector hermitian_eigenvalues(const ComplexMatrix& a)
{
    return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(hermitian_part(a), Eigen::EigenvaluesOnly).eigenvalues();
}

ComplexMatrix f_entries(const SpectralData& s, const EmitterArraySpec& arr, ComplexEnergy z)
{
    const double g2 = arr.g() * arr.g();
    ComplexMatrix f = -kernels::green_block(s, z.value(), arr.sites(), 1);
    f.diagonal().array() += (z.value() - arr.omega0()) / g2;
    return f;
}

/// Columns |Psi_i(z)> over [e_1.., x_0..].
ComplexMatrix dressed_columns(const SpectralData& s, const EmitterArraySpec& arr, ComplexEnergy z)
{
    const auto m = static_cast<Index>(arr.size());
    const auto n = static_cast<Index>(s.n_sites());
    ComplexMatrix psi = ComplexMatrix::Zero(m + n, m);
    psi.topRows(m).diagonal().setConstant(1.0 / arr.g());
    psi.bottomRows(n) = kernels::green_columns(s, z.value(), arr.sites(), 1);
    return psi;
}

double gap_detuning(const BandStructure& bands, double omega0)
{
    const Interval* gap = bands.gap_containing(omega0);
    if (gap == nullptr) {
        std::ostringstream msg;
        msg << "omega0 = " << omega0 << " lies inside a band; the weak-coupling Hamiltonian needs it in a gap";
        throw RegimeError(msg.str());
    }
    return std::min(omega0 - gap->lower, gap->upper - omega0);
}

/// Shared fields of both effective-Hamiltonian routes; `matrix` left as the compact form.
EffectiveHamiltonian effective_common(const SpectralData& s, const EmitterArraySpec& arr, const BandStructure& bands)
{
    arr.validate(s);
    const double w0 = arr.omega0();
    const double g2 = arr.g() * arr.g();
    const auto m = static_cast<Index>(arr.size());

    EffectiveHamiltonian out;
    out.gap_detuning = gap_detuning(bands, w0);

    const ComplexMatrix gamma = kernels::green_block(s, w0, arr.sites(), 1);
    const ComplexMatrix psi = dressed_columns(s, arr, w0);
    out.f_at_omega0 = f_entries(s, arr, w0);
    out.norms_squared = psi.colwise().squaredNorm().transpose();
    out.single_emitter_energies = (w0 + g2 * gamma.diagonal().real().array()).matrix();
    for (Index i = 0; i < m; ++i) {
        out.basis.push_back(psi.col(i) / std::sqrt(out.norms_squared(i)));
    }
    out.approximation_quality =
        (out.single_emitter_energies.array() - w0).abs().maxCoeff() / out.gap_detuning;

    out.matrix = -g2 * out.f_at_omega0;
    out.matrix.diagonal() = out.single_emitter_energies.cast<cplx>();

    out.spectral_route_energies = (w0 + g2 * hermitian_eigenvalues(gamma).array()).matrix();
    return out;
}

void finish_effective(EffectiveHamiltonian& h)
{
    h.eigenvalues = hermitian_eigenvalues(h.matrix);
    h.route_agreement = (h.eigenvalues - h.spectral_route_energies).cwiseAbs().maxCoeff();
}

} // namespace

// ---------------------------------------------------------------------------

EmitterArraySpec::EmitterArraySpec(double omega0, double g, std::vector<Site> sites)
    : omega0_(omega0), g_(g), sites_(std::move(sites))
{
    if (sites_.empty()) {
        throw std::invalid_argument("emitter array needs at least one emitter");
    }
    if (!std::isfinite(omega0_)) {
        throw std::invalid_argument("omega0 must be finite");
    }
    if (!(g_ > 0.0) || !std::isfinite(g_)) {
        throw std::invalid_argument("coupling g must be positive and finite");
    }
    std::set<Site> seen;
    for (Site x : sites_) {
        if (!seen.insert(x).second) {
            throw std::invalid_argument("two emitters share site " + std::to_string(x));
        }
    }
}

EmitterArraySpec EmitterArraySpec::from_emitters(const std::vector<EmitterSpec>& emitters)
{
    if (emitters.empty()) {
        throw std::invalid_argument("emitter array needs at least one emitter");
    }
    std::vector<Site> sites;
    for (const EmitterSpec& e : emitters) {
        if (e.omega0 != emitters.front().omega0 || e.g != emitters.front().g) {
            throw std::invalid_argument("emitters must share omega0 and g");
        }
        sites.push_back(e.site);
    }
    return EmitterArraySpec(emitters.front().omega0, emitters.front().g, std::move(sites));
}

void EmitterArraySpec::validate(const SpectralData& s) const
{
    for (Site x : sites_) {
        if (x >= s.n_sites()) {
            throw std::invalid_argument("emitter site " + std::to_string(x) + " outside bath of " +
                                        std::to_string(s.n_sites()) + " sites");
        }
    }
}

FMatrix f_matrix(const SpectralData& s, const EmitterArraySpec& arr, ComplexEnergy z)
{
    arr.validate(s);
    FMatrix out{z, f_entries(s, arr, z)};
    if (arr.size() == 2) {
        const double g2 = arr.g() * arr.g();
        const ComplexMatrix& f = out.entries;
        out.asymmetry = 0.5 * g2 * (f(1, 1) - f(0, 0));
        out.splitting = std::sqrt(g2 * g2 * f(0, 1) * f(1, 0) + out.asymmetry * out.asymmetry);
        // G_ii = (z - omega0)/g^2 - F_ii
        const cplx g_sum = 2.0 * (z.value() - arr.omega0()) / g2 - f(0, 0) - f(1, 1);
        out.shifted_center = arr.omega0() + 0.5 * g2 * g_sum;
    }
    return out;
}

MultiGreen assemble_multi_green(const SpectralData& s, const EmitterArraySpec& arr, ComplexEnergy z,
                                const ComplexMatrix& f)
{
    arr.validate(s);
    const auto m = static_cast<Index>(arr.size());
    const auto n = static_cast<Index>(s.n_sites());

    Eigen::JacobiSVD<ComplexMatrix> svd(f);
    const RealVector& sv = svd.singularValues();
    const double smallest = sv(sv.size() - 1);
    const double condition = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
    if (smallest < kPoleFunctionTolerance || condition > 1e14) {
        std::ostringstream msg;
        msg << "multi-emitter resolvent at a pole: F singular (condition " << condition << ")";
        throw PoleError(msg.str());
    }

    const ComplexMatrix gb = kernels::green_matrix(s, z.value(), 1);
    ComplexMatrix ket = ComplexMatrix::Zero(m + n, m);
    ComplexMatrix bra = ComplexMatrix::Zero(m, m + n);
    ket.topRows(m).diagonal().setConstant(1.0 / arr.g());
    bra.leftCols(m).diagonal().setConstant(1.0 / arr.g());
    for (Index i = 0; i < m; ++i) {
        const auto x = static_cast<Index>(arr.sites()[static_cast<std::size_t>(i)]);
        ket.col(i).tail(n) = gb.col(x);
        bra.row(i).tail(n) = gb.row(x);
    }
    ComplexMatrix g = ket * f.partialPivLu().solve(bra);
    g.bottomRightCorner(n, n) += gb;
    return {std::move(g), condition};
}

MultiGreen multi_green(const SpectralData& s, const EmitterArraySpec& arr, ComplexEnergy z)
{
    arr.validate(s);
    return assemble_multi_green(s, arr, z, f_entries(s, arr, z));
}

SeriesReport t_matrix_series_green(const SpectralData& s, const EmitterArraySpec& arr, ComplexEnergy z, int k_max)
{
    arr.validate(s);
    if (k_max < 1) {
        throw std::invalid_argument("series needs at least one order");
    }
    const auto m = static_cast<Index>(arr.size());
    const auto n = static_cast<Index>(s.n_sites());
    const double g = arr.g();
    const cplx detuning = z.value() - arr.omega0();
    if (detuning == 0.0) {
        throw PoleError("bare emitter propagator evaluated at omega0");
    }
    const cplx gamma_e = 1.0 / detuning;

    // Unperturbed resolvent on the full space and its restriction to P = [x_1.., e_1..].
    const ComplexMatrix gb = kernels::green_matrix(s, z.value(), 1);
    ComplexMatrix g0 = ComplexMatrix::Zero(m + n, m + n);
    g0.topLeftCorner(m, m).diagonal().setConstant(gamma_e);
    g0.bottomRightCorner(n, n) = gb;

    std::vector<Index> p;
    for (Site x : arr.sites()) {
        p.push_back(m + static_cast<Index>(x));
    }
    for (Index i = 0; i < m; ++i) {
        p.push_back(i);
    }
    const auto dim = static_cast<Index>(p.size());
    ComplexMatrix a(dim, dim);
    ComplexMatrix left(m + n, dim);
    ComplexMatrix right(dim, m + n);
    for (Index i = 0; i < dim; ++i) {
        left.col(i) = g0.col(p[static_cast<std::size_t>(i)]);
        right.row(i) = g0.row(p[static_cast<std::size_t>(i)]);
        for (Index j = 0; j < dim; ++j) {
            a(i, j) = g0(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
        }
    }
    ComplexMatrix v = ComplexMatrix::Zero(dim, dim);
    v.topRightCorner(m, m).diagonal().setConstant(g);
    v.bottomLeftCorner(m, m).diagonal().setConstant(g);

    const ComplexMatrix gamma_b = a.topLeftCorner(m, m);
    const ComplexMatrix kernel = (g * g * gamma_e) * gamma_b;
    const double radius = kernel.eigenvalues().cwiseAbs().maxCoeff();

    std::optional<ComplexMatrix> exact;
    try {
        exact = multi_green(s, arr, z).matrix;
    } catch (const PoleError&) {
    }

    SeriesReport out{g0, k_max, radius, radius < 1.0, {}};
    const ComplexMatrix step = a * v;
    ComplexMatrix term = v;
    ComplexMatrix t = ComplexMatrix::Zero(dim, dim);
    for (int k = 1; k <= k_max; ++k) {
        t += term;
        if (exact) {
            out.order_residuals.push_back((g0 + left * t * right - *exact).cwiseAbs().maxCoeff());
        }
        term = term * step;
    }
    out.matrix = g0 + left * t * right;
    return out;
}

// ---------------------------------------------------------------------------
// Poles

namespace {

double branch_value(const SpectralData& s, const EmitterArraySpec& arr, double omega, Index branch)
{
    return hermitian_eigenvalues(f_entries(s, arr, omega))(branch);
}

PoleState make_pole(const SpectralData& s, const EmitterArraySpec& arr, double omega, Index branch)
{
    const double g2 = arr.g() * arr.g();
    const auto m = static_cast<Index>(arr.size());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(hermitian_part(f_entries(s, arr, omega)));
    const ComplexVector v = eig.eigenvectors().col(branch);
    ComplexMatrix slope = kernels::green_block(s, omega, arr.sites(), 2);
    slope.diagonal().array() += 1.0 / g2;
    const double weight = (v.adjoint() * hermitian_part(slope) * v)(0, 0).real();
    ComplexVector state = dressed_columns(s, arr, omega) * v / std::sqrt(weight);
    ComplexMatrix residue = v * v.adjoint() / weight;
    // fix the global phase on the largest atomic amplitude for reproducible output
    Index big = 0;
    state.head(m).cwiseAbs().maxCoeff(&big);
    if (std::abs(state(big)) > 0.0) {
        state *= std::abs(state(big)) / state(big);
    }
    return {omega, std::move(state), std::move(residue)};
}

} // namespace

std::vector<PoleState> solve_multi_poles(const SpectralData& s, const EmitterArraySpec& arr,
                                         const BandStructure& bands, const RootOptions& options)
{
    arr.validate(s);
    const auto m = static_cast<Index>(arr.size());
    const double lower = std::min(arr.omega0(), s.min_energy()) - arr.g() - 1.0;
    const double upper = std::max(arr.omega0(), s.max_energy()) + arr.g() + 1.0;

    std::vector<PoleState> out;
    for (const SearchInterval& iv : gap_search_intervals(bands, lower, upper)) {
        for (Index branch = 0; branch < m; ++branch) {
            const auto f = [&](double w) { return branch_value(s, arr, w, branch); };
            if (const auto root = find_increasing_root(f, iv, options)) {
                out.push_back(make_pole(s, arr, *root, branch));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const PoleState& a, const PoleState& b) { return a.energy < b.energy; });
    return out;
}

ComplexMatrix two_atom_adjugate_residue(const SpectralData& s, const EmitterArraySpec& arr, double omega)
{
    if (arr.size() != 2) {
        throw std::invalid_argument("two_atom_adjugate_residue needs exactly two emitters");
    }
    const double g2 = arr.g() * arr.g();
    const ComplexMatrix f = f_entries(s, arr, omega);
    const ComplexMatrix g_sq = kernels::green_block(s, omega, arr.sites(), 2);
    const cplx n1 = 1.0 / g2 + g_sq(0, 0);
    const cplx n2 = 1.0 / g2 + g_sq(1, 1);
    const cplx beta = g2 * (f(0, 0) * n2 + f(1, 1) * n1 - f(0, 1) * g_sq(1, 0) - f(1, 0) * g_sq(0, 1));
    ComplexMatrix adj(2, 2);
    adj << f(1, 1), -f(0, 1), -f(1, 0), f(0, 0);
    return g2 * adj / beta;
}

TwoAtomPoles solve_two_atom_poles(const SpectralData& s, const EmitterArraySpec& arr, const BandStructure& bands,
                                  const RootOptions& options)
{
    if (arr.size() != 2) {
        throw std::invalid_argument("solve_two_atom_poles needs exactly two emitters");
    }
    TwoAtomPoles out;
    out.poles = solve_multi_poles(s, arr, bands, options);
    for (const PoleState& p : out.poles) {
        const ComplexMatrix adj = two_atom_adjugate_residue(s, arr, p.energy);
        out.adjugate_residue_error = std::max(out.adjugate_residue_error, (adj - p.residue).cwiseAbs().maxCoeff());
    }
    if (out.poles.size() >= 2) {
        std::vector<std::size_t> order(out.poles.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        const double w0 = arr.omega0();
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(out.poles[a].energy - w0) < std::abs(out.poles[b].energy - w0);
        });
        std::size_t lo = std::min(order[0], order[1]);
        std::size_t hi = std::max(order[0], order[1]);
        out.omega_minus = out.poles[lo].energy;
        out.omega_plus = out.poles[hi].energy;
        out.residue_states = {out.poles[lo].state, out.poles[hi].state};
    }
    return out;
}

ComplexMatrix overlap_matrix(const SpectralData& s, const EmitterArraySpec& arr)
{
    arr.validate(s);
    const ComplexMatrix psi = dressed_columns(s, arr, arr.omega0());
    return psi.adjoint() * psi;
}

// ---------------------------------------------------------------------------
// Effective Hamiltonians

EffectiveHamiltonian effective_hamiltonian_many(const SpectralData& s, const EmitterArraySpec& arr,
                                                const BandStructure& bands)
{
    EffectiveHamiltonian h = effective_common(s, arr, bands);
    finish_effective(h);
    return h;
}

EffectiveHamiltonian effective_hamiltonian_many(const SpectralData& s, const EmitterArraySpec& arr)
{
    return effective_hamiltonian_many(s, arr, detect_bands(s));
}

EffectiveHamiltonian effective_hamiltonian_two(const SpectralData& s, const EmitterArraySpec& arr,
                                               const BandStructure& bands)
{
    if (arr.size() != 2) {
        throw std::invalid_argument("effective_hamiltonian_two needs exactly two emitters");
    }
    EffectiveHamiltonian h = effective_common(s, arr, bands);
    const double g2 = arr.g() * arr.g();
    const FMatrix fm = f_matrix(s, arr, arr.omega0());
    const ComplexMatrix& f = fm.entries;
    const double n1 = h.norms_squared(0);
    const double n2 = h.norms_squared(1);
    const double w0 = arr.omega0();

    TwoEmitterDecomposition d{};
    d.asymmetry = fm.asymmetry.real();
    d.splitting = fm.splitting.real();
    d.shifted_center = fm.shifted_center.real();
    const double a0 = d.asymmetry;
    const double d0 = d.splitting;
    d.beta_plus = a0 * (n1 - n2) + d0 * (n1 + n2);
    d.beta_minus = a0 * (n1 - n2) - d0 * (n1 + n2);
    d.omega_plus = d.shifted_center + d0;
    d.omega_minus = d.shifted_center - d0;
    const double beta_product = d.beta_plus * d.beta_minus;
    d.lambda_s = beta_product != 0.0 ? -2.0 * d0 * d0 * (n1 + n2) / beta_product : 0.0;
    d.lambda_a = beta_product != 0.0 ? 2.0 * w0 * a0 * (n1 - n2) / beta_product : 0.0;
    d.big_omega_1 = w0 != 0.0 ? d0 * d0 / w0 + a0 : a0;
    d.big_omega_2 = w0 != 0.0 ? d0 * d0 / w0 - a0 : -a0;

    // Coefficients over |Psi_i> mapped to the normalized basis: C~_ij = C_ij sqrt(n_i n_j).
    RealVector scale(2);
    scale << std::sqrt(n1), std::sqrt(n2);
    const ComplexMatrix to_normalized = (scale * scale.transpose()).cast<cplx>();
    const cplx c12 = -g2 * f(0, 1);
    const cplx c21 = -g2 * f(1, 0);

    ComplexMatrix cs(2, 2);
    cs << h.single_emitter_energies(0), c12, c21, h.single_emitter_energies(1);
    ComplexMatrix ca(2, 2);
    ca << d.big_omega_1, c12, c21, d.big_omega_2;
    d.h_s = (d.lambda_s * cs).cwiseProduct(to_normalized);
    d.h_a = (d.lambda_a * ca).cwiseProduct(to_normalized);

    ComplexMatrix cr = ComplexMatrix::Zero(2, 2);
    const double beta_max = std::max(std::abs(d.beta_plus), std::abs(d.beta_minus));
    if (beta_max == 0.0) {
        // delta_0 = 0: decoupled emitters, the delta -> 0 limit of the residues
        cr(0, 0) = d.shifted_center / n1;
        cr(1, 1) = d.shifted_center / n2;
    } else {
        for (const int sign : {+1, -1}) {
            const double beta = sign > 0 ? d.beta_plus : d.beta_minus;
            const double omega = sign > 0 ? d.omega_plus : d.omega_minus;
            ComplexMatrix k(2, 2);
            k << a0 + sign * d0, c12, c21, -a0 + sign * d0;
            cr += (omega / beta) * k;
        }
    }
    d.residue_route = cr.cwiseProduct(to_normalized);

    const ComplexMatrix assembled = d.h_s + d.h_a;
    d.deviation = (assembled - d.residue_route).cwiseAbs().maxCoeff();
    const double scale_entries = std::max(1.0, d.residue_route.cwiseAbs().maxCoeff());
    d.deviation_flagged = d.deviation > 1e-10 * scale_entries;
    const double beta_min = std::min(std::abs(d.beta_plus), std::abs(d.beta_minus));
    // the residue route is the reference: it also wins whenever the assembly drifts from it
    d.used_residue_route = beta_max == 0.0 || beta_min < 1e-8 * beta_max || d.deviation_flagged;

    h.matrix = d.used_residue_route ? d.residue_route : assembled;
    h.decomposition = std::move(d);
    finish_effective(h);
    return h;
}

EffectiveHamiltonian effective_hamiltonian_two(const SpectralData& s, const EmitterArraySpec& arr)
{
    return effective_hamiltonian_two(s, arr, detect_bands(s));
}

std::vector<EffectiveHamiltonian> effective_hamiltonian_sweep(const SpectralData& s, double omega0,
                                                              const std::vector<Site>& sites,
                                                              const std::vector<double>& couplings,
                                                              const BandStructure& bands)
{
    std::vector<EffectiveHamiltonian> out(couplings.size());
    std::vector<std::exception_ptr> errors(couplings.size());
    const auto count = static_cast<long>(couplings.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        try {
            out[u] = effective_hamiltonian_many(s, EmitterArraySpec(omega0, couplings[u], sites), bands);
        } catch (...) {
            errors[u] = std::current_exception();
        }
    }
    for (const std::exception_ptr& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

} // namespace resolvent
