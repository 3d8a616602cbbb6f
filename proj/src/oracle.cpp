#include "resolvent/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "resolvent/errors.hpp"
#include "resolvent/linalg.hpp"

namespace resolvent::oracle {
namespace {

using Index = Eigen::Index;

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"default", "resolvent", "bound-states", "vds", "effective"};
    return names;
}

bool wants(const std::string& suite, const char* part) { return suite == "default" || suite == part; }

void add(ComparisonReport& r, std::string name, double error, double tolerance)
{
    // NaN errors fail
    r.checks.push_back({std::move(name), error, tolerance, error <= tolerance});
}

} // namespace

ComplexMatrix bath_hamiltonian(const BathSpec& bath)
{
    const auto n = static_cast<Index>(bath.n_sites());
    ComplexMatrix h = ComplexMatrix::Zero(n, n);
    for (Index x = 0; x < n; ++x) {
        h(x, x) = bath.frequencies()[static_cast<std::size_t>(x)];
    }
    for (const Hopping& e : bath.hoppings()) {
        h(static_cast<Index>(e.from), static_cast<Index>(e.to)) += e.amplitude;
        h(static_cast<Index>(e.to), static_cast<Index>(e.from)) += std::conj(e.amplitude);
    }
    return h;
}

FullHamiltonian build_full_hamiltonian(const BathSpec& bath, const EmitterArraySpec& arr)
{
    const auto m = static_cast<Index>(arr.size());
    const auto n = static_cast<Index>(bath.n_sites());
    ComplexMatrix h = ComplexMatrix::Zero(m + n, m + n);
    h.bottomRightCorner(n, n) = bath_hamiltonian(bath);
    for (Index i = 0; i < m; ++i) {
        const Site x = arr.sites()[static_cast<std::size_t>(i)];
        if (x >= bath.n_sites()) {
            throw std::invalid_argument("emitter site " + std::to_string(x) + " outside the bath");
        }
        h(i, i) = arr.omega0();
        h(i, m + static_cast<Index>(x)) = arr.g();
        h(m + static_cast<Index>(x), i) = arr.g();
    }
    return {std::move(h), arr.size(), bath.n_sites()};
}

FullHamiltonian build_full_hamiltonian(const BathSpec& bath, const EmitterSpec& e)
{
    return build_full_hamiltonian(bath, EmitterArraySpec(e.omega0, e.g, {e.site}));
}

Eigensystem exact_eigensystem(const ComplexMatrix& h)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("oracle diagonalization failed");
    }
    ComplexMatrix vectors = solver.eigenvectors();
    linalg::canonicalize_phases(vectors);
    return {solver.eigenvalues(), std::move(vectors)};
}

Eigensystem exact_eigensystem(const FullHamiltonian& h) { return exact_eigensystem(h.matrix); }

ComplexMatrix direct_resolvent(const ComplexMatrix& h, ComplexEnergy z)
{
    const Index dim = h.rows();
    const ComplexMatrix shifted = z.value() * ComplexMatrix::Identity(dim, dim) - h;
    const Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
        std::ostringstream msg;
        msg << "z - H is singular to working precision (condition ~ " << (rcond > 0 ? 1.0 / rcond : INFINITY) << ")";
        throw PoleError(msg.str());
    }
    return lu.inverse();
}

ComplexMatrix direct_resolvent(const FullHamiltonian& h, ComplexEnergy z) { return direct_resolvent(h.matrix, z); }

ComplexMatrix eigenspace(const Eigensystem& system, double omega, double tolerance)
{
    std::vector<Index> picked;
    for (Index k = 0; k < system.values.size(); ++k) {
        if (std::abs(system.values(k) - omega) <= tolerance) {
            picked.push_back(k);
        }
    }
    ComplexMatrix out(system.vectors.rows(), static_cast<Index>(picked.size()));
    for (std::size_t c = 0; c < picked.size(); ++c) {
        out.col(static_cast<Index>(c)) = system.vectors.col(picked[c]);
    }
    return out;
}

ComplexMatrix vacancy_eigenspace(const BathSpec& bath, Site site, double omega, double tolerance)
{
    const auto n = static_cast<Index>(bath.n_sites());
    const auto hole = static_cast<Index>(site);
    if (n == 1) {
        return ComplexMatrix(1, 0);
    }
    const ComplexMatrix full = bath_hamiltonian(bath);
    std::vector<Index> keep;
    for (Index x = 0; x < n; ++x) {
        if (x != hole) {
            keep.push_back(x);
        }
    }
    const auto r = static_cast<Index>(keep.size());
    ComplexMatrix reduced(r, r);
    for (Index a = 0; a < r; ++a) {
        for (Index b = 0; b < r; ++b) {
            reduced(a, b) = full(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
        }
    }
    const ComplexMatrix space = eigenspace(exact_eigensystem(reduced), omega, tolerance);
    ComplexMatrix embedded = ComplexMatrix::Zero(n, space.cols());
    for (Index a = 0; a < r; ++a) {
        embedded.row(keep[static_cast<std::size_t>(a)]) = space.row(a);
    }
    return embedded;
}

std::vector<double> in_gap_eigenvalues(const Eigensystem& system, const SpectralData& bath, const BandStructure& bands)
{
    std::vector<double> out;
    const RealVector& bath_values = bath.eigenvalues();
    for (Index k = 0; k < system.values.size(); ++k) {
        const double w = system.values(k);
        if (!bands.in_gap(w)) {
            continue;
        }
        if ((bath_values.array() - w).abs().minCoeff() <= 1e-10) {
            continue;
        }
        out.push_back(w);
    }
    return out;
}

bool ComparisonReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string ComparisonReport::to_json() const
{
    nlohmann::ordered_json doc;
    doc["suite"] = suite;
    doc["all_pass"] = all_pass();
    doc["checks"] = nlohmann::ordered_json::array();
    for (const Check& c : checks) {
        nlohmann::ordered_json entry;
        entry["name"] = c.name;
        entry["max_abs_error"] = std::isfinite(c.max_abs_error) ? nlohmann::ordered_json(c.max_abs_error)
                                                                : nlohmann::ordered_json(nullptr);
        entry["tolerance"] = c.tolerance;
        entry["pass"] = c.pass;
        doc["checks"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

ComparisonReport compare(const BathSpec& bath, const EmitterArraySpec& arr, const CompareOptions& options)
{
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), options.suite) == names.end()) {
        throw std::invalid_argument("unknown comparison suite '" + options.suite + "'");
    }
    ComparisonReport report{options.suite, {}};
    const SpectralData s = diagonalize_bath(bath);
    arr.validate(s);
    const BandStructure bands = detect_bands(s, options.gap_factor);
    const FullHamiltonian h = build_full_hamiltonian(bath, arr);
    const Eigensystem exact = exact_eigensystem(h);
    const auto dim = static_cast<Index>(h.matrix.rows());
    const double nan = std::numeric_limits<double>::quiet_NaN();

    if (wants(options.suite, "resolvent")) {
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> re(s.min_energy() - 1.0, s.max_energy() + 1.0);
        std::uniform_real_distribution<double> im(0.1, 1.0);
        std::bernoulli_distribution flip(0.5);
        double err = 0.0;
        double identity = 0.0;
        double single = 0.0;
        try {
            for (int k = 0; k < options.n_z; ++k) {
                const double y = im(rng);
                const ComplexEnergy z(re(rng), flip(rng) ? y : -y);
                ComplexMatrix f = f_matrix(s, arr, z).entries;
                f(0, 0) += options.f_corruption;
                const ComplexMatrix g = assemble_multi_green(s, arr, z, f).matrix;
                err = std::max(err, (g - direct_resolvent(h, z)).cwiseAbs().maxCoeff());
                const ComplexMatrix eye = ComplexMatrix::Identity(dim, dim);
                identity = std::max(identity, ((z.value() * eye - h.matrix) * g - eye).cwiseAbs().maxCoeff());
                if (arr.size() == 1) {
                    const ComplexMatrix gd = dressed_green(s, arr.emitter(0), z);
                    single = std::max(single, (gd - direct_resolvent(h, z)).cwiseAbs().maxCoeff());
                }
            }
        } catch (const std::exception&) {
            err = identity = single = nan;
        }
        add(report, "resolvent.multi_green_vs_dense", err, 1e-9);
        add(report, "resolvent.identity", identity, 1e-9);
        if (arr.size() == 1) {
            add(report, "resolvent.dressed_green_vs_dense", single, 1e-9);
        }
    }

    if (wants(options.suite, "bound-states")) {
        const std::vector<double> expected = in_gap_eigenvalues(exact, s, bands);
        std::vector<double> energies;
        std::vector<ComplexVector> states;
        double normalization = 0.0;
        if (arr.size() == 1) {
            for (const BoundState& b : solve_dressed_bound_states(s, arr.emitter(0), bands)) {
                if (!b.in_band) {
                    energies.push_back(b.energy);
                    states.push_back(b.full());
                    normalization = std::max(normalization, std::abs(b.full().norm() - 1.0));
                }
            }
        } else {
            for (const PoleState& p : solve_multi_poles(s, arr, bands)) {
                energies.push_back(p.energy);
                states.push_back(p.state);
                normalization = std::max(normalization, std::abs(p.state.norm() - 1.0));
            }
        }
        const double count_error =
            std::abs(static_cast<double>(energies.size()) - static_cast<double>(expected.size()));
        add(report, "bound_states.count", count_error, 0.0);
        double energy_error = 0.0;
        double fidelity_error = 0.0;
        double residual = 0.0;
        if (count_error == 0.0) {
            for (std::size_t i = 0; i < energies.size(); ++i) {
                energy_error = std::max(energy_error, std::abs(energies[i] - expected[i]));
                const ComplexMatrix space = eigenspace(exact, energies[i]);
                fidelity_error = std::max(fidelity_error, 1.0 - linalg::subspace_fidelity(space, states[i]));
                residual = std::max(residual, ((h.matrix - energies[i] * ComplexMatrix::Identity(dim, dim)) *
                                               states[i]).norm());
            }
        } else {
            energy_error = fidelity_error = residual = nan;
        }
        add(report, "bound_states.energy", energy_error, 1e-9);
        add(report, "bound_states.fidelity", fidelity_error, 1e-9);
        add(report, "bound_states.normalization", normalization, 1e-10);
        add(report, "bound_states.residual", residual, 1e-8);
    }

    if (wants(options.suite, "vds") && arr.size() == 1) {
        const EmitterSpec e = arr.emitter(0);
        const VdsClassification vds = classify_vds(s, e, bands);
        if (vds.kind == VdsKind::bound) {
            add(report, "vds.node", vds.node_amplitude, 1e-9);
            const ComplexMatrix space = vacancy_eigenspace(bath, e.site, e.omega0);
            const double miss = space.cols() == 0 ? 1.0 : 1.0 - linalg::subspace_fidelity(space, vds.witness);
            add(report, "vds.vacancy_match", miss, 1e-9);
        }
    }

    if (wants(options.suite, "effective") && arr.size() >= 2 && bands.in_gap(arr.omega0())) {
        const EffectiveHamiltonian heff = effective_hamiltonian_many(s, arr, bands);
        add(report, "effective.hermiticity", linalg::hermiticity_residual(heff.matrix), 1e-12);
        add(report, "effective.spectral_route", heff.route_agreement, 1e-10);
    }
    return report;
}

} // namespace resolvent::oracle
