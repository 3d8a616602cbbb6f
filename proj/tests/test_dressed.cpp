#include <doctest.h>

#include "resolvent/dressed.hpp"
#include "resolvent/errors.hpp"
#include "resolvent/impurity.hpp"
#include "resolvent/linalg.hpp"
#include "resolvent/oracle.hpp"
#include "test_support.hpp"

using namespace resolvent;
using namespace testing_support;

namespace {

const BathSpec kSingle({0.0}, {});

EmitterSpec random_emitter(std::mt19937_64& rng, const SpectralData& s, const BandStructure& bands)
{
    std::uniform_real_distribution<double> g(0.1, 1.0);
    std::uniform_int_distribution<std::size_t> site(0, s.n_sites() - 1);
    return {random_in_gap(rng, bands), g(rng), site(rng)};
}

} // namespace

TEST_CASE("self potential and self energy")
{
    CHECK(std::abs(self_potential({0.0, 1.0, 0}, 2.0) - 0.5) < 1e-15);
    CHECK(std::abs(self_potential({0.0, 1.0, 0}, 1e9)) < 1e-8);
    CHECK(std::abs(self_potential({1.0, 2.0, 0}, cplx(1.0, 1.0)) - cplx(0.0, -4.0)) < 1e-15);
    CHECK_THROWS_AS(self_potential({1.0, 2.0, 0}, 1.0), PoleError);

    const SpectralData single = diagonalize_bath(kSingle);
    CHECK(std::abs(self_energy(single, {0.0, 1.0, 0}, ComplexEnergy(0.0, 2.0)) - cplx(0.0, -0.5)) < 1e-15);
    CHECK(self_energy(single, {0.0, 0.0, 0}, ComplexEnergy(0.0, 2.0)) == 0.0);
    const SpectralData s3 = diagonalize_bath(build_uniform_chain(3, 0.0, 1.0));
    CHECK(std::abs(self_energy(s3, {0.0, 0.7, 1}, 0.0)) < 1e-15);
}

TEST_CASE("pole function F")
{
    const SpectralData single = diagonalize_bath(kSingle);
    const EmitterSpec resonant{0.0, 1.0, 0};
    for (double w : {0.5, 1.0, 3.0, -2.0}) {
        CHECK(std::abs(pole_function_F(single, resonant, w) - (w - 1.0 / w)) < 1e-14);
    }
    const EmitterSpec detuned{2.0, 1.0, 0};
    const auto roots = solve_dressed_bound_states(single, detuned, detect_bands(single));
    REQUIRE(roots.size() == 2);
    CHECK(std::abs(roots[0].energy - (1.0 - std::sqrt(2.0))) < 1e-12);
    CHECK(std::abs(roots[1].energy - (1.0 + std::sqrt(2.0))) < 1e-12);
    const oracle::Eigensystem exact = oracle::exact_eigensystem(oracle::build_full_hamiltonian(kSingle, detuned));
    CHECK(std::abs(roots[0].energy - exact.values(0)) < 1e-12);
    CHECK(std::abs(roots[1].energy - exact.values(1)) < 1e-12);

    const ComplexEnergy z(0.4, 0.3);
    CHECK(std::abs(pole_function_F(single, {0.0, 1e-4, 0}, z)) > 1e7);
    CHECK_THROWS_AS(pole_function_F(single, {0.0, 0.0, 0}, z), std::invalid_argument);
    CHECK_THROWS_AS(pole_function_F(single, {0.0, 1.0, 1}, z), std::invalid_argument);
}

TEST_CASE("dressed state function")
{
    const SpectralData s3 = diagonalize_bath(build_uniform_chain(3, 0.0, 1.0));
    const DressedStateFunction psi = dressed_state_function(s3, {0.3, 0.5, 1}, 0.0);
    CHECK(std::abs(psi.atomic_amplitude - 2.0) < 1e-15);
    CHECK(std::abs(psi.photonic(0) + 0.5) < 1e-15);
    CHECK(std::abs(psi.photonic(1)) < 1e-15);
    CHECK(std::abs(psi.photonic(2) + 0.5) < 1e-15);
    CHECK(std::abs(psi.F_value - pole_function_F(s3, {0.3, 0.5, 1}, 0.0)) < 1e-15);

    const SpectralData single = diagonalize_bath(kSingle);
    const DressedStateFunction one = dressed_state_function(single, {0.0, 1.0, 0}, ComplexEnergy(0.0, 2.0));
    CHECK(std::abs(one.photonic(0) - cplx(0.0, -0.5)) < 1e-15);

    std::mt19937_64 rng(2);
    const SpectralData s = diagonalize_bath(random_bath(rng, 8));
    const cplx z = random_z(rng, s.min_energy(), s.max_energy());
    CHECK(max_abs(dressed_state_function(s, {0.1, 0.4, 5}, z).photonic - impurity_state(s, {5, 1.0}, z)) == 0.0);
}

TEST_CASE("dressed resolvent against dense inversion")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> w0(-2.0, 2.0);
    std::uniform_real_distribution<double> coupling(0.1, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const BathSpec bath = random_bath(rng, 1 + static_cast<std::size_t>(trial % 12));
        const SpectralData s = diagonalize_bath(bath);
        const EmitterSpec e{w0(rng), coupling(rng), static_cast<Site>(trial) % s.n_sites()};
        const ComplexMatrix h = oracle::build_full_hamiltonian(bath, e).matrix;
        const auto dim = h.rows();

        const ComplexMatrix g03 = dressed_green(s, e, cplx(0.3, 0.7));
        CHECK(max_abs(g03 - dense_inverse(h, cplx(0.3, 0.7))) < 1e-9);

        double identity = 0.0;
        for (int k = 0; k < 20; ++k) {
            const cplx z = random_z(rng, s.min_energy(), s.max_energy());
            const ComplexMatrix g = dressed_green(s, e, z);
            identity = std::max(identity, max_abs((z * ComplexMatrix::Identity(dim, dim) - h) * g -
                                                  ComplexMatrix::Identity(dim, dim)));
            CHECK(std::abs(g(0, 0) - excitonic_green(s, e, z)) < 1e-12);
            CHECK(std::abs(excitonic_green(s, e, z) - dense_inverse(h, z)(0, 0)) < 1e-9);
            const ComplexMatrix field = field_green(s, e, z);
            CHECK(max_abs(field - g.bottomRightCorner(dim - 1, dim - 1)) < 1e-12);
            CHECK(max_abs(field - dense_inverse(h, z).bottomRightCorner(dim - 1, dim - 1)) < 1e-9);
        }
        CHECK(identity < 1e-9);

        // on the real axis the field sees a static impurity of strength epsilon(z)
        const double w = s.max_energy() + 2.0 + std::abs(e.omega0);
        const ImpuritySpec eps{e.site, self_potential(e, w).real()};
        CHECK(max_abs(field_green(s, e, w) - impurity_green(s, eps, w)) < 1e-12);
    }

    // weak coupling: the projector term collapses onto the bare emitter
    const SpectralData single = diagonalize_bath(kSingle);
    const cplx z(0.5, 0.5);
    const ComplexMatrix weak = dressed_green(single, {0.2, 1e-6, 0}, z);
    CHECK(std::abs(weak(0, 0) - 1.0 / (z - 0.2)) < 1e-9);
    CHECK(std::abs(excitonic_green(single, {0.0, 1.0, 0}, ComplexEnergy(0.0, 2.0)) - 1.0 / cplx(0.0, 2.5)) < 1e-15);
}

TEST_CASE("Jaynes-Cummings doublet")
{
    const SpectralData single = diagonalize_bath(kSingle);
    const auto states = solve_dressed_bound_states(single, {0.0, 1.0, 0}, detect_bands(single));
    REQUIRE(states.size() == 2);
    CHECK(std::abs(states[0].energy + 1.0) < 1e-12);
    CHECK(std::abs(states[1].energy - 1.0) < 1e-12);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(states[0].atomic_amplitude - r) < 1e-12);
    CHECK(std::abs(states[0].photonic(0) + r) < 1e-12);
    CHECK(std::abs(states[1].photonic(0) - r) < 1e-12);
}

TEST_CASE("three-site vacancy-like dressed state")
{
    const BathSpec chain3 = build_uniform_chain(3, 0.0, 1.0);
    const SpectralData s = diagonalize_bath(chain3);
    const double g = 0.5;
    const EmitterSpec e{0.0, g, 1};
    const auto states = solve_dressed_bound_states(s, e, detect_bands(s));
    const auto vds = std::find_if(states.begin(), states.end(), [](const BoundState& b) { return b.energy == 0.0; });
    REQUIRE(vds != states.end());
    const double norm = 1.0 / std::sqrt(1.0 + g * g / 2.0);
    CHECK(vds->is_vds);
    CHECK(vds->in_band);
    CHECK(std::abs(vds->atomic_amplitude - norm) < 1e-12);
    CHECK(std::abs(vds->photonic(0) + g / 2.0 * norm) < 1e-12);
    CHECK(std::abs(vds->photonic(1)) < 1e-12);
    CHECK(std::abs(vds->photonic(2) + g / 2.0 * norm) < 1e-12);

    const oracle::FullHamiltonian h = oracle::build_full_hamiltonian(chain3, e);
    const oracle::Eigensystem exact = oracle::exact_eigensystem(h);
    CHECK(oracle::eigenspace(exact, 0.0, 1e-12).cols() == 2);

    // the bare antisymmetric mode is untouched and coexists at the same energy
    const ScatteringState bic = dressed_scattering_state(s, e, 1);
    CHECK_FALSE(bic.regular);
    CHECK(bic.vector(0) == 0.0);
    CHECK(bic.residual < 1e-14);

    const VdsClassification c = classify_vds(s, e);
    CHECK(c.is_vds);
    CHECK(c.kind == VdsKind::bound);
    CHECK(std::abs(c.witness(1)) < 1e-12);
    // (H_B - omega0) psi is proportional to |0>: off-site rows vanish
    const ComplexVector hb = chain3.matrix() * c.witness;
    CHECK(std::abs(hb(0)) < 1e-12);
    CHECK(std::abs(hb(2)) < 1e-12);
    CHECK(linalg::subspace_fidelity(oracle::vacancy_eigenspace(chain3, 1, 0.0), c.witness) > 1.0 - 1e-12);
}

TEST_CASE("bound states against the oracle")
{
    const BathSpec chain = build_uniform_chain(100, 0.0, 1.0);
    const SpectralData s = diagonalize_bath(chain);
    const EmitterSpec e{2.5, 0.3, 50};
    const auto states = solve_dressed_bound_states(s, e, detect_bands(s));
    const oracle::Eigensystem exact = oracle::exact_eigensystem(oracle::build_full_hamiltonian(chain, e));
    std::vector<BoundState> above;
    for (const BoundState& b : states) {
        if (b.energy > s.max_energy()) {
            above.push_back(b);
        }
    }
    REQUIRE(above.size() == 1);
    const Eigen::Index top = exact.values.size() - 1;
    CHECK(std::abs(above[0].energy - exact.values(top)) < 1e-9);
    CHECK(linalg::fidelity(above[0].full(), exact.vectors.col(top)) > 1.0 - 1e-9);

    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        const BathSpec bath = random_bath(rng, 2 + static_cast<std::size_t>(trial % 11));
        const SpectralData sr = diagonalize_bath(bath);
        const BandStructure bands = detect_bands(sr, 3.0);
        const EmitterSpec er = random_emitter(rng, sr, bands);
        const oracle::FullHamiltonian h = oracle::build_full_hamiltonian(bath, er);
        const oracle::Eigensystem ex = oracle::exact_eigensystem(h);
        std::vector<BoundState> found;
        for (const BoundState& b : solve_dressed_bound_states(sr, er, bands)) {
            if (!b.in_band) {
                found.push_back(b);
            }
        }
        const std::vector<double> expected = oracle::in_gap_eigenvalues(ex, sr, bands);
        REQUIRE(found.size() == expected.size());
        for (std::size_t i = 0; i < found.size(); ++i) {
            const BoundState& b = found[i];
            CHECK(std::abs(b.energy - expected[i]) < 1e-9);
            // normalization recomputed from the explicit wavefunction
            CHECK(std::abs(1.0 / std::sqrt(std::norm(b.atomic_amplitude / b.norm_factor) +
                                           b.photonic.squaredNorm() / (b.norm_factor * b.norm_factor)) -
                           b.norm_factor) < 1e-10);
            CHECK(std::abs(b.full().norm() - 1.0) < 1e-10);
            const auto dim = h.matrix.rows();
            CHECK(((h.matrix - b.energy * ComplexMatrix::Identity(dim, dim)) * b.full()).norm() < 1e-8);
        }
    }
}

TEST_CASE("dressed scattering states")
{
    const BathSpec chain = build_uniform_chain(50, 0.0, 1.0);
    const SpectralData s = diagonalize_bath(chain);
    const EmitterSpec e{0.37, 0.4, 12};
    for (std::size_t k = 0; k < s.n_modes(); ++k) {
        const ScatteringState st8 = dressed_scattering_state(s, e, k, 1e-8);
        const ScatteringState st10 = dressed_scattering_state(s, e, k, 1e-10);
        CHECK(st8.residual < 1e-6);
        CHECK((st10.residual < st8.residual || std::max(st8.residual, st10.residual) <= 1e-12));
    }
    // the centre of an odd chain is a node of every second mode
    const SpectralData odd = diagonalize_bath(build_uniform_chain(49, 0.0, 1.0));
    std::size_t nodes = 0;
    for (std::size_t k = 0; k < odd.n_modes(); ++k) {
        if (std::abs(odd.eigenvectors()(24, static_cast<Eigen::Index>(k))) < 1e-10) {
            const ScatteringState st = dressed_scattering_state(odd, {0.37, 0.4, 24}, k);
            CHECK_FALSE(st.regular);
            CHECK(st.vector(0) == 0.0);
            ++nodes;
        }
    }
    CHECK(nodes == 24);
}

TEST_CASE("VDS classification")
{
    const SpectralData single = diagonalize_bath(kSingle);
    const VdsClassification none = classify_vds(single, {0.0, 1.0, 0});
    CHECK_FALSE(none.is_vds);
    CHECK(none.kind == VdsKind::none);

    // even chain, band centre: G00(0) vanishes by chiral symmetry, a bound state in the band
    const SpectralData s100 = diagonalize_bath(build_uniform_chain(100, 0.0, 1.0));
    const VdsClassification centre = classify_vds(s100, {0.0, 0.5, 40});
    CHECK(centre.is_vds);
    CHECK(centre.node_amplitude < 1e-8);

    // generic in-band frequency: the unbound construction always leaves a node
    const VdsClassification unbound = classify_vds(s100, {0.3, 0.5, 40});
    CHECK(unbound.kind == VdsKind::unbound);
    CHECK(unbound.is_vds);
    CHECK(unbound.node_amplitude < 1e-8);
    REQUIRE(unbound.mode.has_value());
}

TEST_CASE("imaginary part of the local Green function at nodal frequencies")
{
    const SpectralData s3 = diagonalize_bath(build_uniform_chain(3, 0.0, 1.0));
    for (double delta : {1e-4, 1e-6, 1e-8}) {
        // every mode at omega = 0 has a node at the centre
        CHECK(std::abs(bath_green_element(s3, ComplexEnergy(0.0, delta), 1, 1).imag()) < 10 * delta);
        // the mode at sqrt(2) does not
        CHECK(std::abs(bath_green_element(s3, ComplexEnergy(std::sqrt(2.0), delta), 1, 1).imag()) > 0.1 / delta);
    }
}
