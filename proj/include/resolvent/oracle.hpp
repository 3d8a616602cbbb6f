#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resolvent/bath.hpp"
#include "resolvent/dressed.hpp"
#include "resolvent/multi.hpp"

// Ground truth by dense linear algebra on the full single-excitation Hamiltonian.
// Nothing in here evaluates a bath Green function; agreement with the resolvent
// routes is therefore evidence rather than tautology.
namespace resolvent::oracle {

/// Basis order [e_1 .. e_M, x_0 .. x_{N-1}].
struct FullHamiltonian {
    ComplexMatrix matrix;
    std::size_t n_emitters;
    std::size_t n_sites;
};

/// Dense H_B assembled straight from the spec's frequencies and edges.
ComplexMatrix bath_hamiltonian(const BathSpec& bath);

FullHamiltonian build_full_hamiltonian(const BathSpec& bath, const EmitterArraySpec& arr);
FullHamiltonian build_full_hamiltonian(const BathSpec& bath, const EmitterSpec& e);

struct Eigensystem {
    RealVector values;     ///< ascending
    ComplexMatrix vectors; ///< orthonormal columns, first component above 1e-12 real-positive
};

Eigensystem exact_eigensystem(const ComplexMatrix& h);
Eigensystem exact_eigensystem(const FullHamiltonian& h);

/// (z - H)^-1 by LU. PoleError when the estimated condition number exceeds 1e14.
ComplexMatrix direct_resolvent(const ComplexMatrix& h, ComplexEnergy z);
ComplexMatrix direct_resolvent(const FullHamiltonian& h, ComplexEnergy z);

/// Orthonormal basis of the eigenspace of `system` within `tolerance` of omega (may be empty).
ComplexMatrix eigenspace(const Eigensystem& system, double omega, double tolerance = 1e-8);

/// Eigenspace at omega of the bath with `site` deleted, embedded back with a zero at `site`.
ComplexMatrix vacancy_eigenspace(const BathSpec& bath, Site site, double omega, double tolerance = 1e-8);

/// Eigenvalues inside gaps of `bands`, excluding those within 1e-10 of a bath eigenvalue.
std::vector<double> in_gap_eigenvalues(const Eigensystem& system, const SpectralData& bath,
                                       const BandStructure& bands);

struct Check {
    std::string name;
    double max_abs_error;
    double tolerance;
    bool pass;
};

struct ComparisonReport {
    std::string suite;
    std::vector<Check> checks;

    bool all_pass() const;
    /// {"suite": ..., "all_pass": ..., "checks": [{"name", "max_abs_error", "tolerance", "pass"}]}
    std::string to_json() const;
};

struct CompareOptions {
    std::string suite = "default"; ///< default | resolvent | bound-states | vds | effective
    std::uint64_t seed = 7;
    int n_z = 20;
    double gap_factor = kDefaultGapFactor;
    /// Test hook: added to F_11 before the multi-emitter resolvent is assembled.
    double f_corruption = 0.0;
};

/// Runs the named check set. Failures are report entries, never exceptions;
/// an unknown suite name throws invalid_argument.
ComparisonReport compare(const BathSpec& bath, const EmitterArraySpec& arr, const CompareOptions& options = {});

} // namespace resolvent::oracle
