#pragma once

#include <span>

#include "resolvent/types.hpp"

namespace resolvent {
class SpectralData;
}

// Mode-sum kernels behind every bath Green-function evaluation:
//
//     out(a, b) = sum_k U(rows[a], k) * w_k * conj(U(cols[b], k)),   w_k = (z - omega_k)^-power
//
// Modes with |z - omega_k| < kPoleTolerance on the real axis carry no weight; their
// summed numerator must vanish (0/0 rule), otherwise PoleError is thrown.
namespace resolvent::kernels {

enum class Backend {
    serial, ///< plain triple loop, kept as the reference implementation
    openmp, ///< parallel over output columns / rows
};

inline constexpr Backend kDefaultBackend = Backend::openmp;

/// Single entry <x| G_B(z)^power |y> (serial mode sum).
cplx green_entry(const SpectralData& s, cplx z, Site x, Site y, int power);

/// Dense N x N G_B(z)^power.
ComplexMatrix green_matrix(const SpectralData& s, cplx z, int power, Backend backend = kDefaultBackend);

/// N x M matrix whose column b is G_B(z)^power |sites[b]>.
ComplexMatrix green_columns(const SpectralData& s, cplx z, std::span<const Site> sites, int power,
                            Backend backend = kDefaultBackend);

/// M x N matrix whose row a is <sites[a]| G_B(z)^power.
ComplexMatrix green_rows(const SpectralData& s, cplx z, std::span<const Site> sites, int power,
                         Backend backend = kDefaultBackend);

/// M x M block <sites[a]| G_B(z)^power |sites[b]>.
ComplexMatrix green_block(const SpectralData& s, cplx z, std::span<const Site> sites, int power,
                          Backend backend = kDefaultBackend);

} // namespace resolvent::kernels
