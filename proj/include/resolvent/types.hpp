#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace resolvent {

using cplx = std::complex<double>;
using Site = std::size_t;

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Spectral argument z = omega + i omega'. A real value stands for a point on the
/// real axis; the omega^+ limit is always passed explicitly as omega + i delta.
class ComplexEnergy {
public:
    constexpr ComplexEnergy() = default;
    constexpr ComplexEnergy(double omega) : value_(omega, 0.0) {}
    constexpr ComplexEnergy(cplx value) : value_(value) {}
    constexpr ComplexEnergy(double omega, double omega_imag) : value_(omega, omega_imag) {}

    constexpr cplx value() const { return value_; }
    constexpr double real() const { return value_.real(); }
    constexpr double imag() const { return value_.imag(); }
    constexpr bool on_real_axis() const { return value_.imag() == 0.0; }

    ComplexEnergy conj() const { return ComplexEnergy(std::conj(value_)); }

private:
    cplx value_{0.0, 0.0};
};

/// omega^+ = omega + i delta.
inline ComplexEnergy above_axis(double omega, double delta) { return ComplexEnergy(omega, delta); }

} // namespace resolvent
