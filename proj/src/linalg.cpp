#include "resolvent/linalg.hpp"

#include <cmath>

namespace resolvent::linalg {

void canonicalize_phases(ComplexMatrix& columns, double threshold)
{
    for (Eigen::Index k = 0; k < columns.cols(); ++k) {
        for (Eigen::Index x = 0; x < columns.rows(); ++x) {
            const cplx c = columns(x, k);
            const double magnitude = std::abs(c);
            if (magnitude > threshold) {
                columns.col(k) *= std::conj(c) / magnitude;
                columns(x, k) = cplx(magnitude, 0.0);
                break;
            }
        }
    }
}

double hermiticity_residual(const ComplexMatrix& a)
{
    if (a.size() == 0) {
        return 0.0;
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double fidelity(const ComplexVector& a, const ComplexVector& b)
{
    const double na = a.squaredNorm();
    const double nb = b.squaredNorm();
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::norm(a.dot(b)) / (na * nb);
}

double subspace_fidelity(const ComplexMatrix& orthonormal_basis, const ComplexVector& v)
{
    const double nv = v.squaredNorm();
    if (nv == 0.0) {
        return 0.0;
    }
    const ComplexVector coefficients = orthonormal_basis.adjoint() * v;
    return coefficients.squaredNorm() / nv;
}

} // namespace resolvent::linalg
