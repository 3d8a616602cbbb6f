#include "resolvent/kernels.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "resolvent/bath.hpp"
#include "resolvent/errors.hpp"

namespace resolvent::kernels {
namespace {

struct ModeWeights {
    std::vector<cplx> weights;
    std::vector<Eigen::Index> singular;
};

ModeWeights mode_weights(const SpectralData& s, cplx z, int power)
{
    if (power != 1 && power != 2) {
        throw std::invalid_argument("Green kernel power must be 1 or 2");
    }
    const RealVector& omega = s.eigenvalues();
    ModeWeights mw;
    mw.weights.resize(static_cast<std::size_t>(omega.size()));
    const bool real_axis = z.imag() == 0.0;
    for (Eigen::Index k = 0; k < omega.size(); ++k) {
        const cplx denominator = z - omega(k);
        if (real_axis && std::abs(denominator) < kPoleTolerance) {
            mw.weights[static_cast<std::size_t>(k)] = 0.0;
            mw.singular.push_back(k);
            continue;
        }
        mw.weights[static_cast<std::size_t>(k)] = power == 1 ? 1.0 / denominator : 1.0 / (denominator * denominator);
    }
    return mw;
}

// 0/0 rule: the summed numerator of the coinciding modes must vanish on every requested entry.
void check_singular_modes(const SpectralData& s, cplx z, const ModeWeights& mw, std::span<const Site> rows,
                          std::span<const Site> cols)
{
    if (mw.singular.empty()) {
        return;
    }
    const ComplexMatrix& u = s.eigenvectors();
    for (Site x : rows) {
        for (Site y : cols) {
            cplx numerator = 0.0;
            for (Eigen::Index k : mw.singular) {
                numerator += u(static_cast<Eigen::Index>(x), k) * std::conj(u(static_cast<Eigen::Index>(y), k));
            }
            if (std::abs(numerator) >= kNodeTolerance) {
                std::ostringstream msg;
                msg << "z = " << z.real() << " sits on a bath eigenvalue with nonzero weight at (" << x << ", " << y
                    << ")";
                throw PoleError(msg.str());
            }
        }
    }
}

void check_sites(const SpectralData& s, std::span<const Site> sites)
{
    for (Site x : sites) {
        if (x >= s.n_sites()) {
            throw std::out_of_range("site index " + std::to_string(x) + " outside bath of " +
                                    std::to_string(s.n_sites()) + " sites");
        }
    }
}

ComplexMatrix submatrix_serial(const SpectralData& s, const ModeWeights& mw, std::span<const Site> rows,
                               std::span<const Site> cols)
{
    const ComplexMatrix& u = s.eigenvectors();
    const auto n_modes = static_cast<Eigen::Index>(mw.weights.size());
    ComplexMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) {
            cplx sum = 0.0;
            for (Eigen::Index k = 0; k < n_modes; ++k) {
                sum += u(static_cast<Eigen::Index>(rows[a]), k) * mw.weights[static_cast<std::size_t>(k)] *
                       std::conj(u(static_cast<Eigen::Index>(cols[b]), k));
            }
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = sum;
        }
    }
    return out;
}

ComplexMatrix submatrix_openmp(const SpectralData& s, const ModeWeights& mw, std::span<const Site> rows,
                               std::span<const Site> cols)
{
    const ComplexMatrix& u = s.eigenvectors();
    const auto n_modes = static_cast<Eigen::Index>(mw.weights.size());
    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = static_cast<Eigen::Index>(cols.size());
    const Eigen::Map<const ComplexVector> w(mw.weights.data(), n_modes);

    ComplexMatrix weighted_rows(n_rows, n_modes);
    ComplexMatrix conj_cols(n_modes, n_cols);
#pragma omp parallel for schedule(static) if (n_rows * n_modes > 65536)
    for (Eigen::Index a = 0; a < n_rows; ++a) {
        weighted_rows.row(a) = u.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(a)])).cwiseProduct(w.transpose());
    }
#pragma omp parallel for schedule(static) if (n_cols * n_modes > 65536)
    for (Eigen::Index b = 0; b < n_cols; ++b) {
        conj_cols.col(b) = u.row(static_cast<Eigen::Index>(cols[static_cast<std::size_t>(b)])).adjoint();
    }

    ComplexMatrix out(n_rows, n_cols);
#pragma omp parallel for schedule(dynamic, 8) if (n_rows * n_cols * n_modes > 262144)
    for (Eigen::Index b = 0; b < n_cols; ++b) {
        out.col(b).noalias() = weighted_rows * conj_cols.col(b);
    }
    return out;
}

std::vector<Site> all_sites(const SpectralData& s)
{
    std::vector<Site> sites(s.n_sites());
    std::iota(sites.begin(), sites.end(), Site{0});
    return sites;
}

ComplexMatrix submatrix(const SpectralData& s, cplx z, std::span<const Site> rows, std::span<const Site> cols,
                        int power, Backend backend)
{
    check_sites(s, rows);
    check_sites(s, cols);
    const ModeWeights mw = mode_weights(s, z, power);
    check_singular_modes(s, z, mw, rows, cols);
    return backend == Backend::serial ? submatrix_serial(s, mw, rows, cols) : submatrix_openmp(s, mw, rows, cols);
}

} // namespace

cplx green_entry(const SpectralData& s, cplx z, Site x, Site y, int power)
{
    const Site row[1] = {x};
    const Site col[1] = {y};
    return submatrix(s, z, row, col, power, Backend::serial)(0, 0);
}

ComplexMatrix green_matrix(const SpectralData& s, cplx z, int power, Backend backend)
{
    const std::vector<Site> sites = all_sites(s);
    return submatrix(s, z, sites, sites, power, backend);
}

ComplexMatrix green_columns(const SpectralData& s, cplx z, std::span<const Site> sites, int power, Backend backend)
{
    const std::vector<Site> rows = all_sites(s);
    return submatrix(s, z, rows, sites, power, backend);
}

ComplexMatrix green_block(const SpectralData& s, cplx z, std::span<const Site> sites, int power, Backend backend)
{
    return submatrix(s, z, sites, sites, power, backend);
}

ComplexMatrix green_rows(const SpectralData& s, cplx z, std::span<const Site> sites, int power, Backend backend)
{
    const std::vector<Site> cols = all_sites(s);
    return submatrix(s, z, sites, cols, power, backend);
}

} // namespace resolvent::kernels
