#include <doctest.h>

#include <vector>

#include "resolvent/bath.hpp"
#include "resolvent/errors.hpp"
#include "resolvent/kernels.hpp"
#include "test_support.hpp"

using namespace resolvent;
using namespace testing_support;
using kernels::Backend;

TEST_CASE("openmp kernels agree with the serial reference")
{
    std::mt19937_64 rng(3);
    for (std::size_t n : {1u, 7u, 64u, 300u}) {
        const SpectralData s = diagonalize_bath(random_bath(rng, n));
        const cplx z = random_z(rng, s.min_energy(), s.max_energy());
        std::vector<Site> sites{0, n / 2, n - 1};
        if (n == 1) {
            sites = {0};
        }
        for (int power : {1, 2}) {
            const ComplexMatrix a = kernels::green_matrix(s, z, power, Backend::serial);
            const ComplexMatrix b = kernels::green_matrix(s, z, power, Backend::openmp);
            CHECK(max_abs(a - b) <= 1e-13 * max_abs(a));
            CHECK(max_abs(kernels::green_columns(s, z, sites, power, Backend::serial) -
                          kernels::green_columns(s, z, sites, power, Backend::openmp)) <= 1e-13 * max_abs(a));
            CHECK(max_abs(kernels::green_rows(s, z, sites, power, Backend::serial) -
                          kernels::green_rows(s, z, sites, power, Backend::openmp)) <= 1e-13 * max_abs(a));
            CHECK(max_abs(kernels::green_block(s, z, sites, power, Backend::serial) -
                          kernels::green_block(s, z, sites, power, Backend::openmp)) <= 1e-13 * max_abs(a));
            CHECK(std::abs(kernels::green_entry(s, z, sites.front(), sites.back(), power) -
                           a(static_cast<Eigen::Index>(sites.front()), static_cast<Eigen::Index>(sites.back()))) <=
                  1e-13 * max_abs(a));
        }
    }
}

TEST_CASE("real-axis 0/0 rule in both backends")
{
    const SpectralData s = diagonalize_bath(build_uniform_chain(3, 0.0, 1.0));
    const Site centre[1] = {1};
    for (Backend backend : {Backend::serial, Backend::openmp}) {
        const ComplexMatrix col = kernels::green_columns(s, 0.0, centre, 1, backend);
        CHECK(std::abs(col(0, 0) + 0.5) < 1e-15);
        CHECK(std::abs(col(1, 0)) < 1e-15);
        CHECK(std::abs(col(2, 0) + 0.5) < 1e-15);
        CHECK_THROWS_AS(kernels::green_matrix(s, 0.0, 1, backend), PoleError);
    }
    const Site outside[1] = {3};
    CHECK_THROWS_AS(kernels::green_columns(s, cplx(0.0, 1.0), outside, 1), std::out_of_range);
}
