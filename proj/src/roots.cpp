#include "resolvent/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "resolvent/errors.hpp"

namespace resolvent {
namespace {

double guarded(const std::function<double(double)>& f, double x, const SearchInterval& iv)
{
    try {
        return f(x);
    } catch (const PoleError&) {
        const double inf = std::numeric_limits<double>::infinity();
        return (x - iv.lower) < (iv.upper - x) ? -inf : inf;
    }
}

// Closer than this to a pole the kernels refuse to evaluate (and a block of
// several sites may refuse even when the probed branch itself stays finite).
double edge_floor(double edge) { return 1e-11 * std::max(1.0, std::abs(edge)); }

double bisect(const std::function<double(double)>& f, double lo, double hi, const SearchInterval& iv,
              double tolerance)
{
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double value = guarded(f, mid, iv);
        if (value == 0.0) {
            return mid;
        }
        if (value < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::optional<double> find_increasing_root(const std::function<double(double)>& f, const SearchInterval& iv,
                                           const RootOptions& options)
{
    if (!(iv.upper > iv.lower)) {
        return std::nullopt;
    }
    const int n = options.grid_points > 0 ? options.grid_points : 1;
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n) + 2);
    if (!iv.lower_singular) {
        xs.push_back(iv.lower);
    }
    const double step = (iv.upper - iv.lower) / (n + 1);
    for (int j = 1; j <= n; ++j) {
        xs.push_back(iv.lower + step * j);
    }
    if (!iv.upper_singular) {
        xs.push_back(iv.upper);
    }

    std::size_t first_nonnegative = xs.size();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double value = guarded(f, xs[i], iv);
        if (value == 0.0) {
            return xs[i];
        }
        if (value > 0.0) {
            first_nonnegative = i;
            break;
        }
    }

    if (first_nonnegative == 0) {
        if (!iv.lower_singular) {
            return std::nullopt;
        }
        // Everything sampled is positive: the root, if any, hides next to the lower pole.
        double outer = xs.front();
        for (int m = 1; m <= options.edge_probes; ++m) {
            const double probe = iv.lower + (xs.front() - iv.lower) * std::ldexp(1.0, -m);
            if (probe - iv.lower < edge_floor(iv.lower)) {
                break;
            }
            const double value = guarded(f, probe, iv);
            if (value == 0.0) {
                return probe;
            }
            if (value < 0.0) {
                return bisect(f, probe, outer, iv, options.tolerance);
            }
            outer = probe;
        }
        return std::nullopt;
    }

    if (first_nonnegative == xs.size()) {
        if (!iv.upper_singular) {
            return std::nullopt;
        }
        double inner = xs.back();
        for (int m = 1; m <= options.edge_probes; ++m) {
            const double probe = iv.upper - (iv.upper - xs.back()) * std::ldexp(1.0, -m);
            if (iv.upper - probe < edge_floor(iv.upper)) {
                break;
            }
            const double value = guarded(f, probe, iv);
            if (value == 0.0) {
                return probe;
            }
            if (value > 0.0) {
                return bisect(f, inner, probe, iv, options.tolerance);
            }
            inner = probe;
        }
        return std::nullopt;
    }

    return bisect(f, xs[first_nonnegative - 1], xs[first_nonnegative], iv, options.tolerance);
}

std::vector<SearchInterval> gap_search_intervals(const BandStructure& bands, double lower_bound, double upper_bound)
{
    std::vector<SearchInterval> out;
    for (const Interval& gap : bands.gaps) {
        SearchInterval iv{gap.lower, gap.upper, true, true};
        if (!std::isfinite(gap.lower)) {
            iv.lower = std::min(lower_bound, gap.upper - 1.0);
            iv.lower_singular = false;
        }
        if (!std::isfinite(gap.upper)) {
            iv.upper = std::max(upper_bound, gap.lower + 1.0);
            iv.upper_singular = false;
        }
        out.push_back(iv);
    }
    return out;
}

} // namespace resolvent
