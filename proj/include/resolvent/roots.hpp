#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "resolvent/bath.hpp"

namespace resolvent {

struct RootOptions {
    int grid_points = 512;   ///< uniform scan inside each search interval
    double tolerance = 1e-12; ///< absolute bisection width
    int edge_probes = 48;    ///< geometric probes towards a singular endpoint
};

/// Open search interval. A singular endpoint is a bath eigenvalue where the function
/// may diverge; it is approached by geometric probing instead of being evaluated.
struct SearchInterval {
    double lower;
    double upper;
    bool lower_singular;
    bool upper_singular;
};

/// Root of a strictly increasing function on an open interval, or nullopt when the
/// function keeps one sign. PoleError thrown during evaluation counts as -inf near
/// the lower end and +inf near the upper end.
std::optional<double> find_increasing_root(const std::function<double(double)>& f, const SearchInterval& interval,
                                           const RootOptions& options = {});

/// Gap intervals of `bands` turned into finite search intervals; the semi-infinite
/// tails are cut at lower_bound / upper_bound (which the caller derives from a bound
/// on where roots can lie).
std::vector<SearchInterval> gap_search_intervals(const BandStructure& bands, double lower_bound, double upper_bound);

} // namespace resolvent
