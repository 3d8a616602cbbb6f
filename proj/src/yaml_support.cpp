#include "yaml_support.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

namespace resolvent::detail {

YAML::Node load_document(std::string_view text, const std::string& source)
{
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0, source);
    }
}

double as_real(const YAML::Node& node, const std::string& what, const std::string& source)
{
    if (!node.IsScalar()) {
        fail(node, what + " must be a real number", source);
    }
    try {
        const double value = node.as<double>();
        if (!std::isfinite(value)) {
            fail(node, what + " must be finite", source);
        }
        return value;
    } catch (const YAML::BadConversion&) {
        fail(node, what + " must be a real number, got '" + node.Scalar() + "'", source);
    }
}

long as_integer(const YAML::Node& node, const std::string& what, const std::string& source)
{
    if (!node.IsScalar()) {
        fail(node, what + " must be an integer", source);
    }
    try {
        return node.as<long>();
    } catch (const YAML::BadConversion&) {
        fail(node, what + " must be an integer, got '" + node.Scalar() + "'", source);
    }
}

std::string as_string(const YAML::Node& node, const std::string& what, const std::string& source)
{
    if (!node.IsScalar()) {
        fail(node, what + " must be a string", source);
    }
    return node.Scalar();
}

void require_known_keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const std::string& context,
                        const std::string& source)
{
    for (const auto& entry : map) {
        const std::string key = entry.first.Scalar();
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
        if (!known) {
            fail(entry.first, "unknown key '" + key + "' in " + context, source);
        }
    }
}

BathSpec parse_bath_fields(const YAML::Node& map, const std::string& source)
{
    const YAML::Node n_node = map["n_sites"];
    if (!n_node) {
        fail(map, "missing key 'n_sites'", source);
    }
    const long n = as_integer(n_node, "n_sites", source);
    if (n < 1) {
        fail(n_node, "n_sites must be positive", source);
    }
    const auto n_sites = static_cast<std::size_t>(n);

    const YAML::Node f_node = map["frequencies"];
    if (!f_node) {
        fail(map, "missing key 'frequencies'", source);
    }
    std::vector<double> frequencies;
    if (f_node.IsScalar()) {
        frequencies.assign(n_sites, as_real(f_node, "frequencies", source));
    } else if (f_node.IsSequence()) {
        if (f_node.size() != n_sites) {
            fail(f_node,
                 "frequencies has " + std::to_string(f_node.size()) + " entries, expected " + std::to_string(n_sites),
                 source);
        }
        for (const auto& v : f_node) {
            frequencies.push_back(as_real(v, "frequency", source));
        }
    } else {
        fail(f_node, "frequencies must be a list of reals or a single real", source);
    }

    std::vector<Hopping> hoppings;
    std::set<std::pair<Site, Site>> seen;
    if (const YAML::Node h_node = map["hoppings"]) {
        if (!h_node.IsSequence()) {
            fail(h_node, "hoppings must be a list of [x, x', re, im] quadruples", source);
        }
        for (const auto& edge : h_node) {
            if (!edge.IsSequence() || edge.size() != 4) {
                fail(edge, "hopping must be a quadruple [x, x', re, im]", source);
            }
            const long a = as_integer(edge[0], "hopping site", source);
            const long b = as_integer(edge[1], "hopping site", source);
            const double re = as_real(edge[2], "hopping real part", source);
            const double im = as_real(edge[3], "hopping imaginary part", source);
            if (a < 0 || b < 0 || a >= n || b >= n) {
                fail(edge, "hopping index out of range [0, " + std::to_string(n) + ")", source);
            }
            if (a == b) {
                fail(edge, "self-loop; use frequencies", source);
            }
            const std::pair<Site, Site> key{static_cast<Site>(std::min(a, b)), static_cast<Site>(std::max(a, b))};
            if (!seen.insert(key).second) {
                fail(edge, "duplicate edge between sites " + std::to_string(key.first) + " and " +
                               std::to_string(key.second),
                     source);
            }
            hoppings.push_back({static_cast<Site>(a), static_cast<Site>(b), cplx(re, im)});
        }
    }
    return BathSpec(std::move(frequencies), std::move(hoppings));
}

} // namespace resolvent::detail
