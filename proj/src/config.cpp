#include <fstream>
#include <sstream>

#include "resolvent/cli.hpp"
#include "resolvent/errors.hpp"
#include "yaml_support.hpp"

namespace resolvent::cli {
namespace {

using detail::as_integer;
using detail::as_real;
using detail::as_string;
using detail::fail;

std::string read_file(const std::filesystem::path& path, const std::string& source, int line)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot read '" + path.string() + "'", line, source);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

std::size_t as_size(const YAML::Node& node, const std::string& what, const std::string& source)
{
    const long v = as_integer(node, what, source);
    if (v < 1) {
        fail(node, what + " must be positive", source);
    }
    return static_cast<std::size_t>(v);
}

const YAML::Node& required(const YAML::Node& map, const YAML::Node& child, const char* key, const std::string& source)
{
    if (!child) {
        fail(map, std::string("missing key '") + key + "'", source);
    }
    return child;
}

void parse_bath(const YAML::Node& node, const std::string& source, const std::filesystem::path& base_dir,
                RunConfig& cfg)
{
    if (!node.IsMap()) {
        fail(node, "bath must be a map", source);
    }
    if (const YAML::Node builder = node["builder"]) {
        const std::string name = as_string(builder, "bath.builder", source);
        if (name == "chain") {
            detail::require_known_keys(node, {"builder", "n", "omega_c", "j"}, "bath (chain builder)", source);
            const std::size_t n = as_size(required(node, node["n"], "n", source), "bath.n", source);
            const double wc = node["omega_c"] ? as_real(node["omega_c"], "bath.omega_c", source) : 0.0;
            const double j = node["j"] ? as_real(node["j"], "bath.j", source) : 1.0;
            cfg.bath = build_uniform_chain(n, wc, j);
        } else if (name == "ssh") {
            detail::require_known_keys(node, {"builder", "n_cells", "omega_c", "j1", "j2"}, "bath (ssh builder)",
                                       source);
            const std::size_t cells =
                as_size(required(node, node["n_cells"], "n_cells", source), "bath.n_cells", source);
            const double wc = node["omega_c"] ? as_real(node["omega_c"], "bath.omega_c", source) : 0.0;
            const double j1 = as_real(required(node, node["j1"], "j1", source), "bath.j1", source);
            const double j2 = as_real(required(node, node["j2"], "j2", source), "bath.j2", source);
            cfg.bath = build_ssh_chain(cells, wc, j1, j2);
        } else {
            fail(builder, "unknown bath builder '" + name + "' (expected chain or ssh)", source);
        }
        cfg.energy_unit = "J";
        return;
    }
    if (const YAML::Node file = node["file"]) {
        detail::require_known_keys(node, {"file"}, "bath", source);
        std::filesystem::path path = as_string(file, "bath.file", source);
        if (path.is_relative()) {
            path = base_dir / path;
        }
        const std::string text = read_file(path, source, detail::line_of(file));
        cfg.bath = load_bath_spec(text, path.string());
        return;
    }
    detail::require_known_keys(node, {"n_sites", "frequencies", "hoppings"}, "bath", source);
    cfg.bath = detail::parse_bath_fields(node, source);
}

} // namespace

RunConfig parse_run_config(std::string_view text, const std::string& source, const std::filesystem::path& base_dir)
{
    const YAML::Node root = detail::load_document(text, source);
    if (!root.IsMap()) {
        fail(root, "run config must be a map", source);
    }
    detail::require_known_keys(root,
                               {"bath", "n_sites", "frequencies", "hoppings", "emitters", "gap_factor", "delta",
                                "tolerance", "g_sweep", "seed", "suite", "corrupt_f", "n_z"},
                               "run config", source);
    RunConfig cfg;
    cfg.source = source;

    if (const YAML::Node bath = root["bath"]) {
        if (root["n_sites"] || root["frequencies"] || root["hoppings"]) {
            fail(bath, "give the bath either under 'bath' or as top-level keys, not both", source);
        }
        parse_bath(bath, source, base_dir, cfg);
    } else if (root["n_sites"]) {
        cfg.bath = detail::parse_bath_fields(root, source);
    } else {
        fail(root, "missing bath: add a 'bath' section or top-level n_sites/frequencies/hoppings", source);
    }

    if (const YAML::Node list = root["emitters"]) {
        if (!list.IsSequence()) {
            fail(list, "emitters must be a list of {omega0, g, site}", source);
        }
        for (const YAML::Node& item : list) {
            if (!item.IsMap()) {
                fail(item, "emitter must be a map {omega0, g, site}", source);
            }
            detail::require_known_keys(item, {"omega0", "g", "site"}, "emitter", source);
            EmitterSpec e{};
            e.omega0 = as_real(required(item, item["omega0"], "omega0", source), "omega0", source);
            e.g = as_real(required(item, item["g"], "g", source), "g", source);
            const YAML::Node site = required(item, item["site"], "site", source);
            const long x = as_integer(site, "site", source);
            if (!(e.g > 0.0)) {
                fail(item["g"], "g must be positive", source);
            }
            if (x < 0 || static_cast<std::size_t>(x) >= cfg.bath.n_sites()) {
                fail(site, "site " + std::to_string(x) + " outside bath of " + std::to_string(cfg.bath.n_sites()) +
                               " sites",
                     source);
            }
            e.site = static_cast<Site>(x);
            for (const EmitterSpec& other : cfg.emitters) {
                if (other.site == e.site) {
                    fail(site, "two emitters on site " + std::to_string(x), source);
                }
                if (other.omega0 != e.omega0 || other.g != e.g) {
                    fail(item, "emitters must share omega0 and g", source);
                }
            }
            cfg.emitters.push_back(e);
        }
    }

    if (const YAML::Node n = root["gap_factor"]) {
        cfg.gap_factor = as_real(n, "gap_factor", source);
        if (!(cfg.gap_factor > 1.0)) {
            fail(n, "gap_factor must exceed 1", source);
        }
    }
    if (const YAML::Node n = root["delta"]) {
        cfg.delta = as_real(n, "delta", source);
        if (!(*cfg.delta > 0.0)) {
            fail(n, "delta must be positive", source);
        }
    }
    if (const YAML::Node n = root["tolerance"]) {
        cfg.tolerance = as_real(n, "tolerance", source);
        if (!(cfg.tolerance > 0.0)) {
            fail(n, "tolerance must be positive", source);
        }
    }
    if (const YAML::Node n = root["g_sweep"]) {
        if (!n.IsSequence()) {
            fail(n, "g_sweep must be a list of couplings", source);
        }
        for (const YAML::Node& v : n) {
            const double g = as_real(v, "g_sweep entry", source);
            if (!(g > 0.0)) {
                fail(v, "g_sweep entries must be positive", source);
            }
            cfg.g_sweep.push_back(g);
        }
    }
    if (const YAML::Node n = root["seed"]) {
        const long seed = as_integer(n, "seed", source);
        if (seed < 0) {
            fail(n, "seed must be non-negative", source);
        }
        cfg.seed = static_cast<std::uint64_t>(seed);
    }
    if (const YAML::Node n = root["suite"]) {
        cfg.suite = as_string(n, "suite", source);
        if (cfg.suite != "default" && cfg.suite != "resolvent" && cfg.suite != "bound-states" &&
            cfg.suite != "vds" && cfg.suite != "effective") {
            fail(n, "unknown suite '" + cfg.suite + "'", source);
        }
    }
    if (const YAML::Node n = root["corrupt_f"]) {
        cfg.corrupt_f = as_real(n, "corrupt_f", source);
    }
    if (const YAML::Node n = root["n_z"]) {
        cfg.n_z = static_cast<int>(as_size(n, "n_z", source));
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    const std::string text = read_file(path, path.string(), 0);
    return parse_run_config(text, path.string(), path.parent_path());
}

} // namespace resolvent::cli
