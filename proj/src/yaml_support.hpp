#pragma once

#include <initializer_list>
#include <string>

#include <yaml-cpp/yaml.h>

#include "resolvent/bath.hpp"
#include "resolvent/errors.hpp"

namespace resolvent::detail {

inline int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

[[noreturn]] inline void fail(const YAML::Node& node, const std::string& message, const std::string& source)
{
    throw ParseError(message, line_of(node), source);
}

double as_real(const YAML::Node& node, const std::string& what, const std::string& source);
long as_integer(const YAML::Node& node, const std::string& what, const std::string& source);
std::string as_string(const YAML::Node& node, const std::string& what, const std::string& source);

/// Rejects any key of `map` not listed in `allowed`.
void require_known_keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const std::string& context,
                        const std::string& source);

/// Bath-spec keys (n_sites, frequencies, hoppings) read from a map node. Other keys
/// of the map are the caller's business.
BathSpec parse_bath_fields(const YAML::Node& map, const std::string& source);

YAML::Node load_document(std::string_view text, const std::string& source);

} // namespace resolvent::detail
