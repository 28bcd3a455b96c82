#pragma once

// Map systems by name: "doubling", "perturbed_doubling(0.05)",
// "neutral_fixed(0.5)", "pl_tent(3,1.5)", "bm_cocycle(2,2)", "identity".

#include <cctype>
#include <cstdlib>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "siftshadow/circle_map.hpp"
#include "siftshadow/cocycle.hpp"
#include "siftshadow/errors.hpp"

namespace siftshadow {

using AnySystem = std::variant<CircleMap, MatrixCocycle>;

/// Splits "name(p1,p2)" into the name and its numeric parameters.
inline MapDescriptor parse_map_spec(std::string_view spec) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  spec = trim(spec);
  MapDescriptor d;
  const auto open = spec.find('(');
  if (open == std::string_view::npos) {
    d.name = std::string(spec);
  } else {
    if (spec.back() != ')') throw BadParameters("map spec '" + std::string(spec) + "' lacks ')'");
    d.name = std::string(trim(spec.substr(0, open)));
    std::string_view body = spec.substr(open + 1, spec.size() - open - 2);
    while (!trim(body).empty()) {
      const auto comma = body.find(',');
      const std::string tok(trim(body.substr(0, comma)));
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (tok.empty() || end != tok.c_str() + tok.size())
        throw BadParameters("bad map parameter '" + tok + "'");
      d.params.push_back(v);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
  }
  if (d.name.empty()) throw BadParameters("empty map name");
  return d;
}

inline AnySystem make_system(const MapDescriptor& d) {
  auto want = [&](std::size_t n) {
    if (d.params.size() != n)
      throw BadParameters("map '" + d.name + "' takes " + std::to_string(n) + " parameter(s)");
  };
  if (d.name == "doubling") return want(0), AnySystem{doubling_map()};
  if (d.name == "identity") return want(0), AnySystem{identity_map()};
  if (d.name == "perturbed_doubling") return want(1), AnySystem{perturbed_doubling_map(d.params[0])};
  if (d.name == "neutral_fixed") return want(1), AnySystem{neutral_fixed_map(d.params[0])};
  if (d.name == "pl_tent") return want(2), AnySystem{pl_tent_map(d.params[0], d.params[1])};
  if (d.name == "bm_cocycle") return want(2), AnySystem{bm_cocycle(d.params[0], d.params[1])};
  throw BadParameters("unknown map '" + d.name + "'");
}

inline AnySystem make_system(std::string_view spec) { return make_system(parse_map_spec(spec)); }

inline CircleMap make_circle_map(std::string_view spec) {
  auto s = make_system(spec);
  if (auto* f = std::get_if<CircleMap>(&s)) return *f;
  throw BadParameters("map '" + std::string(spec) + "' is not a circle map");
}

}  // namespace siftshadow
