#pragma once

// Result serialization. JSON output is canonical: keys sorted, two-space
// indent, every floating value printed with 17 significant digits, so equal
// results give byte-identical files.

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "siftshadow/errors.hpp"
#include "siftshadow/natural_extension.hpp"
#include "siftshadow/repeller.hpp"
#include "siftshadow/shadowing.hpp"
#include "siftshadow/strings.hpp"
#include "siftshadow/version.hpp"

namespace siftshadow {

using json = nlohmann::json;

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // keep it a float on read-back
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline void dump_canonical(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        dump_canonical(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump_canonical(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string canonical_dump(const json& j) {
  std::string out;
  detail::dump_canonical(j, out, 0);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// to_json

inline json to_json(const ShadowingConfig& c) {
  return {{"lambda", c.lambda},
          {"epsilon", c.epsilon},
          {"tau", c.tau},
          {"gamma", c.gamma},
          {"eps_contraction", c.eps_contraction},
          {"eps1", c.eps1},
          {"sigma", c.sigma},
          {"r", c.r},
          {"delta", c.delta},
          {"lipschitz_bound", c.lipschitz_bound},
          {"tol_fix", c.tol_fix},
          {"max_iter", c.max_iter}};
}

inline json to_json(const ShadowResult& r, const ShadowingConfig& cfg) {
  json j = {{"point", r.point},
            {"shadow_distance", r.shadow_distance},
            {"suffix_min_average", r.suffix_min_average},
            {"orbit", r.orbit},
            {"defect", r.defect},
            {"iterations", r.solve.iterations},
            {"residual", r.solve.residual},
            {"config_echo", to_json(cfg)}};
  j["period"] = r.period ? json(*r.period) : json(nullptr);
  return j;
}

inline json to_json(const SiftResult& s) {
  return {{"indices", s.indices},
          {"gamma", s.gamma},
          {"gamma_prime", s.gamma_prime},
          {"pliss_constant", s.pliss_constant},
          {"pliss_threshold", s.pliss_threshold}};
}

inline json to_json(const RepellerSearchReport& r) {
  json reps = json::array();
  for (const auto& x : r.repellers) {
    json e = to_json(x.result, r.config);
    e.erase("config_echo");
    e["indicator"] = x.indicator;
    e["hausdorff"] = x.hausdorff;
    e["n_prime"] = x.pair.n1;
    e["n_double_prime"] = x.pair.n2;
    e["gap"] = x.pair.gap;
    reps.push_back(std::move(e));
  }
  json pairs = json::array();
  for (const auto& p : r.pairs) pairs.push_back({{"n_prime", p.n1}, {"n_double_prime", p.n2}, {"gap", p.gap}});
  return {{"seed_point", r.seed_point},
          {"horizon", r.horizon},
          {"gammas", {r.gammas.gamma, r.gammas.gamma_prime, r.gammas.gamma_double_prime}},
          {"power", r.power},
          {"sifted", r.sifted},
          {"candidate_pairs", r.candidate_pairs},
          {"pairs", pairs},
          {"repellers", reps},
          {"hausdorff_trace", r.hausdorff_trace},
          {"shadowing", to_json(r.config)}};
}

inline json to_json(const ExpansionFit& f) {
  return {{"C", f.C},
          {"lambda", f.lambda},
          {"expanding", f.expanding},
          {"diagnostic", f.diagnostic},
          {"grid_size", f.grid_size},
          {"k_max", f.k_max},
          {"points", f.points}};
}

inline json to_json(const AbnormalVerdict& v) {
  return {{"mean_below", v.mean_below},
          {"suffixes_above", v.suffixes_above},
          {"abnormal", v.abnormal()},
          {"mean", v.mean},
          {"min_suffix", v.min_suffix}};
}

inline json to_json(const ExponentEstimate& e) {
  return {{"value", e.value},
          {"horizon", e.horizon},
          {"scheme", to_string(e.scheme)},
          {"limsup_proxy", e.limsup_proxy}};
}

/// One row per repeller: period, point, indicator, shadow_distance, hausdorff.
inline std::string repellers_csv(const RepellerSearchReport& r) {
  std::string out = "period,point,indicator,shadow_distance,hausdorff\n";
  for (const auto& x : r.repellers) {
    out += std::to_string(*x.result.period) + "," + format_double(x.result.point) + "," +
           format_double(x.indicator) + "," + format_double(x.result.shadow_distance) + "," +
           format_double(x.hausdorff) + "\n";
  }
  return out;
}

/// Wraps a result with the run metadata every report carries.
inline json make_report(const std::string& command, const json& config, json result) {
  return {{"command", command}, {"version", kVersion}, {"config", config}, {"result", std::move(result)}};
}

// ---------------------------------------------------------------------------
// compare

struct CompareTolerances {
  double default_tol = 1e-9;
  std::map<std::string, double> per_field;  // keyed by the leaf field name

  double for_field(const std::string& key) const {
    auto it = per_field.find(key);
    return it == per_field.end() ? default_tol : it->second;
  }
};

struct DiffEntry {
  std::string path;
  std::string a;
  std::string b;
};

namespace detail {

inline std::string short_dump(const json& j) {
  return j.is_number_float() ? format_double(j.get<double>()) : j.dump();
}

inline void diff_rec(const json& a, const json& b, const std::string& path, const std::string& key,
                     const CompareTolerances& tol, std::vector<DiffEntry>& out) {
  if (a.is_number() && b.is_number()) {
    if (a.is_number_float() || b.is_number_float()) {
      const double x = a.get<double>(), y = b.get<double>();
      if (!(std::abs(x - y) <= tol.for_field(key))) out.push_back({path, short_dump(a), short_dump(b)});
    } else if (a != b) {
      out.push_back({path, a.dump(), b.dump()});
    }
    return;
  }
  if (a.type() != b.type()) {
    if (a.is_null() || b.is_null()) {
      out.push_back({path, short_dump(a), short_dump(b)});
      return;
    }
    throw BadParameters("schema mismatch at " + path);
  }
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      const std::string p = path + "/" + it.key();
      if (!b.contains(it.key())) throw BadParameters("schema mismatch: " + p + " missing in second report");
      diff_rec(it.value(), b[it.key()], p, it.key(), tol, out);
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!a.contains(it.key()))
        throw BadParameters("schema mismatch: " + path + "/" + it.key() + " missing in first report");
    return;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      out.push_back({path + "#length", std::to_string(a.size()), std::to_string(b.size())});
    }
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
      diff_rec(a[i], b[i], path + "/" + std::to_string(i), key, tol, out);
    return;
  }
  if (a != b) out.push_back({path, a.dump(), b.dump()});
}

}  // namespace detail

/// Field-by-field differences beyond tolerance. Throws BadParameters when
/// the two reports do not share a schema (different commands or fields).
inline std::vector<DiffEntry> compare_reports(const json& a, const json& b,
                                              const CompareTolerances& tol = {}) {
  if (!a.is_object() || !b.is_object() || !a.contains("command") || !b.contains("command"))
    throw BadParameters("not a report");
  if (a["command"] != b["command"]) throw BadParameters("schema mismatch: reports come from different commands");
  std::vector<DiffEntry> out;
  detail::diff_rec(a, b, "", "", tol, out);
  return out;
}

}  // namespace siftshadow
