#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pwts/errors.hpp"
#include "pwts/grid_search.hpp"

namespace pwts {

using nlohmann::json;

/// Infinite qualities are written as the string "inf".
inline json quality_to_json(double q) { return std::isfinite(q) ? json(q) : json("inf"); }

inline double quality_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw ConfigError("quality must be a number or \"inf\"");
  return j.get<double>();
}

inline const char* to_string(OverlapRule rule) { return rule == OverlapRule::EitherRow ? "either" : "both"; }

inline OverlapRule parse_overlap_rule(const std::string& s) {
  if (s == "either") return OverlapRule::EitherRow;
  if (s == "both") return OverlapRule::BothRows;
  throw ConfigError("overlap rule must be \"either\" or \"both\", got \"" + s + "\"");
}

/// Thread count is left out on purpose: it never changes results, and the document
/// should be byte-identical across worker counts.
inline json config_to_json(const GridConfig& cfg) {
  return json{{"scaleSteps", cfg.scale_steps},
              {"precisionSteps", cfg.precision_steps},
              {"parsimonySteps", cfg.parsimony_steps},
              {"axes", cfg.axes},
              {"subsetSize", cfg.subset_size},
              {"budget", cfg.budget},
              {"seed", cfg.seed},
              {"overlapRule", to_string(cfg.rule)}};
}

namespace detail {

template <class T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

/// Applies the keys present in `j` on top of `base`. Unknown keys are rejected.
inline GridConfig config_from_json(const json& j, GridConfig base = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "scaleSteps") base.scale_steps = detail::field<std::vector<double>>(j, "scaleSteps");
    else if (key == "precisionSteps") base.precision_steps = detail::field<std::vector<std::size_t>>(j, "precisionSteps");
    else if (key == "parsimonySteps") base.parsimony_steps = detail::field<std::vector<double>>(j, "parsimonySteps");
    else if (key == "axes") base.axes = detail::field<std::vector<std::size_t>>(j, "axes");
    else if (key == "subsetSize") base.subset_size = detail::field<std::size_t>(j, "subsetSize");
    else if (key == "budget") base.budget = detail::field<std::size_t>(j, "budget");
    else if (key == "seed") base.seed = detail::field<std::uint64_t>(j, "seed");
    else if (key == "threads") base.threads = detail::field<std::size_t>(j, "threads");
    else if (key == "overlapRule") base.rule = parse_overlap_rule(detail::field<std::string>(j, "overlapRule"));
    else throw ConfigError("unknown config field '" + key + "'");
  }
  return base;
}

inline json params_to_json(const HyperParams& p) {
  return json{{"axis", p.axis}, {"scale", p.scale}, {"precision", p.precision}, {"parsimony", p.parsimony}};
}

inline json affinity_to_json(const AffinityMatrix& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.size(); ++j) row.push_back(a.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json fit_to_json(const ClusterFit& f) {
  return json{{"clusterId", f.cluster_id},
              {"coeffs", f.plane.slopes},
              {"intercept", f.plane.intercept},
              {"normalizedCoeffs", f.plane_normalized.slopes},
              {"normalizedIntercept", f.plane_normalized.intercept},
              {"members", f.member_count},
              {"slopesDefined", f.slopes_defined},
              {"qualityContribution", f.quality()}};
}

inline json cell_to_json(const CellResult& c, bool with_affinity) {
  json j = params_to_json(c.params);
  j["quality"] = quality_to_json(c.quality);
  j["feasible"] = c.feasible;
  j["clusters"] = c.cluster_count();
  j["labels"] = c.clustering.labels;
  j["displayOrder"] = c.clustering.display_order;
  j["subsetSize"] = c.subset_size;
  j["candidates"] = c.candidate_count;
  j["sampled"] = c.sampled;
  json fits = json::array();
  for (const auto& f : c.fit.fits) fits.push_back(fit_to_json(f));
  j["fits"] = std::move(fits);
  if (with_affinity) j["affinity"] = c.affinity ? affinity_to_json(*c.affinity) : json(nullptr);
  return j;
}

struct JsonOptions {
  /// Embed each cell's affinity matrix.
  bool with_affinity = false;
};

inline json result_to_json(const AnalysisResult& r, const JsonOptions& opt = {}) {
  json j;
  j["config"] = config_to_json(r.config);
  json cells = json::array();
  for (const auto& c : r.cells) cells.push_back(cell_to_json(c, opt.with_affinity));
  j["cells"] = std::move(cells);
  const CellResult& best = r.best_cell();
  json b = params_to_json(best.params);
  b["index"] = r.best;
  b["quality"] = quality_to_json(best.quality);
  b["clusters"] = best.cluster_count();
  j["best"] = std::move(b);
  json maps = json::array();
  for (const auto& h : r.heatmaps) {
    json values = json::array();
    for (const auto& row : h.values) {
      json jr = json::array();
      for (double q : row) jr.push_back(quality_to_json(q));
      values.push_back(std::move(jr));
    }
    maps.push_back(json{{"axis", h.axis},
                        {"parsimony", h.parsimony},
                        {"rows", "scale"},
                        {"cols", "precision"},
                        {"rowValues", r.config.scale_steps},
                        {"colValues", r.config.precision_steps},
                        {"values", std::move(values)}});
  }
  j["heatmaps"] = std::move(maps);
  return j;
}

/// Pretty-printed document with a trailing newline.
inline std::string dump_result(const AnalysisResult& r, const JsonOptions& opt = {}) {
  return result_to_json(r, opt).dump(2) + "\n";
}

inline std::string format_quality(double q) {
  if (!std::isfinite(q)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", q);
  return buf;
}

/// Text grid of one (axis, parsimony) pane: rows are scale steps, columns precision steps.
/// The best cell shows "XXX" when it lies in the pane.
inline std::string render_heatmap(const json& result, std::size_t axis, double parsimony) {
  try {
    const json* pane = nullptr;
    for (const auto& h : result.at("heatmaps"))
      if (h.at("axis").get<std::size_t>() == axis && h.at("parsimony").get<double>() == parsimony) pane = &h;
    if (!pane) {
      std::ostringstream msg;
      msg << "no heatmap pane for axis " << axis << " and parsimony " << parsimony;
      throw ConfigError(msg.str());
    }
    const auto scales = pane->at("rowValues").get<std::vector<double>>();
    const auto bins = pane->at("colValues").get<std::vector<std::size_t>>();
    const json& values = pane->at("values");
    const json& best = result.at("best");
    const bool best_here =
        best.at("axis").get<std::size_t>() == axis && best.at("parsimony").get<double>() == parsimony;

    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header{"scale\\precision"};
    for (std::size_t b : bins) header.push_back(std::to_string(b));
    grid.push_back(header);
    for (std::size_t r = 0; r < scales.size(); ++r) {
      std::vector<std::string> row;
      {
        std::ostringstream s;
        s << scales[r];
        row.push_back(s.str());
      }
      for (std::size_t c = 0; c < bins.size(); ++c) {
        const bool is_best = best_here && best.at("scale").get<double>() == scales[r] &&
                             best.at("precision").get<std::size_t>() == bins[c];
        row.push_back(is_best ? "XXX" : format_quality(quality_from_json(values.at(r).at(c))));
      }
      grid.push_back(std::move(row));
    }
    std::vector<std::size_t> width(grid.front().size(), 0);
    for (const auto& row : grid)
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    std::string out;
    for (const auto& row : grid) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += "  ";
        out += std::string(width[c] - row[c].size(), ' ') + row[c];
      }
      out += '\n';
    }
    return out;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed results document: ") + e.what());
  }
}

}  // namespace pwts
