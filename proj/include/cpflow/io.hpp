#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "cpflow/complex.hpp"
#include "cpflow/flow.hpp"
#include "cpflow/obstructions.hpp"
#include "cpflow/packing.hpp"

namespace cpflow::io
{

inline constexpr int kFormatVersion = 1;

/**
 * Surface file (JSON):
 *
 *   {
 *     "format": 1,
 *     "background": "euclidean" | "hyperbolic",
 *     "faces": [[i, j, k], ...],
 *     "inversive": 0.5                                   // every edge, or
 *     "inversive": [{"edge": [i, j], "value": v}, ...],  // per edge
 *     "inversive_default": 0.0,                          // optional, fills unlisted edges
 *     "allow_negative_inversive": false,                 // optional
 *     "radii": [r_0, ..., r_{N-1}]                       // optional
 *   }
 *
 * Unknown fields, duplicate edges, and edges absent from the complex are
 * errors; with a list and no default every edge must be listed.
 */
struct SurfaceFile {
    SurfaceComplex complex;
    Background background{Background::hyperbolic};
    InversiveDistances inversive;
    std::optional<Eigen::VectorXd> radii;
    bool allow_negative_inversive{false};

    /** Validated metric; throws ParseError if radii are missing. */
    PackingMetric metric() const;
};

/** Throws ParseError (message names the offending field) or a complex/metric error. */
SurfaceFile parse_surface(const nlohmann::json& doc);
SurfaceFile load_surface(const std::filesystem::path& path);

/** Canonical form: per-edge inversive list in edge order, radii included if present. */
nlohmann::json surface_to_json(const SurfaceFile& surface);
void save_surface(const std::filesystem::path& path, const SurfaceFile& surface);

/** {"format": 1, "target": [K_0, ...]} */
Eigen::VectorXd parse_target(const nlohmann::json& doc, std::size_t vertex_count);
Eigen::VectorXd load_target(const std::filesystem::path& path, std::size_t vertex_count);
nlohmann::json target_to_json(const Eigen::VectorXd& target);

/** {"format": 1, "subsets": [[v, ...], ...]} */
std::vector<std::vector<VertexId>> load_subsets(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/** Header of the trace CSV: t, u0..u{N-1}, K0..K{N-1}, M, m, potential. */
std::vector<std::string> trace_columns(std::size_t vertex_count);

/** One row per sample, doubles printed with 17 significant digits. */
void write_trace_csv(std::ostream& out, const std::vector<FlowSample>& trace,
                     std::size_t vertex_count);
nlohmann::json trace_to_json(const std::vector<FlowSample>& trace, std::size_t vertex_count);

nlohmann::json obstruction_report_to_json(const ObstructionReport& report);

/** Hex SHA-256 of a file's bytes. */
std::string sha256_file(const std::filesystem::path& path);

}  // namespace cpflow::io
