#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmeobst/field.hpp"
#include "pmeobst/grid.hpp"
#include "pmeobst/obstacle.hpp"

namespace pmeobst {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

/// FNV-1a 64-bit hash of a string, hex-encoded. Used to stamp outputs with
/// the hash of their canonical config document.
std::string fnv1a_hex(const std::string& s);

nlohmann::json grid_to_json(const SpaceTimeGrid& grid);
SpaceTimeGrid grid_from_json(const nlohmann::json& j);

/// Field CSV with header (x..., t, u), rows ordered by time level then
/// flattened spatial index. Values use shortest round-trip formatting.
void write_field_csv(const ScalarField& f, const std::filesystem::path& path);
/// Metadata sidecar: grid, value range, config hash, version.
void write_meta_json(const ScalarField& f, const std::filesystem::path& path,
                     const std::string& config_hash,
                     const nlohmann::json& extra = {});
/// Reads a field back from field.csv plus its meta.json sidecar.
ScalarField read_field_csv(const std::filesystem::path& csv_path);

/// Box list CSV: level, box_id, lo..., hi..., t_start_index.
void write_boxes_csv(const std::vector<EnumeratedBox>& boxes, int dim,
                     const std::filesystem::path& path);

/// Trace CSV: one row per box solve.
void write_trace_csv(const IterationTrace& trace, int dim,
                     const std::filesystem::path& path);

nlohmann::json trace_summary_json(const IterationTrace& trace);

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace pmeobst
