#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dredge/ddmin.hpp"

namespace dredge {

/// Persisted trace schema: one JSON document per sample, tokens listed by
/// original index plus lexeme. Round-trips exactly through
/// trace_from_json(trace_to_json(t)).
nlohmann::ordered_json trace_to_json(const ReductionTrace& trace);
ReductionTrace trace_from_json(const nlohmann::json& doc);

void write_trace(const std::filesystem::path& path,
                 const ReductionTrace& trace);
ReductionTrace read_trace(const std::filesystem::path& path);

/// Loads every *.json trace under `dir`, sorted by source_id.
std::vector<ReductionTrace> read_trace_dir(const std::filesystem::path& dir);

}  // namespace dredge
