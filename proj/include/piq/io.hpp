#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "piq/dataset.hpp"
#include "piq/model_selection.hpp"
#include "piq/simulate.hpp"
#include "piq/solvers.hpp"

namespace piq {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// FNV-1a 64-bit content hash (input digests in run manifests).
std::uint64_t fnv1a64(const std::string& bytes);

/// Strict CSV ingestion: optional header row (detected when the first row has
/// any non-numeric cell), one column designated as the response by name or
/// 0-based index, every remaining cell numeric. Parse failures report
/// 1-based row/column coordinates.
Dataset read_csv(const std::string& path, const std::string& response);

Dataset parse_csv(const std::string& content, const std::string& response,
                  const std::string& origin = "<memory>");

/// Reproducibility header embedded in every output file. Timing is excluded
/// from the identity fields so reruns with equal inputs are byte-identical;
/// it is emitted separately.
struct RunManifest {
    std::string command;
    std::string config_json; // canonical snapshot of flags/config
    std::uint64_t seed = 0;
    std::string version = kLibraryVersion;
    std::uint64_t input_digest = 0;
    double wall_clock_seconds = 0.0;

    std::string to_json_line(bool include_timing) const;
};

/// Line-oriented JSON record for a fitted estimate (manifest line followed by
/// the estimate line).
std::string estimate_to_jsonl(const Estimate& estimate, const RunManifest& manifest,
                              bool include_timing);

std::string tune_to_csv(const TuneResult& result);

std::string replication_table_to_csv(const ReplicationTable& table,
                                     const std::string& label, bool include_timing);

} // namespace piq
