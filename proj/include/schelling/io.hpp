#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "schelling/dynamics.hpp"
#include "schelling/exact.hpp"
#include "schelling/stability.hpp"

namespace schelling {

inline constexpr const char* kToolName = "schelling";
inline constexpr const char* kToolVersion = "0.1.0";

// Strict parse: unknown fields are errors, all violations reported at once.
// Throws ParseError for malformed JSON, ValidationError for bad contents.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Fully resolved form (defaults materialized), keys in fixed order.
nlohmann::ordered_json run_config_to_json(const RunConfig& config);

nlohmann::ordered_json summary_to_json(const RunSummary& summary);
nlohmann::ordered_json trace_record_to_json(const TraceRecord& record);
nlohmann::ordered_json stable_report_to_json(const StableReport& report, const StateSpace& space,
                                             double r);
nlohmann::ordered_json sweep_to_json(const std::vector<BetaSweepEntry>& table,
                                     const TorusGrid& grid);
std::string sweep_to_csv(const std::vector<BetaSweepEntry>& table, int top_k);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
void write_trace_jsonl(const std::filesystem::path& path, const std::vector<TraceRecord>& trace);

void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    const nlohmann::ordered_json& payload);

// Binary P6 image, one pixel per cell: +1 = red (255,0,0), -1 = blue (0,0,255).
void write_ppm(const std::filesystem::path& path, const TorusGrid& grid,
               const Configuration& config);

// "1,2,4" or "geometric(start,stop,count)" with count >= 1.
std::vector<double> parse_beta_list(const std::string& text);

} // namespace schelling
