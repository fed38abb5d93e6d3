#pragma once

#include "grasp/planner.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace grasp {

inline constexpr int kResultsSchemaVersion = 1;

struct RunInputs {
  std::string object;
  std::string hand;  // "builtin:default" for the bundled model
};

/// Deterministic results document: depends only on inputs, config, and the
/// planner output, never on timing.
std::string results_to_json(const std::vector<GraspResult>& results, const PlannerConfig& cfg,
                            const RunInputs& inputs);

/// Run manifest: config snapshot, code version, and wall-clock timings.
std::string manifest_to_json(const std::vector<GraspResult>& results, const PlannerConfig& cfg,
                             const RunInputs& inputs, const std::string& results_path,
                             double total_wall_time_s);

class ResultsFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Subset of a results document needed to replay traces.
struct ResultsSummary {
  struct Grasp {
    std::size_t sample_index = 0;
    bool accepted = false;
    bool collision_free = false;
    double e_quality = 0.0;
    double e_penalty = 0.0;
    std::vector<TraceEntry> trace;
  };
  std::vector<Grasp> grasps;
};

/// Throws ResultsFormatError naming the offending field.
ResultsSummary parse_results(const std::string& json_text);
ResultsSummary load_results(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

const char* code_version();

}  // namespace grasp
