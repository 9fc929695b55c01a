#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pointmotion/cloud.hpp"
#include "pointmotion/interp.hpp"
#include "pointmotion/objective.hpp"
#include "pointmotion/retarget.hpp"
#include "pointmotion/skeleton.hpp"

namespace pointmotion {

/// Parse or write failure; carries "path:line: message" where available.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// All file numerics are serialized with 17 significant digits so 64-bit
/// values round-trip bit-exactly.
std::string format_double(double v);

// Versioned line-based text formats; grammars are documented in the README.
void save_skeleton(const Skeleton& s, const std::string& path);
Skeleton load_skeleton(const std::string& path);

void save_motion(const MotionSequence& m, const std::string& path,
                 const std::string& skeleton_id = "-");
MotionSequence load_motion(const std::string& path, std::string* skeleton_id = nullptr);

void save_cloud_spec(const CloudSpec& spec, const std::string& path);
CloudSpec load_cloud_spec(const std::string& path);

void save_cloud_trajectory(const CloudTrajectory& traj, const std::string& path);

/// Line-delimited JSON records (iteration, losses, total, reassigned).
void write_trace(const RetargetTrace& trace, const std::string& path);

/// Line-delimited JSON training samples.
void write_training_samples(const std::vector<TrainingSample>& samples, const std::string& path);
std::vector<TrainingSample> read_training_samples(const std::string& path);

/// JSON renderings for CLI output. The KNN values also carry the x100
/// display convention used for reporting.
std::string report_to_json(const ObjectiveBreakdown& breakdown);
std::string report_to_json(const MetricReport& report);
std::string report_to_json(const ValidationReport& report);

}  // namespace pointmotion
