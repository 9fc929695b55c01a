#pragma once

#include <limits>
#include <vector>

#include "pointmotion/cloud.hpp"
#include "pointmotion/skeleton.hpp"

namespace pointmotion {

struct KnnConfig {
    int k = 8;
    bool normalize = true;  // feed the per-term mean into the total objective
    int threads = 1;        // distance matrix rows fan out; reductions stay index-ascending
};

/// For each source point: the indices of its k nearest same-group target
/// points under the whole-sequence distance, ascending by (distance, index).
struct NeighborAssignment {
    int k = 0;
    std::vector<std::vector<int>> neighbors;
    std::vector<std::vector<double>> distances;  // snapshot at assignment time
};

struct ObjectiveWeights {
    double knn = 1.0;
    double end = 1.0;
    double q = 0.01;
};

struct ObjectiveBreakdown {
    double l_knn_raw = 0.0;         // meters * frames, summed over sources and neighbors
    double l_knn_normalized = 0.0;  // raw / (|X_A| * k * |M|)
    double l_end = 0.0;             // meters, frame-averaged, summed over pairs
    double l_q = 0.0;               // unitless
    double total = 0.0;
    bool end_effector_map_empty = false;
    ObjectiveWeights weights;
};

/// Whole-sequence distance between two point trajectories: the sum over
/// frames of the Euclidean distance, or +infinity when the body groups
/// differ. Throws on frame count mismatch.
double sequence_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                         BodyGroup group_a, BodyGroup group_b);

constexpr double kExcludedDistance = std::numeric_limits<double>::infinity();

/// Exact k-nearest selection under the whole-sequence distance, ties broken
/// by lower target index. Group filtering is hard: cross-group pairs are
/// never compared. Throws, naming the group, when some group present in x_a
/// has fewer than k target points.
NeighborAssignment knn_assign(const CloudTrajectory& x_a, const CloudTrajectory& x_b,
                              const KnnConfig& cfg);

struct KnnLossResult {
    double raw = 0.0;
    double normalized = 0.0;
};

/// Sum of whole-sequence distances from every source point to its k nearest
/// same-group target points, plus the mean-normalized variant.
KnnLossResult knn_loss(const CloudTrajectory& x_a, const CloudTrajectory& x_b,
                       const KnnConfig& cfg);

/// Same loss with the neighbor sets held fixed; distances are recomputed
/// from the current positions.
KnnLossResult knn_loss_assigned(const CloudTrajectory& x_a, const CloudTrajectory& x_b,
                                const NeighborAssignment& assignment);

/// Frame-averaged head distance summed over matched end-effector pairs.
/// An empty map yields 0 and sets *empty_map (the loss is optional).
double end_effector_loss(const Skeleton& a, const MotionSequence& ma, const Skeleton& b,
                         const MotionSequence& mb, const EndEffectorMap& map,
                         bool* empty_map = nullptr);

/// Mean over entries of (||q||_2 - 1)^2 for raw, unconstrained 4-vectors.
double unit_norm_penalty(const std::vector<Quat>& raw);

/// Free parameters of a reconstructed target motion: per-frame root
/// positions plus raw per-bone 4-vectors, normalized at FK time.
struct RetargetParams {
    std::vector<Vec3> root_positions;
    std::vector<Quat> raw_rotations;  // frame-major, not necessarily unit
    int bone_count = 0;

    int frame_count() const { return static_cast<int>(root_positions.size()); }
    Quat& raw(int frame, int bone) {
        return raw_rotations[static_cast<std::size_t>(frame) * bone_count + bone];
    }
    const Quat& raw(int frame, int bone) const {
        return raw_rotations[static_cast<std::size_t>(frame) * bone_count + bone];
    }
};

struct RetargetGradient {
    std::vector<Vec3> root_positions;
    std::vector<Quat> raw_rotations;
};

/// Everything fixed during one reconstruction job: the source cloud acting
/// as ground truth, the target skeleton with its frozen cloud spec, and the
/// matched end-effector tracks of the source motion.
struct RetargetProblem {
    CloudTrajectory source_cloud;
    Skeleton target_skeleton;
    CloudSpec target_cloud_spec;
    EndEffectorMap ee_map;
    std::vector<std::vector<Vec3>> source_ee_tracks;  // [pair][frame], world positions
    std::vector<Vec3> source_root_positions;          // init for the target root
    double frame_rate = 30.0;
};

RetargetProblem make_retarget_problem(const Skeleton& source, const MotionSequence& source_motion,
                                      const CloudSpec& source_spec, const Skeleton& target,
                                      const CloudSpec& target_spec);

/// Forward evaluation of target params: per-frame FK heads and unit
/// rotations, plus the realized target cloud.
struct TargetState {
    std::vector<Vec3> heads;          // frame-major, frames * bones
    std::vector<Quat> unit_rotations;  // frame-major
    CloudTrajectory cloud;
};

TargetState evaluate_target(const RetargetProblem& problem, const RetargetParams& params);

/// Full objective with a fresh neighbor assignment.
ObjectiveBreakdown total_objective(const RetargetProblem& problem, const RetargetParams& params,
                                   const ObjectiveWeights& weights, const KnnConfig& cfg);

/// Objective under a frozen assignment (the piecewise-smooth regime the
/// optimizer steps in).
ObjectiveBreakdown objective_with_assignment(const RetargetProblem& problem,
                                             const RetargetParams& params,
                                             const TargetState& state,
                                             const ObjectiveWeights& weights,
                                             const KnnConfig& cfg,
                                             const NeighborAssignment& assignment);

/// Exact gradient of the frozen-assignment objective with respect to every
/// root position component and every raw quaternion component, chain-ruled
/// through FK, quaternion normalization and rotation.
RetargetGradient objective_gradient(const RetargetProblem& problem, const RetargetParams& params,
                                    const TargetState& state, const ObjectiveWeights& weights,
                                    const KnnConfig& cfg, const NeighborAssignment& assignment);

RetargetGradient objective_gradient(const RetargetProblem& problem, const RetargetParams& params,
                                    const ObjectiveWeights& weights, const KnnConfig& cfg,
                                    const NeighborAssignment& assignment);

}  // namespace pointmotion
