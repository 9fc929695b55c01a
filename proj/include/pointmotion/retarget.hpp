#pragma once

#include <cstdint>
#include <vector>

#include "pointmotion/objective.hpp"

namespace pointmotion {

struct OptimizerConfig {
    int max_iterations = 2000;
    double step_size = 0.01;
    double final_step_factor = 0.01;  // step anneals geometrically to step_size * this
    double beta1 = 0.9;               // first-moment decay for the per-parameter scaling
    double beta2 = 0.999;             // second-moment decay
    double epsilon = 1e-8;
    int reassign_interval = 10;       // iterations between KNN reassignments
    double convergence_tol = 1e-6;    // relative decrease over a 50-iteration window
    double init_perturbation = 1e-3;  // stddev of the seeded init noise on raw rotations
    bool adaptive = true;             // per-parameter scaling; false gives plain gradient steps
    std::uint64_t seed = 0;
};

struct TraceEntry {
    int iteration = 0;
    ObjectiveBreakdown breakdown;
    bool reassigned = false;
};

struct RetargetTrace {
    std::vector<TraceEntry> entries;
    double best_total = 0.0;
    int best_iteration = 0;
    bool aborted_non_finite = false;
    bool converged = false;
};

/// Rest-pose start: identity global rotations plus seeded perturbation of
/// standard deviation init_perturbation on every raw component (frame-major,
/// then bone, then w,x,y,z); root positions copy the source root trajectory.
RetargetParams init_params(const Skeleton& target, const MotionSequence& source_motion,
                           std::uint64_t seed, double init_perturbation = 1e-3);

/// First-order minimization of the total objective over target motion
/// parameters: periodic exact KNN reassignment, per-parameter adaptive
/// scaling on the frozen-assignment gradient, best-by-total tracking.
/// Returns the best parameters seen, exported as a normalized,
/// hemisphere-aligned motion, plus the per-iteration trace.
std::pair<MotionSequence, RetargetTrace> optimize(const RetargetProblem& problem,
                                                  const ObjectiveWeights& weights,
                                                  const KnnConfig& knn_cfg,
                                                  const OptimizerConfig& cfg);

std::pair<MotionSequence, RetargetTrace> optimize(const RetargetProblem& problem,
                                                  const RetargetParams& start,
                                                  const ObjectiveWeights& weights,
                                                  const KnnConfig& knn_cfg,
                                                  const OptimizerConfig& cfg);

/// Normalizes every raw quaternion (throwing with the frame/bone on a
/// zero-norm entry) and hemisphere-aligns consecutive frames per bone.
MotionSequence export_retargeted(const RetargetParams& params, const Skeleton& target,
                                 double frame_rate = 30.0);

}  // namespace pointmotion
