#include "pointmotion/retarget.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pointmotion/rng.hpp"

namespace pointmotion {

RetargetParams init_params(const Skeleton& target, const MotionSequence& source_motion,
                           std::uint64_t seed, double init_perturbation) {
    RetargetParams params;
    params.bone_count = target.bone_count();
    params.root_positions = source_motion.root_positions;
    params.raw_rotations.assign(
        static_cast<std::size_t>(source_motion.frame_count()) * params.bone_count,
        Quat::identity());
    if (init_perturbation > 0.0) {
        Rng rng(seed);
        for (Quat& q : params.raw_rotations) {
            q.w += rng.normal(0.0, init_perturbation);
            q.x += rng.normal(0.0, init_perturbation);
            q.y += rng.normal(0.0, init_perturbation);
            q.z += rng.normal(0.0, init_perturbation);
        }
    }
    return params;
}

namespace {

RetargetParams init_from_problem(const RetargetProblem& problem, const OptimizerConfig& cfg) {
    MotionSequence pseudo;
    pseudo.frame_rate = problem.frame_rate;
    pseudo.root_positions = problem.source_root_positions;
    pseudo.bone_count = problem.target_skeleton.bone_count();
    return init_params(problem.target_skeleton, pseudo, cfg.seed, cfg.init_perturbation);
}

}  // namespace

std::pair<MotionSequence, RetargetTrace> optimize(const RetargetProblem& problem,
                                                  const ObjectiveWeights& weights,
                                                  const KnnConfig& knn_cfg,
                                                  const OptimizerConfig& cfg) {
    return optimize(problem, init_from_problem(problem, cfg), weights, knn_cfg, cfg);
}

std::pair<MotionSequence, RetargetTrace> optimize(const RetargetProblem& problem,
                                                  const RetargetParams& start,
                                                  const ObjectiveWeights& weights,
                                                  const KnnConfig& knn_cfg,
                                                  const OptimizerConfig& cfg) {
    if (cfg.max_iterations < 1 || cfg.step_size <= 0.0 || cfg.reassign_interval < 1) {
        throw std::invalid_argument("optimize: invalid optimizer configuration");
    }

    RetargetParams params = start;
    const int frames = params.frame_count();
    const int bones = params.bone_count;
    const std::size_t quat_count = params.raw_rotations.size();

    // Adam-style moments, one slot per scalar parameter.
    std::vector<Vec3> m_root(frames, Vec3{}), v_root(frames, Vec3{});
    std::vector<Quat> m_rot(quat_count, Quat{0, 0, 0, 0}), v_rot(quat_count, Quat{0, 0, 0, 0});

    RetargetTrace trace;
    RetargetParams best = params;
    double best_total = std::numeric_limits<double>::infinity();
    std::vector<double> totals;
    totals.reserve(cfg.max_iterations);

    NeighborAssignment assignment;
    constexpr int kWindow = 50;

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const TargetState state = evaluate_target(problem, params);
        const bool reassign = iter % cfg.reassign_interval == 0;
        if (reassign) {
            assignment = knn_assign(problem.source_cloud, state.cloud, knn_cfg);
        }
        const ObjectiveBreakdown breakdown =
            objective_with_assignment(problem, params, state, weights, knn_cfg, assignment);
        trace.entries.push_back({iter, breakdown, reassign});
        if (!std::isfinite(breakdown.total)) {
            trace.aborted_non_finite = true;
            break;
        }
        if (breakdown.total < best_total) {
            best_total = breakdown.total;
            best = params;
            trace.best_iteration = iter;
        }
        totals.push_back(breakdown.total);
        if (iter >= kWindow) {
            const double before = totals[iter - kWindow];
            const double decrease = (before - breakdown.total) / std::max(std::abs(before), 1e-12);
            if (decrease < cfg.convergence_tol) {
                trace.converged = true;
                break;
            }
        }

        const RetargetGradient grad =
            objective_gradient(problem, params, state, weights, knn_cfg, assignment);

        const double t = iter + 1;
        const double bias1 = 1.0 - std::pow(cfg.beta1, t);
        const double bias2 = 1.0 - std::pow(cfg.beta2, t);
        const double anneal =
            cfg.max_iterations > 1
                ? std::pow(cfg.final_step_factor,
                           static_cast<double>(iter) / (cfg.max_iterations - 1))
                : 1.0;
        const double step_size = cfg.step_size * anneal;
        auto step = [&](double& p, double& m, double& v, double g) {
            if (!cfg.adaptive) {
                p -= step_size * g;
                return;
            }
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
            p -= step_size * (m / bias1) / (std::sqrt(v / bias2) + cfg.epsilon);
        };
        for (int f = 0; f < frames; ++f) {
            step(params.root_positions[f].x, m_root[f].x, v_root[f].x, grad.root_positions[f].x);
            step(params.root_positions[f].y, m_root[f].y, v_root[f].y, grad.root_positions[f].y);
            step(params.root_positions[f].z, m_root[f].z, v_root[f].z, grad.root_positions[f].z);
        }
        for (std::size_t i = 0; i < quat_count; ++i) {
            step(params.raw_rotations[i].w, m_rot[i].w, v_rot[i].w, grad.raw_rotations[i].w);
            step(params.raw_rotations[i].x, m_rot[i].x, v_rot[i].x, grad.raw_rotations[i].x);
            step(params.raw_rotations[i].y, m_rot[i].y, v_rot[i].y, grad.raw_rotations[i].y);
            step(params.raw_rotations[i].z, m_rot[i].z, v_rot[i].z, grad.raw_rotations[i].z);
        }
    }

    trace.best_total = best_total;
    MotionSequence result = export_retargeted(best, problem.target_skeleton, problem.frame_rate);
    return {std::move(result), std::move(trace)};
}

MotionSequence export_retargeted(const RetargetParams& params, const Skeleton& target,
                                 double frame_rate) {
    if (params.bone_count != target.bone_count()) {
        throw std::invalid_argument("export_retargeted: params do not match skeleton");
    }
    MotionSequence out;
    out.frame_rate = frame_rate;
    out.bone_count = params.bone_count;
    out.root_positions = params.root_positions;
    out.rotations.resize(params.raw_rotations.size());
    const int frames = params.frame_count();
    for (int n = 0; n < params.bone_count; ++n) {
        for (int t = 0; t < frames; ++t) {
            const Quat& raw = params.raw(t, n);
            if (raw.norm() < 1e-12) {
                throw std::invalid_argument("export_retargeted: zero-norm quaternion at frame " +
                                            std::to_string(t) + ", bone " + std::to_string(n));
            }
            Quat q = raw.normalized();
            if (t > 0) {
                q = hemisphere_align(q, out.rotation(t - 1, n));
            }
            out.rotation(t, n) = q;
        }
    }
    return out;
}

}  // namespace pointmotion
