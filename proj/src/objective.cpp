#include "pointmotion/objective.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pointmotion {

namespace {

void check_same_frames(const CloudTrajectory& a, const CloudTrajectory& b) {
    if (a.frame_count() != b.frame_count()) {
        throw std::invalid_argument("frame count mismatch: " + std::to_string(a.frame_count()) +
                                    " vs " + std::to_string(b.frame_count()));
    }
}

// Runs fn(begin, end) over [0, n) in contiguous chunks. Results must not
// depend on the partition; callers write disjoint output ranges.
void parallel_chunks(int n, int threads, const std::function<void(int, int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(fn, begin, end);
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace

double sequence_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                         BodyGroup group_a, BodyGroup group_b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("sequence_distance: frame count mismatch");
    }
    if (group_a != group_b) {
        return kExcludedDistance;
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        sum += distance(a[t], b[t]);
    }
    return sum;
}

NeighborAssignment knn_assign(const CloudTrajectory& x_a, const CloudTrajectory& x_b,
                              const KnnConfig& cfg) {
    if (cfg.k < 1) {
        throw std::invalid_argument("knn_assign: k must be >= 1");
    }
    check_same_frames(x_a, x_b);
    const int frames = x_a.frame_count();
    const int pa = x_a.point_count;
    const int pb = x_b.point_count;

    // Hard group filtering: per-group candidate lists, ascending index.
    std::vector<std::vector<int>> candidates(kBodyGroupCount);
    for (int j = 0; j < pb; ++j) {
        candidates[static_cast<int>(x_b.groups[j])].push_back(j);
    }
    for (int i = 0; i < pa; ++i) {
        const int g = static_cast<int>(x_a.groups[i]);
        if (static_cast<int>(candidates[g].size()) < cfg.k) {
            throw std::invalid_argument(
                std::string("knn_assign: insufficient same-group target points (group ") +
                to_string(x_a.groups[i]) + "): have " + std::to_string(candidates[g].size()) +
                ", need " + std::to_string(cfg.k));
        }
    }

    NeighborAssignment out;
    out.k = cfg.k;
    out.neighbors.resize(pa);
    out.distances.resize(pa);

    parallel_chunks(pa, cfg.threads, [&](int begin, int end) {
        std::vector<double> row;
        std::vector<int> order;
        for (int i = begin; i < end; ++i) {
            const std::vector<int>& cand = candidates[static_cast<int>(x_a.groups[i])];
            row.assign(cand.size(), 0.0);
            for (int t = 0; t < frames; ++t) {
                const Vec3& p = x_a.at(t, i);
                for (std::size_t c = 0; c < cand.size(); ++c) {
                    row[c] += distance(p, x_b.at(t, cand[c]));
                }
            }
            order.resize(cand.size());
            std::iota(order.begin(), order.end(), 0);
            // candidates are index-ascending, so equal distances resolve to
            // the lower target index
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return row[a] < row[b]; });
            out.neighbors[i].reserve(cfg.k);
            out.distances[i].reserve(cfg.k);
            for (int r = 0; r < cfg.k; ++r) {
                out.neighbors[i].push_back(cand[order[r]]);
                out.distances[i].push_back(row[order[r]]);
            }
        }
    });
    return out;
}

KnnLossResult knn_loss(const CloudTrajectory& x_a, const CloudTrajectory& x_b,
                       const KnnConfig& cfg) {
    return knn_loss_assigned(x_a, x_b, knn_assign(x_a, x_b, cfg));
}

KnnLossResult knn_loss_assigned(const CloudTrajectory& x_a, const CloudTrajectory& x_b,
                                const NeighborAssignment& assignment) {
    check_same_frames(x_a, x_b);
    const int frames = x_a.frame_count();
    const int pa = x_a.point_count;
    if (static_cast<int>(assignment.neighbors.size()) != pa) {
        throw std::invalid_argument("knn_loss_assigned: assignment does not match source cloud");
    }
    double raw = 0.0;
    for (int i = 0; i < pa; ++i) {
        for (int j : assignment.neighbors[i]) {
            double d = 0.0;
            for (int t = 0; t < frames; ++t) {
                d += distance(x_a.at(t, i), x_b.at(t, j));
            }
            raw += d;
        }
    }
    KnnLossResult result;
    result.raw = raw;
    const double denom = static_cast<double>(pa) * assignment.k * frames;
    result.normalized = denom > 0.0 ? raw / denom : 0.0;
    return result;
}

double end_effector_loss(const Skeleton& a, const MotionSequence& ma, const Skeleton& b,
                         const MotionSequence& mb, const EndEffectorMap& map, bool* empty_map) {
    if (empty_map) *empty_map = map.pairs.empty();
    if (map.pairs.empty()) {
        return 0.0;
    }
    if (ma.frame_count() != mb.frame_count()) {
        throw std::invalid_argument("end_effector_loss: frame count mismatch");
    }
    const int frames = ma.frame_count();
    std::vector<double> per_pair(map.pairs.size(), 0.0);
    for (int t = 0; t < frames; ++t) {
        const std::vector<Vec3> heads_a = fk_heads(a, ma, t);
        const std::vector<Vec3> heads_b = fk_heads(b, mb, t);
        for (std::size_t p = 0; p < map.pairs.size(); ++p) {
            per_pair[p] += distance(heads_a[map.pairs[p].source_bone],
                                    heads_b[map.pairs[p].target_bone]);
        }
    }
    double total = 0.0;
    for (double d : per_pair) {
        total += d / frames;
    }
    return total;
}

double unit_norm_penalty(const std::vector<Quat>& raw) {
    if (raw.empty()) return 0.0;
    double sum = 0.0;
    for (const Quat& q : raw) {
        const double d = q.norm() - 1.0;
        sum += d * d;
    }
    return sum / static_cast<double>(raw.size());
}

RetargetProblem make_retarget_problem(const Skeleton& source, const MotionSequence& source_motion,
                                      const CloudSpec& source_spec, const Skeleton& target,
                                      const CloudSpec& target_spec) {
    RetargetProblem problem;
    problem.source_cloud = realize_trajectory(source_spec, source, source_motion);
    problem.target_skeleton = target;
    problem.target_cloud_spec = target_spec;
    problem.ee_map = match_end_effectors(source, target);
    problem.source_root_positions = source_motion.root_positions;
    problem.frame_rate = source_motion.frame_rate;

    const int frames = source_motion.frame_count();
    problem.source_ee_tracks.assign(problem.ee_map.pairs.size(), std::vector<Vec3>(frames));
    for (int t = 0; t < frames; ++t) {
        const std::vector<Vec3> heads = fk_heads(source, source_motion, t);
        for (std::size_t p = 0; p < problem.ee_map.pairs.size(); ++p) {
            problem.source_ee_tracks[p][t] = heads[problem.ee_map.pairs[p].source_bone];
        }
    }
    return problem;
}

namespace {

Quat normalize_guarded(const Quat& raw) {
    const double n2 = raw.norm_squared();
    if (std::abs(n2 - 1.0) <= 1e-12) {
        // already unit to machine precision; keeping the bits intact makes
        // exact-parameter reconstruction reproduce realize_trajectory exactly
        return raw;
    }
    if (n2 < 1e-24) {
        return Quat::identity();
    }
    const double n = std::sqrt(n2);
    return {raw.w / n, raw.x / n, raw.y / n, raw.z / n};
}

// Transposed Jacobian of QR(v, q) at unit q, applied to a downstream
// gradient g: returns d(g . QR(v, q)) / dq as a 4-vector, for the quadratic
// map q v q* with q treated as a free 4-vector.
Quat rotate_jacobian_t_apply(const Vec3& v, const Quat& q, const Vec3& g) {
    const Vec3 u = q.vec();
    const Vec3 uxv = cross(u, v);
    const double gw = 2.0 * (q.w * dot(g, v) + dot(g, uxv));
    const Vec3 gu = 2.0 * (dot(u, g) * v + dot(u, v) * g - dot(v, g) * u + q.w * cross(v, g));
    return {gw, gu.x, gu.y, gu.z};
}

}  // namespace

TargetState evaluate_target(const RetargetProblem& problem, const RetargetParams& params) {
    const Skeleton& skel = problem.target_skeleton;
    const int bones = skel.bone_count();
    if (params.bone_count != bones) {
        throw std::invalid_argument("params bone count does not match target skeleton");
    }
    const int frames = params.frame_count();
    const int points = problem.target_cloud_spec.point_count();

    TargetState state;
    state.heads.resize(static_cast<std::size_t>(frames) * bones);
    state.unit_rotations.resize(static_cast<std::size_t>(frames) * bones);
    state.cloud.point_count = points;
    state.cloud.positions.resize(static_cast<std::size_t>(frames) * points);
    state.cloud.groups.reserve(points);
    for (const PointSpec& p : problem.target_cloud_spec.points) {
        state.cloud.groups.push_back(p.group);
    }

    for (int t = 0; t < frames; ++t) {
        Quat* rot = &state.unit_rotations[static_cast<std::size_t>(t) * bones];
        Vec3* heads = &state.heads[static_cast<std::size_t>(t) * bones];
        for (int n = 0; n < bones; ++n) {
            rot[n] = normalize_guarded(params.raw(t, n));
        }
        for (int n = 0; n < bones; ++n) {
            const Bone& bone = skel.bones[n];
            if (bone.is_root()) {
                heads[n] = params.root_positions[t];
            } else {
                heads[n] = heads[bone.parent] + quat_rotate(bone.head, rot[bone.parent]);
            }
        }
        for (int i = 0; i < points; ++i) {
            const PointSpec& p = problem.target_cloud_spec.points[i];
            state.cloud.at(t, i) = heads[p.bone] + quat_rotate(p.local_offset, rot[p.bone]);
        }
    }
    return state;
}

ObjectiveBreakdown objective_with_assignment(const RetargetProblem& problem,
                                             const RetargetParams& params,
                                             const TargetState& state,
                                             const ObjectiveWeights& weights,
                                             const KnnConfig& cfg,
                                             const NeighborAssignment& assignment) {
    ObjectiveBreakdown breakdown;
    breakdown.weights = weights;

    const KnnLossResult knn = knn_loss_assigned(problem.source_cloud, state.cloud, assignment);
    breakdown.l_knn_raw = knn.raw;
    breakdown.l_knn_normalized = knn.normalized;

    const int frames = params.frame_count();
    const int bones = params.bone_count;
    breakdown.end_effector_map_empty = problem.ee_map.pairs.empty();
    for (std::size_t p = 0; p < problem.ee_map.pairs.size(); ++p) {
        const int vb = problem.ee_map.pairs[p].target_bone;
        double d = 0.0;
        for (int t = 0; t < frames; ++t) {
            d += distance(problem.source_ee_tracks[p][t],
                          state.heads[static_cast<std::size_t>(t) * bones + vb]);
        }
        breakdown.l_end += d / frames;
    }

    breakdown.l_q = unit_norm_penalty(params.raw_rotations);
    const double knn_term = cfg.normalize ? breakdown.l_knn_normalized : breakdown.l_knn_raw;
    breakdown.total =
        weights.knn * knn_term + weights.end * breakdown.l_end + weights.q * breakdown.l_q;
    return breakdown;
}

ObjectiveBreakdown total_objective(const RetargetProblem& problem, const RetargetParams& params,
                                   const ObjectiveWeights& weights, const KnnConfig& cfg) {
    const TargetState state = evaluate_target(problem, params);
    const NeighborAssignment assignment = knn_assign(problem.source_cloud, state.cloud, cfg);
    return objective_with_assignment(problem, params, state, weights, cfg, assignment);
}

RetargetGradient objective_gradient(const RetargetProblem& problem, const RetargetParams& params,
                                    const TargetState& state, const ObjectiveWeights& weights,
                                    const KnnConfig& cfg, const NeighborAssignment& assignment) {
    const Skeleton& skel = problem.target_skeleton;
    const int bones = skel.bone_count();
    const int frames = params.frame_count();
    const int points = problem.target_cloud_spec.point_count();
    const int pa = problem.source_cloud.point_count;

    RetargetGradient grad;
    grad.root_positions.assign(frames, Vec3{});
    grad.raw_rotations.assign(static_cast<std::size_t>(frames) * bones, Quat{0, 0, 0, 0});

    const double knn_scale =
        weights.knn * (cfg.normalize
                           ? 1.0 / (static_cast<double>(pa) * assignment.k * frames)
                           : 1.0);
    const double q_scale = weights.q * 2.0 / (static_cast<double>(frames) * bones);

    std::vector<Vec3> point_grad(points);
    std::vector<Vec3> head_grad(bones);
    std::vector<Quat> quat_grad(bones);

    for (int t = 0; t < frames; ++t) {
        const Quat* rot = &state.unit_rotations[static_cast<std::size_t>(t) * bones];
        std::fill(point_grad.begin(), point_grad.end(), Vec3{});
        std::fill(head_grad.begin(), head_grad.end(), Vec3{});
        std::fill(quat_grad.begin(), quat_grad.end(), Quat{0, 0, 0, 0});

        // KNN term: each frozen pair pulls the target point toward the
        // source point. Coincident points have no defined direction and
        // contribute nothing.
        for (int i = 0; i < pa; ++i) {
            const Vec3& p = problem.source_cloud.at(t, i);
            for (int j : assignment.neighbors[i]) {
                const Vec3 diff = state.cloud.at(t, j) - p;
                const double d = diff.norm();
                if (d > 0.0) {
                    point_grad[j] += (knn_scale / d) * diff;
                }
            }
        }
        for (int i = 0; i < points; ++i) {
            const PointSpec& p = problem.target_cloud_spec.points[i];
            head_grad[p.bone] += point_grad[i];
            const Quat jg = rotate_jacobian_t_apply(p.local_offset, rot[p.bone], point_grad[i]);
            quat_grad[p.bone].w += jg.w;
            quat_grad[p.bone].x += jg.x;
            quat_grad[p.bone].y += jg.y;
            quat_grad[p.bone].z += jg.z;
        }

        for (std::size_t p = 0; p < problem.ee_map.pairs.size(); ++p) {
            const int vb = problem.ee_map.pairs[p].target_bone;
            const Vec3 diff = state.heads[static_cast<std::size_t>(t) * bones + vb] -
                              problem.source_ee_tracks[p][t];
            const double d = diff.norm();
            if (d > 0.0) {
                head_grad[vb] += (weights.end / (frames * d)) * diff;
            }
        }

        // Backward pass through FK in reverse topological order: a child
        // head depends on the parent head additively and on the parent's
        // quaternion through the rotated head offset.
        for (int n = bones - 1; n >= 1; --n) {
            const Bone& bone = skel.bones[n];
            head_grad[bone.parent] += head_grad[n];
            const Quat jg = rotate_jacobian_t_apply(bone.head, rot[bone.parent], head_grad[n]);
            quat_grad[bone.parent].w += jg.w;
            quat_grad[bone.parent].x += jg.x;
            quat_grad[bone.parent].y += jg.y;
            quat_grad[bone.parent].z += jg.z;
        }
        grad.root_positions[t] += head_grad[0];

        // Chain through normalization, then add the unit-norm penalty term.
        for (int n = 0; n < bones; ++n) {
            const Quat& raw = params.raw(t, n);
            const double nrm = raw.norm();
            Quat& out = grad.raw_rotations[static_cast<std::size_t>(t) * bones + n];
            if (nrm < 1e-12) {
                continue;
            }
            const Quat q = rot[n];
            const Quat& qg = quat_grad[n];
            const double proj = dot(q, qg);
            out.w += (qg.w - q.w * proj) / nrm;
            out.x += (qg.x - q.x * proj) / nrm;
            out.y += (qg.y - q.y * proj) / nrm;
            out.z += (qg.z - q.z * proj) / nrm;
            const double pen = q_scale * (nrm - 1.0);
            out.w += pen * raw.w / nrm;
            out.x += pen * raw.x / nrm;
            out.y += pen * raw.y / nrm;
            out.z += pen * raw.z / nrm;
        }
    }
    return grad;
}

RetargetGradient objective_gradient(const RetargetProblem& problem, const RetargetParams& params,
                                    const ObjectiveWeights& weights, const KnnConfig& cfg,
                                    const NeighborAssignment& assignment) {
    const TargetState state = evaluate_target(problem, params);
    return objective_gradient(problem, params, state, weights, cfg, assignment);
}

}  // namespace pointmotion
