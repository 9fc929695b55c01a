// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "pointmotion/bvh.hpp"
#include "pointmotion/interp.hpp"
#include "pointmotion/io.hpp"
#include "pointmotion/retarget.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace pointmotion;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Criterion {
    int number;
    std::string name;
    std::function<bool(std::string&)> run;
};

bool check(bool condition, const char* what, std::string& detail) {
    if (!condition && detail.empty()) {
        detail = what;
    }
    return condition;
}

// --- 1: rotation oracle suite ------------------------------------------------

bool rotation_oracle_suite(std::string& detail) {
    Rng rng(1001);
    bool ok = true;
    double max_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Quat a = oracle::random_unit_quat(rng);
        const Quat b = oracle::random_unit_quat(rng);
        const Vec3 v = oracle::random_vec(rng);

        const Vec3 product_rot = quat_rotate(v, a * b);
        const Vec3 matrix_rot =
            oracle::apply(oracle::mul(oracle::to_matrix(a), oracle::to_matrix(b)), v);
        max_err = std::max(max_err, (product_rot - matrix_rot).norm());

        const Vec3 direct = quat_rotate(v, a);
        const Vec3 matrix_direct = oracle::apply(oracle::to_matrix(a), v);
        max_err = std::max(max_err, (direct - matrix_direct).norm());

        const Quat unit = a * quat_conjugate(a);
        max_err = std::max(max_err, std::abs(unit.w - 1.0) + unit.vec().norm());
    }
    ok = check(max_err <= 1e-9, "oracle mismatch above 1e-9", detail);
    if (!ok) detail += " (max " + std::to_string(max_err) + ")";
    return ok;
}

// --- 2: FOQ invariance --------------------------------------------------------

bool foq_invariance(std::string& detail) {
    Rng rng(1002);
    double max_err = 0.0;
    double max_round_trip = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Quat> track(64);
        for (Quat& q : track) {
            q = oracle::random_unit_quat(rng);
        }
        // alternate free right-factors with axis-constrained roll factors
        Quat factor;
        if (trial % 2 == 0) {
            factor = oracle::random_unit_quat(rng);
        } else {
            const Vec3 axis = oracle::random_vec(rng) + Vec3{1e-3, 0, 0};
            factor = roll_quat({axis, rng.normal(), rng.normal(0.0, 2.0)});
        }
        std::vector<Quat> rolled;
        rolled.reserve(track.size());
        for (const Quat& q : track) {
            rolled.push_back(q * factor);
        }
        const FoqSequence base = foq_encode(track);
        const FoqSequence alt = foq_encode(rolled);
        for (std::size_t t = 0; t < track.size(); ++t) {
            const Quat aligned = hemisphere_align(alt.offsets[t], base.offsets[t]);
            max_err = std::max({max_err, std::abs(aligned.w - base.offsets[t].w),
                                std::abs(aligned.x - base.offsets[t].x),
                                std::abs(aligned.y - base.offsets[t].y),
                                std::abs(aligned.z - base.offsets[t].z)});
        }
        const std::size_t ref = rng.next_u64() % track.size();
        const std::vector<Quat> decoded = foq_decode(base, track[ref], ref);
        for (std::size_t t = 0; t < track.size(); ++t) {
            const Quat aligned = hemisphere_align(decoded[t], track[t]);
            max_round_trip = std::max(max_round_trip, std::abs(dot(aligned, track[t]) - 1.0));
        }
    }
    bool ok = check(max_err <= 1e-9, "encoded FOQ differs beyond 1e-9", detail);
    ok = check(max_round_trip <= 1e-9, "decode round trip beyond 1e-9", detail) && ok;
    return ok;
}

// --- 3: Algorithm 1 -----------------------------------------------------------

bool max_real_alignment(std::string& detail) {
    Rng rng(1003);
    double max_residual = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 tail = oracle::random_vec(rng) + Vec3{0, 0, 1e-3};
        const Vec3 target = oracle::random_vec(rng) + Vec3{1e-3, 0, 0};
        const Quat q = align_max_real(target, tail);
        max_residual =
            std::max(max_residual, (quat_rotate(tail.normalized(), q) - target.normalized()).norm());
    }
    bool ok = check(max_residual <= 1e-9, "alignment residual above 1e-9", detail);

    double max_excess = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vec3 tail = oracle::random_vec(rng) + Vec3{0, 0, 1e-3};
        const Vec3 target = oracle::random_vec(rng) + Vec3{1e-3, 0, 0};
        const Quat q = align_max_real(target, tail);
        for (int step = 0; step < 360; ++step) {
            const Quat alt = q * oracle::from_axis_angle(tail, step * kPi / 180.0);
            max_excess = std::max(max_excess, std::abs(alt.w) - std::abs(q.w));
        }
    }
    ok = check(max_excess <= 1e-9, "roll perturbation beats the real component", detail) && ok;

    const Quat parallel = align_max_real({3, -1, 2}, {6, -2, 4});
    ok = check(std::abs(std::abs(parallel.w) - 1.0) <= 1e-9 && parallel.vec().norm() <= 1e-9,
               "parallel case is not identity up to sign", detail) &&
         ok;
    return ok;
}

// --- 4: KNN oracle equivalence -------------------------------------------------

bool knn_oracle_equivalence(std::string& detail) {
    Rng rng(1004);
    for (int trial = 0; trial < 1000; ++trial) {
        const int frames = 1 + static_cast<int>(rng.next_u64() % 16);
        const int pa = 4 + static_cast<int>(rng.next_u64() % 61);
        const int pb = 8 + static_cast<int>(rng.next_u64() % 57);
        const int group_count = 1 + static_cast<int>(rng.next_u64() % 3);
        CloudTrajectory x_a, x_b;
        x_a.point_count = pa;
        x_b.point_count = pb;
        for (int i = 0; i < pa; ++i) {
            x_a.groups.push_back(static_cast<BodyGroup>(rng.next_u64() % group_count));
        }
        for (int j = 0; j < pb; ++j) {
            x_b.groups.push_back(static_cast<BodyGroup>(rng.next_u64() % group_count));
        }
        x_a.positions.resize(static_cast<std::size_t>(frames) * pa);
        x_b.positions.resize(static_cast<std::size_t>(frames) * pb);
        for (Vec3& p : x_a.positions) p = oracle::random_vec(rng, 0.6);
        for (Vec3& p : x_b.positions) p = oracle::random_vec(rng, 0.6);

        KnnConfig cfg;
        cfg.k = 1 + static_cast<int>(rng.next_u64() % 4);
        int min_candidates = pb;
        for (int g = 0; g < group_count; ++g) {
            int count = 0;
            for (BodyGroup bg : x_b.groups) {
                if (static_cast<int>(bg) == g) ++count;
            }
            min_candidates = std::min(min_candidates, count);
        }
        if (min_candidates < cfg.k) {
            --trial;
            continue;
        }

        const NeighborAssignment assignment = knn_assign(x_a, x_b, cfg);
        double brute_sum = 0.0;
        for (int i = 0; i < pa; ++i) {
            const auto brute = oracle::brute_force_knn(x_a, i, x_b, cfg.k);
            if (assignment.neighbors[i] != brute.indices) {
                detail = "assignment differs from exhaustive search (trial " +
                         std::to_string(trial) + ")";
                return false;
            }
            for (double d : brute.distances) {
                brute_sum += d;
            }
        }
        const double lib = knn_loss_assigned(x_a, x_b, assignment).raw;
        if (std::abs(lib - brute_sum) > 1e-12 * std::max(1.0, brute_sum)) {
            detail = "loss differs from brute-force sum";
            return false;
        }
    }
    return true;
}

// --- 5: gradient check -----------------------------------------------------------

struct GradientInstance {
    RetargetProblem problem;
    RetargetParams params;
    ObjectiveWeights weights;
    KnnConfig cfg;
    NeighborAssignment assignment;
};

Skeleton gradient_chain() {
    Skeleton s;
    s.bones.push_back(fixtures::make_bone("root", -1, {}, {0, 0.3, 0}, BodyGroup::spine));
    s.bones.push_back(
        fixtures::make_bone("mid", 0, {0, 0.3, 0}, {0.25, 0, 0}, BodyGroup::left_arm));
    s.bones.push_back(fixtures::make_bone("tip", 1, {0.25, 0, 0}, {0.2, 0, 0},
                                          BodyGroup::left_arm, EndEffector::hand_l));
    return s;
}

GradientInstance make_gradient_instance(std::uint64_t seed) {
    GradientInstance inst;
    const Skeleton skel = gradient_chain();
    const MotionSequence source = fixtures::procedural_motion(skel, 4);
    const CloudSpec spec = sample_cloud_spec(skel, 12, 0.04, seed);
    inst.problem = make_retarget_problem(skel, source, spec, skel, spec);
    inst.cfg.k = 2;
    Rng rng(seed * 7919 + 3);
    inst.params.bone_count = skel.bone_count();
    inst.params.root_positions.resize(4);
    inst.params.raw_rotations.resize(4 * skel.bone_count());
    for (Vec3& p : inst.params.root_positions) {
        p = Vec3{0, 0.2, 0} + oracle::random_vec(rng, 0.15);
    }
    for (Quat& q : inst.params.raw_rotations) {
        q = Quat{1 + rng.normal(0.0, 0.2), rng.normal(0.0, 0.2), rng.normal(0.0, 0.2),
                 rng.normal(0.0, 0.2)};
    }
    const TargetState state = evaluate_target(inst.problem, inst.params);
    inst.assignment = knn_assign(inst.problem.source_cloud, state.cloud, inst.cfg);
    return inst;
}

bool away_from_ties(const GradientInstance& inst) {
    const TargetState state = evaluate_target(inst.problem, inst.params);
    for (int i = 0; i < inst.problem.source_cloud.point_count; ++i) {
        const auto all =
            oracle::brute_force_knn(inst.problem.source_cloud, i, state.cloud, inst.cfg.k + 1);
        if (static_cast<int>(all.distances.size()) > inst.cfg.k &&
            all.distances[inst.cfg.k] - all.distances[inst.cfg.k - 1] <= 1e-6) {
            return false;
        }
    }
    return true;
}

bool gradient_check(std::string& detail) {
    int tested = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; tested < 100 && seed < 400; ++seed) {
        const GradientInstance inst = make_gradient_instance(seed);
        if (!away_from_ties(inst)) {
            continue;
        }
        ++tested;
        const RetargetGradient analytic =
            objective_gradient(inst.problem, inst.params, inst.weights, inst.cfg, inst.assignment);
        const int frames = inst.params.frame_count();
        auto compare = [&](double a, double fd) {
            const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-5});
            worst = std::max(worst, rel);
        };
        for (int t = 0; t < frames; ++t) {
            for (int axis = 0; axis < 3; ++axis) {
                const double fd = oracle::central_difference(
                    inst.problem, inst.params, inst.weights, inst.cfg, inst.assignment,
                    [&](RetargetParams& p) -> double& {
                        Vec3& v = p.root_positions[t];
                        return axis == 0 ? v.x : axis == 1 ? v.y : v.z;
                    });
                const Vec3& g = analytic.root_positions[t];
                compare(axis == 0 ? g.x : axis == 1 ? g.y : g.z, fd);
            }
            for (int n = 0; n < inst.params.bone_count; ++n) {
                for (int comp = 0; comp < 4; ++comp) {
                    const double fd = oracle::central_difference(
                        inst.problem, inst.params, inst.weights, inst.cfg, inst.assignment,
                        [&](RetargetParams& p) -> double& {
                            Quat& q = p.raw(t, n);
                            return comp == 0 ? q.w : comp == 1 ? q.x : comp == 2 ? q.y : q.z;
                        });
                    const Quat& g =
                        analytic
                            .raw_rotations[static_cast<std::size_t>(t) * inst.params.bone_count +
                                           n];
                    compare(comp == 0 ? g.w : comp == 1 ? g.x : comp == 2 ? g.y : g.z, fd);
                }
            }
        }
    }
    bool ok = check(tested == 100, "could not build 100 tie-free instances", detail);
    ok = check(worst < 1e-4, "finite-difference relative error at or above 1e-4", detail) && ok;
    if (!detail.empty()) detail += " (worst " + std::to_string(worst) + ")";
    return ok;
}

// --- 6: self-retargeting --------------------------------------------------------

bool self_retargeting(std::string& detail) {
    const Skeleton skel = fixtures::humanoid20(2.0);
    const MotionSequence motion = fixtures::aerial_spin_motion(skel, 60);
    const CloudSpec spec = sample_cloud_spec(skel, 256, 0.05, 1);
    const RetargetProblem problem = make_retarget_problem(skel, motion, spec, skel, spec);

    KnnConfig cfg;
    cfg.k = 8;
    OptimizerConfig opt;
    opt.max_iterations = 2000;
    opt.convergence_tol = 0.0;
    opt.step_size = 0.08;
    opt.final_step_factor = 0.03;
    opt.seed = 1;

    const auto t0 = std::chrono::steady_clock::now();
    const auto [result, trace] = optimize(problem, ObjectiveWeights{}, cfg, opt);
    const auto [result2, trace2] = optimize(problem, ObjectiveWeights{}, cfg, opt);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double init = trace.entries.front().breakdown.l_knn_normalized;
    double best = init;
    for (const TraceEntry& e : trace.entries) {
        best = std::min(best, e.breakdown.l_knn_normalized);
    }
    const double reduction = 1.0 - best / init;
    bool ok = check(reduction >= 0.90, "normalized KNN reduction below 90%", detail);
    ok = check(seconds < 300.0, "two runs exceeded 5 minutes", detail) && ok;
    ok = check(result.rotations == result2.rotations &&
                   result.root_positions == result2.root_positions,
               "two identically seeded runs differ", detail) &&
         ok;
    char buf[128];
    std::snprintf(buf, sizeof(buf), " (init %.4f, best %.4f, reduction %.1f%%, %.0fs/run)", init,
                  best, 100.0 * reduction, seconds / 2.0);
    detail += buf;
    return ok;
}

// --- 7: sigma trend ---------------------------------------------------------------

bool sigma_trend(std::string& detail) {
    const Skeleton skel = fixtures::humanoid20();
    const MotionSequence motion = fixtures::procedural_motion(skel, 60);
    KnnConfig cfg;
    cfg.k = 8;
    double prev = -1.0;
    std::string values;
    for (double sigma : {0.0, 0.01, 0.05, 0.1, 0.2}) {
        const CloudSpec sa = sample_cloud_spec(skel, 256, sigma, 1);
        const CloudSpec sb = sample_cloud_spec(skel, 256, sigma, 2);
        const double loss = knn_loss(realize_trajectory(sa, skel, motion),
                                     realize_trajectory(sb, skel, motion), cfg)
                                .normalized;
        if (loss <= prev) {
            detail = "L_KNN not strictly increasing at sigma " + std::to_string(sigma);
            return false;
        }
        char buf[32];
        std::snprintf(buf, sizeof(buf), " %.3f", loss * 100.0);
        values += buf;
        prev = loss;
    }
    detail = "(x100:" + values + ")";
    return true;
}

// --- 8: cross-skeleton retarget ----------------------------------------------------

bool cross_skeleton(std::string& detail) {
    const Skeleton source = fixtures::lafan_like();
    const Skeleton target = fixtures::cmu_like();
    const MotionSequence motion = fixtures::procedural_motion(source, 60);
    KnnConfig cfg;
    cfg.k = 8;

    const CloudSpec spec_a = sample_cloud_spec(source, 256, 0.05, 1);
    const CloudSpec spec_ref = sample_cloud_spec(source, 256, 0.05, 101);
    const CloudTrajectory x_a = realize_trajectory(spec_a, source, motion);
    const double reference =
        knn_loss(x_a, realize_trajectory(spec_ref, source, motion), cfg).normalized;

    const CloudSpec spec_b = sample_cloud_spec(target, 256, 0.05, 2);
    const RetargetProblem problem = make_retarget_problem(source, motion, spec_a, target, spec_b);
    OptimizerConfig opt;
    opt.max_iterations = 2000;
    opt.convergence_tol = 0.0;
    opt.step_size = 0.02;
    opt.final_step_factor = 0.03;
    opt.seed = 1;
    const auto [result, trace] = optimize(problem, ObjectiveWeights{}, cfg, opt);

    const CloudTrajectory x_b = realize_trajectory(spec_b, target, result);
    const double final_knn = knn_loss(x_a, x_b, cfg).normalized;
    const EndEffectorMap map = match_end_effectors(source, target);
    const double l_end = end_effector_loss(source, motion, target, result, map);
    const double per_pair = l_end / static_cast<double>(map.pairs.size());

    bool ok = check(final_knn <= 2.0 * reference, "final KNN above 2x reference", detail);
    ok = check(per_pair < 0.1, "end-effector loss at or above 0.1 m per pair", detail) && ok;
    char buf[128];
    std::snprintf(buf, sizeof(buf), " (final %.4f vs ref %.4f = %.2fx, l_end/pair %.4f m)",
                  final_knn, reference, final_knn / reference, per_pair);
    detail += buf;
    return ok;
}

// --- 9: interpolation metric suite ---------------------------------------------------

bool interpolation_metrics(std::string& detail) {
    const Skeleton skel = fixtures::humanoid20();
    const MotionSequence gt = fixtures::procedural_motion(skel, 128);

    const MetricReport equal = evaluate_metrics(skel, gt, gt);
    bool ok = check(equal.l2p == 0.0 && equal.l2q == 0.0 && equal.npss == 0.0,
                    "metrics not exactly zero for pred == gt", detail);

    double prev_l2p = -1.0, prev_l2q = -1.0;
    for (int interval : {5, 15, 30}) {
        const KeyframeSet keys = extract_keyframes(gt, interval);
        const MotionSequence pred = interpolate_baseline(gt, keys);
        for (int f : keys.frames) {
            if (!(pred.root_positions[f] == gt.root_positions[f])) {
                ok = check(false, "baseline not exact at keyframes", detail);
            }
            for (int n = 0; n < gt.bone_count; ++n) {
                if (!(pred.rotation(f, n) == gt.rotation(f, n))) {
                    ok = check(false, "baseline not exact at keyframes", detail);
                }
            }
        }
        const double p = l2p(skel, gt, pred, keys);
        const double q = l2q(gt, pred, keys);
        ok = check(p >= prev_l2p && q >= prev_l2q,
                   "L2P/L2Q not non-decreasing across intervals", detail) &&
             ok;
        prev_l2p = p;
        prev_l2q = q;
    }

    // exactly periodic single-bone fixture for spectral shift invariance
    Skeleton bone;
    bone.bones.push_back(fixtures::make_bone("b", -1, {}, {0, 1, 0}, BodyGroup::spine));
    MotionSequence wave = fixtures::motion_from_local(
        bone, 64, 30.0, [](int) { return Vec3{}; },
        [&](int t, int) {
            return axis_angle({0, 0, 1}, 1.2 * std::sin(2.0 * kPi * 3.0 * t / 64.0));
        });
    MotionSequence shifted = wave;
    for (int t = 0; t < 64; ++t) {
        shifted.rotation(t, 0) = wave.rotation((t + 17) % 64, 0);
    }
    ok = check(npss(wave, shifted) <= 1e-9, "NPSS not shift-invariant within 1e-9", detail) && ok;
    return ok;
}

// --- 10: I/O ---------------------------------------------------------------------------

bool io_round_trips(std::string& detail) {
    const std::string dir = "/tmp/pointmotion_acceptance";
    std::filesystem::create_directories(dir);

    const Skeleton skel = fixtures::cmu_like();
    save_skeleton(skel, dir + "/s.txt");
    const Skeleton loaded = load_skeleton(dir + "/s.txt");
    bool ok = true;
    for (int i = 0; i < skel.bone_count(); ++i) {
        if (!(loaded.bones[i].head == skel.bones[i].head &&
              loaded.bones[i].tail == skel.bones[i].tail &&
              loaded.bones[i].name == skel.bones[i].name)) {
            ok = check(false, "skeleton round trip not bit-exact", detail);
        }
    }

    const MotionSequence motion = fixtures::aerial_spin_motion(skel, 33);
    save_motion(motion, dir + "/m.txt");
    const MotionSequence motion_loaded = load_motion(dir + "/m.txt");
    ok = check(motion_loaded.rotations == motion.rotations &&
                   motion_loaded.root_positions == motion.root_positions &&
                   motion_loaded.frame_rate == motion.frame_rate,
               "motion round trip not bit-exact", detail) &&
         ok;

    // two-joint BVH; expected positions computed by hand from channel data:
    // frame 1 has the root at (0.5, 0, 0) rotated 90 degrees about z, so the
    // child joint (offset (1,0,0)) lands at (0.5, 1, 0) and its end site one
    // unit further along the rotated x axis at (-0.5, 1, 0).
    const std::string bvh_text = R"(HIERARCHY
ROOT hip
{
    OFFSET 0 0 0
    CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
    JOINT arm
    {
        OFFSET 1 0 0
        CHANNELS 3 Zrotation Xrotation Yrotation
        End Site
        {
            OFFSET 1 0 0
        }
    }
}
MOTION
Frames: 2
Frame Time: 0.05
0 0 0 0 0 0 0 0 0
0.5 0 0 90 0 0 90 0 0
)";
    BvhImportOptions options;
    options.groups = {{"hip", BodyGroup::spine}, {"arm", BodyGroup::left_arm}};
    const auto [bvh_skel, bvh_motion] = import_bvh(parse_bvh_text(bvh_text), options);
    const std::vector<Vec3> heads = fk_heads(bvh_skel, bvh_motion, 1);
    const std::vector<Vec3> tails = fk_tails(bvh_skel, bvh_motion, 1);
    ok = check((heads[0] - Vec3{0.5, 0, 0}).norm() <= 1e-6 &&
                   (heads[1] - Vec3{0.5, 1, 0}).norm() <= 1e-6 &&
                   (tails[1] - Vec3{-0.5, 1, 0}).norm() <= 1e-6,
               "BVH import FK differs from hand-computed positions", detail) &&
         ok;
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "rotation oracle suite (10^4 random pairs vs matrix oracle)", rotation_oracle_suite},
        {2, "FOQ right-factor invariance and decode round trip", foq_invariance},
        {3, "max-real alignment: residual, roll sweep, parallel case", max_real_alignment},
        {4, "KNN assignment and loss match exhaustive search", knn_oracle_equivalence},
        {5, "analytic gradient vs central finite differences", gradient_check},
        {6, "self-retargeting recovers >= 90% of the KNN loss", self_retargeting},
        {7, "independent-cloud KNN loss strictly increases with sigma", sigma_trend},
        {8, "cross-skeleton retarget within 2x reference and 0.1 m end error", cross_skeleton},
        {9, "interpolation metrics: zeros, keyframe exactness, trends, NPSS shift", interpolation_metrics},
        {10, "file round trips bit-exact and BVH import matches hand FK", io_round_trips},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %2d: %s%s%s [%.1fs]\n", ok ? "PASS" : "FAIL",
                    criterion.number, criterion.name.c_str(), detail.empty() ? "" : " ",
                    detail.c_str(), seconds);
        if (!ok) {
            ++failures;
        }
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
    }
    return failures;
}
