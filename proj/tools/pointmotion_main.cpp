// Command-line surface for the pointmotion toolkit: validation, cloud
// sampling, loss reports, retargeting, keyframe interpolation, metric
// evaluation, training-data emission and FOQ transforms.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O or usage failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pointmotion/bvh.hpp"
#include "pointmotion/io.hpp"
#include "pointmotion/retarget.hpp"

#include <json.hpp>

namespace pm = pointmotion;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("POINTMOTION_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 0;
}

pm::Skeleton load_validated_skeleton(const std::string& path) {
    pm::Skeleton skel = pm::load_skeleton(path);
    const pm::ValidationReport report = pm::validate_skeleton(skel);
    if (!report.ok()) {
        throw std::invalid_argument(path + ": skeleton failed validation: " + report.errors[0]);
    }
    return skel;
}

struct CommonSampling {
    int points = 256;
    double sigma = 0.05;
    int k = 8;
    int threads = 1;
};

void add_sampling_flags(CLI::App* cmd, CommonSampling& s, bool with_k = true) {
    cmd->add_option("--points", s.points, "Points per sampled cloud")->capture_default_str();
    cmd->add_option("--sigma", s.sigma, "Sampling standard deviation in meters")
        ->capture_default_str();
    if (with_k) {
        cmd->add_option("--k", s.k, "Neighbor count for the KNN loss")->capture_default_str();
    }
    cmd->add_option("--threads", s.threads, "Worker threads for distance matrices")
        ->capture_default_str();
}

int run(int argc, char** argv) {
    CLI::App app{"pointmotion: skeleton-agnostic motion obfuscation, reconstruction and "
                 "interpolation evaluation"};
    app.require_subcommand(1);

    // validate -----------------------------------------------------------
    std::string skel_path;
    CLI::App* validate = app.add_subcommand("validate", "Validate a skeleton file");
    validate->add_option("skeleton", skel_path, "Skeleton file")->required();

    // sample -------------------------------------------------------------
    CLI::App* sample = app.add_subcommand("sample", "Sample a point cloud spec for a skeleton");
    std::string sample_skel, sample_motion, sample_out, sample_traj_out;
    CommonSampling sample_cfg;
    std::uint64_t sample_seed = default_seed();
    sample->add_option("--skeleton", sample_skel, "Skeleton file")->required();
    sample->add_option("--out", sample_out, "Cloud spec output path")->required();
    sample->add_option("--motion", sample_motion, "Motion file (for --trajectory-out)");
    sample->add_option("--trajectory-out", sample_traj_out,
                       "Write the realized trajectory for inspection");
    add_sampling_flags(sample, sample_cfg, false);
    sample->add_option("--seed", sample_seed, "Sampling seed")->capture_default_str();

    // loss ----------------------------------------------------------------
    CLI::App* loss = app.add_subcommand("loss", "Report the objective between two motions");
    std::string loss_sa, loss_ma, loss_sb, loss_mb;
    CommonSampling loss_cfg;
    pm::ObjectiveWeights loss_weights;
    std::uint64_t loss_seed_a = 1, loss_seed_b = 2;
    loss->add_option("--source-skel", loss_sa)->required();
    loss->add_option("--source-motion", loss_ma)->required();
    loss->add_option("--target-skel", loss_sb)->required();
    loss->add_option("--target-motion", loss_mb)->required();
    add_sampling_flags(loss, loss_cfg);
    loss->add_option("--source-seed", loss_seed_a, "Source cloud seed")->capture_default_str();
    loss->add_option("--target-seed", loss_seed_b, "Target cloud seed")->capture_default_str();
    loss->add_option("--lambda-knn", loss_weights.knn)->capture_default_str();
    loss->add_option("--lambda-end", loss_weights.end)->capture_default_str();
    loss->add_option("--lambda-q", loss_weights.q)->capture_default_str();

    // retarget -------------------------------------------------------------
    CLI::App* retarget =
        app.add_subcommand("retarget", "Reconstruct a motion on a different skeleton");
    std::string rt_sa, rt_ma, rt_sb, rt_out, rt_trace;
    CommonSampling rt_cfg;
    pm::ObjectiveWeights rt_weights;
    pm::OptimizerConfig rt_opt;
    rt_opt.seed = default_seed();
    std::uint64_t rt_seed_a = 1, rt_seed_b = 2;
    retarget->add_option("--source-skel", rt_sa)->required();
    retarget->add_option("--source-motion", rt_ma)->required();
    retarget->add_option("--target-skel", rt_sb)->required();
    retarget->add_option("--out", rt_out, "Output motion file")->required();
    retarget->add_option("--trace", rt_trace, "Optimization trace (JSON lines)");
    add_sampling_flags(retarget, rt_cfg);
    retarget->add_option("--source-seed", rt_seed_a)->capture_default_str();
    retarget->add_option("--target-seed", rt_seed_b)->capture_default_str();
    retarget->add_option("--lambda-knn", rt_weights.knn)->capture_default_str();
    retarget->add_option("--lambda-end", rt_weights.end)->capture_default_str();
    retarget->add_option("--lambda-q", rt_weights.q)->capture_default_str();
    retarget->add_option("--iterations", rt_opt.max_iterations)->capture_default_str();
    retarget->add_option("--step-size", rt_opt.step_size)->capture_default_str();
    retarget->add_option("--step-decay", rt_opt.final_step_factor,
                         "Geometric step anneal: final step = step-size * this")
        ->capture_default_str();
    retarget->add_option("--reassign-interval", rt_opt.reassign_interval)->capture_default_str();
    retarget->add_option("--tol", rt_opt.convergence_tol)->capture_default_str();
    retarget->add_option("--seed", rt_opt.seed, "Init perturbation seed")->capture_default_str();

    // interp ----------------------------------------------------------------
    CLI::App* interp = app.add_subcommand("interp", "Baseline keyframe interpolation");
    std::string interp_motion, interp_out;
    int interp_interval = 5;
    interp->add_option("--motion", interp_motion)->required();
    interp->add_option("--interval", interp_interval, "Keyframe spacing in frames")
        ->capture_default_str();
    interp->add_option("--out", interp_out, "Output motion file")->required();

    // eval -------------------------------------------------------------------
    CLI::App* eval = app.add_subcommand("eval", "Interpolation metrics against ground truth");
    std::string eval_skel, eval_gt, eval_pred;
    int eval_interval = 0;
    eval->add_option("--skeleton", eval_skel)->required();
    eval->add_option("--gt", eval_gt, "Ground-truth motion")->required();
    eval->add_option("--pred", eval_pred, "Predicted motion")->required();
    eval->add_option("--interval", eval_interval,
                     "Keyframe spacing; keyframes are excluded from L2P/L2Q (0 = use all frames)")
        ->capture_default_str();

    // augment ------------------------------------------------------------------
    CLI::App* augment = app.add_subcommand("augment", "Emit FOQ training samples with RPA");
    std::string aug_skel, aug_motion, aug_out;
    double aug_offset = 0.05;
    std::uint64_t aug_seed = default_seed();
    int aug_rounds = 1;
    std::vector<int> aug_intervals{5, 15, 30};
    augment->add_option("--skeleton", aug_skel)->required();
    augment->add_option("--motion", aug_motion)->required();
    augment->add_option("--out", aug_out, "Training sample stream (JSON lines)")->required();
    augment->add_option("--offset-scale", aug_offset, "RPA tail offset stddev in meters")
        ->capture_default_str();
    augment->add_option("--seed", aug_seed)->capture_default_str();
    augment->add_option("--rounds", aug_rounds, "Augmentation rounds")->capture_default_str();
    augment->add_option("--intervals", aug_intervals, "Keyframe intervals")->capture_default_str();

    // foq -------------------------------------------------------------------
    CLI::App* foq = app.add_subcommand("foq", "First-frame offset quaternion transforms");
    foq->require_subcommand(1);
    CLI::App* foq_encode = foq->add_subcommand("encode", "Motion to FOQ tracks");
    std::string foqe_motion, foqe_out;
    foq_encode->add_option("--motion", foqe_motion)->required();
    foq_encode->add_option("--out", foqe_out)->required();
    CLI::App* foq_decode = foq->add_subcommand("decode", "FOQ tracks back to a motion");
    std::string foqd_in, foqd_ref, foqd_out;
    int foqd_ref_frame = 0;
    foq_decode->add_option("--foq", foqd_in, "FOQ file (motion format)")->required();
    foq_decode->add_option("--reference", foqd_ref, "Motion supplying the known pose")->required();
    foq_decode->add_option("--ref-frame", foqd_ref_frame)->capture_default_str();
    foq_decode->add_option("--out", foqd_out)->required();

    // import-bvh ---------------------------------------------------------------
    CLI::App* import = app.add_subcommand("import-bvh", "Import a BVH file (documented subset)");
    std::string bvh_path, bvh_map, bvh_out_skel, bvh_out_motion;
    import->add_option("--bvh", bvh_path)->required();
    import->add_option("--map", bvh_map,
                       "JSON mapping {groups: {joint: group}, end_effectors: {joint: tag}, "
                       "scale: factor}")
        ->required();
    import->add_option("--out-skeleton", bvh_out_skel)->required();
    import->add_option("--out-motion", bvh_out_motion)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitIo;
    }

    if (*validate) {
        const pm::Skeleton skel = pm::load_skeleton(skel_path);
        const pm::ValidationReport report = pm::validate_skeleton(skel);
        std::cout << pm::report_to_json(report) << "\n";
        return report.ok() ? kExitOk : kExitValidation;
    }

    if (*sample) {
        const pm::Skeleton skel = load_validated_skeleton(sample_skel);
        pm::CloudSpec spec =
            pm::sample_cloud_spec(skel, sample_cfg.points, sample_cfg.sigma, sample_seed);
        spec.skeleton_id = sample_skel;
        pm::save_cloud_spec(spec, sample_out);
        if (!sample_traj_out.empty()) {
            if (sample_motion.empty()) {
                throw pm::IoError("--trajectory-out requires --motion");
            }
            const pm::MotionSequence motion = pm::load_motion(sample_motion);
            pm::save_cloud_trajectory(pm::realize_trajectory(spec, skel, motion),
                                      sample_traj_out);
        }
        return kExitOk;
    }

    if (*loss) {
        const pm::Skeleton sa = load_validated_skeleton(loss_sa);
        const pm::Skeleton sb = load_validated_skeleton(loss_sb);
        const pm::MotionSequence ma = pm::load_motion(loss_ma);
        const pm::MotionSequence mb = pm::load_motion(loss_mb);
        pm::validate_motion(sa, ma);
        pm::validate_motion(sb, mb);
        const pm::CloudSpec spec_a =
            pm::sample_cloud_spec(sa, loss_cfg.points, loss_cfg.sigma, loss_seed_a);
        const pm::CloudSpec spec_b =
            pm::sample_cloud_spec(sb, loss_cfg.points, loss_cfg.sigma, loss_seed_b);
        const pm::CloudTrajectory xa = pm::realize_trajectory(spec_a, sa, ma);
        const pm::CloudTrajectory xb = pm::realize_trajectory(spec_b, sb, mb);

        pm::KnnConfig knn_cfg;
        knn_cfg.k = loss_cfg.k;
        knn_cfg.threads = loss_cfg.threads;
        pm::ObjectiveBreakdown breakdown;
        breakdown.weights = loss_weights;
        const pm::KnnLossResult knn = pm::knn_loss(xa, xb, knn_cfg);
        breakdown.l_knn_raw = knn.raw;
        breakdown.l_knn_normalized = knn.normalized;
        const pm::EndEffectorMap map = pm::match_end_effectors(sa, sb);
        breakdown.l_end =
            pm::end_effector_loss(sa, ma, sb, mb, map, &breakdown.end_effector_map_empty);
        breakdown.l_q = pm::unit_norm_penalty(mb.rotations);
        breakdown.total = loss_weights.knn * knn.normalized + loss_weights.end * breakdown.l_end +
                          loss_weights.q * breakdown.l_q;
        std::cout << pm::report_to_json(breakdown) << "\n";
        return kExitOk;
    }

    if (*retarget) {
        const pm::Skeleton sa = load_validated_skeleton(rt_sa);
        const pm::Skeleton sb = load_validated_skeleton(rt_sb);
        const pm::MotionSequence ma = pm::load_motion(rt_ma);
        pm::validate_motion(sa, ma);
        const pm::CloudSpec spec_a =
            pm::sample_cloud_spec(sa, rt_cfg.points, rt_cfg.sigma, rt_seed_a);
        const pm::CloudSpec spec_b =
            pm::sample_cloud_spec(sb, rt_cfg.points, rt_cfg.sigma, rt_seed_b);
        const pm::RetargetProblem problem =
            pm::make_retarget_problem(sa, ma, spec_a, sb, spec_b);
        pm::KnnConfig knn_cfg;
        knn_cfg.k = rt_cfg.k;
        knn_cfg.threads = rt_cfg.threads;
        const auto [motion, trace] = pm::optimize(problem, rt_weights, knn_cfg, rt_opt);
        pm::save_motion(motion, rt_out, rt_sb);
        if (!rt_trace.empty()) {
            pm::write_trace(trace, rt_trace);
        }
        std::cout << "retarget: best total " << trace.best_total << " at iteration "
                  << trace.best_iteration << " (" << trace.entries.size() << " iterations)\n";
        return trace.aborted_non_finite ? kExitValidation : kExitOk;
    }

    if (*interp) {
        const pm::MotionSequence motion = pm::load_motion(interp_motion);
        const pm::KeyframeSet keys = pm::extract_keyframes(motion, interp_interval);
        pm::save_motion(pm::interpolate_baseline(motion, keys), interp_out);
        return kExitOk;
    }

    if (*eval) {
        const pm::Skeleton skel = load_validated_skeleton(eval_skel);
        const pm::MotionSequence gt = pm::load_motion(eval_gt);
        const pm::MotionSequence pred = pm::load_motion(eval_pred);
        pm::validate_motion(skel, gt);
        pm::validate_motion(skel, pred);
        pm::KeyframeSet keys;
        if (eval_interval > 0) {
            keys = pm::extract_keyframes(gt, eval_interval);
        }
        std::cout << pm::report_to_json(pm::evaluate_metrics(skel, gt, pred, keys)) << "\n";
        return kExitOk;
    }

    if (*augment) {
        const pm::Skeleton skel = load_validated_skeleton(aug_skel);
        const pm::MotionSequence motion = pm::load_motion(aug_motion);
        const auto samples = pm::emit_training_samples(skel, motion, aug_intervals, aug_offset,
                                                       aug_seed, aug_rounds);
        pm::write_training_samples(samples, aug_out);
        std::cout << "augment: wrote " << samples.size() << " samples\n";
        return kExitOk;
    }

    if (*foq_encode) {
        const pm::MotionSequence motion = pm::load_motion(foqe_motion);
        pm::MotionSequence out = motion;
        std::vector<pm::Quat> track(motion.frame_count());
        for (int n = 0; n < motion.bone_count; ++n) {
            for (int t = 0; t < motion.frame_count(); ++t) {
                track[t] = motion.rotation(t, n);
            }
            const pm::FoqSequence foq_seq = pm::foq_encode(track);
            for (int t = 0; t < motion.frame_count(); ++t) {
                out.rotation(t, n) = foq_seq.offsets[t];
            }
        }
        pm::save_motion(out, foqe_out, "foq");
        return kExitOk;
    }

    if (*foq_decode) {
        const pm::MotionSequence foq_motion = pm::load_motion(foqd_in);
        const pm::MotionSequence ref = pm::load_motion(foqd_ref);
        if (ref.bone_count != foq_motion.bone_count ||
            ref.frame_count() != foq_motion.frame_count()) {
            throw std::invalid_argument("foq decode: reference shape mismatch");
        }
        pm::MotionSequence out = foq_motion;
        for (int n = 0; n < foq_motion.bone_count; ++n) {
            pm::FoqSequence foq_seq;
            foq_seq.offsets.resize(foq_motion.frame_count());
            for (int t = 0; t < foq_motion.frame_count(); ++t) {
                foq_seq.offsets[t] = foq_motion.rotation(t, n);
            }
            const std::vector<pm::Quat> track = pm::foq_decode(
                foq_seq, ref.rotation(foqd_ref_frame, n), static_cast<std::size_t>(foqd_ref_frame));
            for (int t = 0; t < foq_motion.frame_count(); ++t) {
                out.rotation(t, n) = track[t];
            }
        }
        pm::save_motion(out, foqd_out);
        return kExitOk;
    }

    if (*import) {
        std::ifstream map_in(bvh_map);
        if (!map_in) {
            throw pm::IoError(bvh_map + ": cannot open file");
        }
        nlohmann::json map_json = nlohmann::json::parse(map_in);
        pm::BvhImportOptions options;
        options.scale_to_meters = map_json.value("scale", 1.0);
        for (const auto& [joint, group] : map_json.at("groups").items()) {
            const auto parsed = pm::parse_body_group(group.get<std::string>());
            if (!parsed) {
                throw std::invalid_argument(bvh_map + ": unknown body group '" +
                                            group.get<std::string>() + "'");
            }
            options.groups[joint] = *parsed;
        }
        if (map_json.contains("end_effectors")) {
            for (const auto& [joint, tag] : map_json.at("end_effectors").items()) {
                const auto parsed = pm::parse_end_effector(tag.get<std::string>());
                if (!parsed) {
                    throw std::invalid_argument(bvh_map + ": unknown end-effector tag '" +
                                                tag.get<std::string>() + "'");
                }
                options.end_effectors[joint] = *parsed;
            }
        }
        const auto [skel, motion] = pm::import_bvh(pm::parse_bvh(bvh_path), options);
        pm::save_skeleton(skel, bvh_out_skel);
        pm::save_motion(motion, bvh_out_motion, bvh_out_skel);
        return kExitOk;
    }

    return kExitIo;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const pm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
