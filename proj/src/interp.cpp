#include "pointmotion/interp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace pointmotion {

bool KeyframeSet::contains(int frame) const {
    return std::binary_search(frames.begin(), frames.end(), frame);
}

KeyframeSet extract_keyframes(int frame_count, int interval) {
    if (frame_count < 2) {
        throw std::invalid_argument("extract_keyframes: need at least 2 frames");
    }
    if (interval < 1) {
        throw std::invalid_argument("extract_keyframes: interval must be >= 1");
    }
    KeyframeSet keys;
    keys.interval = interval;
    for (int f = 0; f < frame_count; f += interval) {
        keys.frames.push_back(f);
    }
    if (keys.frames.back() != frame_count - 1) {
        keys.frames.push_back(frame_count - 1);
    }
    return keys;
}

KeyframeSet extract_keyframes(const MotionSequence& m, int interval) {
    return extract_keyframes(m.frame_count(), interval);
}

MotionSequence interpolate_baseline(const MotionSequence& keyed, const KeyframeSet& keys) {
    if (keys.frames.size() < 2 || keys.frames.front() != 0 ||
        keys.frames.back() != keyed.frame_count() - 1) {
        throw std::invalid_argument("interpolate_baseline: keyframe set does not span the motion");
    }
    MotionSequence out = keyed;
    for (std::size_t s = 0; s + 1 < keys.frames.size(); ++s) {
        const int k0 = keys.frames[s];
        const int k1 = keys.frames[s + 1];
        for (int t = k0 + 1; t < k1; ++t) {
            const double alpha = static_cast<double>(t - k0) / (k1 - k0);
            out.root_positions[t] =
                keyed.root_positions[k0] * (1.0 - alpha) + keyed.root_positions[k1] * alpha;
            for (int n = 0; n < keyed.bone_count; ++n) {
                out.rotation(t, n) = slerp(keyed.rotation(k0, n), keyed.rotation(k1, n), alpha);
            }
        }
    }
    return out;
}

namespace {

void check_comparable(const MotionSequence& gt, const MotionSequence& pred) {
    if (gt.frame_count() != pred.frame_count() || gt.bone_count != pred.bone_count) {
        throw std::invalid_argument("metric inputs have mismatched shapes");
    }
}

// Mean over non-keyframe frames of per-frame values produced by fn.
template <typename Fn>
double mean_over_eval_frames(int frame_count, const KeyframeSet& keys, Fn&& fn) {
    double sum = 0.0;
    long count = 0;
    for (int t = 0; t < frame_count; ++t) {
        if (!keys.frames.empty() && keys.contains(t)) {
            continue;
        }
        sum += fn(t);
        ++count;
    }
    return count == 0 ? 0.0 : sum / count;
}

}  // namespace

double l2p(const Skeleton& skel, const MotionSequence& gt, const MotionSequence& pred,
           const KeyframeSet& keys) {
    check_comparable(gt, pred);
    if (skel.bone_count() != gt.bone_count) {
        throw std::invalid_argument("l2p: skeleton does not match motions");
    }
    const int bones = skel.bone_count();
    return mean_over_eval_frames(gt.frame_count(), keys, [&](int t) {
        const std::vector<Vec3> heads_gt = fk_heads(skel, gt, t);
        const std::vector<Vec3> heads_pred = fk_heads(skel, pred, t);
        double frame_sum = 0.0;
        for (int n = 0; n < bones; ++n) {
            frame_sum += distance(heads_gt[n], heads_pred[n]);
        }
        return frame_sum / bones;
    });
}

double l2q(const MotionSequence& gt, const MotionSequence& pred, const KeyframeSet& keys) {
    check_comparable(gt, pred);
    const int bones = gt.bone_count;
    return mean_over_eval_frames(gt.frame_count(), keys, [&](int t) {
        double frame_sum = 0.0;
        for (int n = 0; n < bones; ++n) {
            const Quat& a = gt.rotation(t, n);
            const Quat b = hemisphere_align(pred.rotation(t, n), a);
            const double dw = a.w - b.w, dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
            frame_sum += std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz);
        }
        return frame_sum / bones;
    });
}

namespace {

// Squared-magnitude DFT over time of one feature dimension, direct O(T^2)
// evaluation; sequence lengths here are at most a few hundred frames.
double quat_component(const Quat& q, int i) {
    switch (i) {
        case 0: return q.w;
        case 1: return q.x;
        case 2: return q.y;
        default: return q.z;
    }
}

std::vector<double> power_spectrum(const std::vector<double>& signal) {
    const std::size_t n = signal.size();
    std::vector<double> power(n);
    constexpr double kTwoPi = 6.28318530717958647692;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double phase = -kTwoPi * static_cast<double>(k) * static_cast<double>(t) / n;
            acc += signal[t] * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        power[k] = std::norm(acc);
    }
    return power;
}

}  // namespace

double npss(const MotionSequence& gt, const MotionSequence& pred) {
    check_comparable(gt, pred);
    if (gt.frame_count() < 2) {
        throw std::invalid_argument("npss: need at least 2 frames");
    }
    const int frames = gt.frame_count();
    const int dims = gt.bone_count * 4;

    std::vector<double> signal_gt(frames), signal_pred(frames);
    double total_gt_power = 0.0;
    double weighted_emd = 0.0;

    for (int d = 0; d < dims; ++d) {
        const int bone = d / 4;
        const int comp = d % 4;
        for (int t = 0; t < frames; ++t) {
            signal_gt[t] = quat_component(gt.rotation(t, bone), comp);
            signal_pred[t] = quat_component(pred.rotation(t, bone), comp);
        }
        std::vector<double> pw_gt = power_spectrum(signal_gt);
        double sum_gt = 0.0;
        for (double v : pw_gt) sum_gt += v;
        if (sum_gt < 1e-12) {
            continue;  // powerless ground-truth dimension carries no weight
        }
        std::vector<double> pw_pred = power_spectrum(signal_pred);
        double sum_pred = 0.0;
        for (double v : pw_pred) sum_pred += v;
        if (sum_pred < 1e-12) {
            // constant-signal limit: all prediction power at DC
            std::fill(pw_pred.begin(), pw_pred.end(), 0.0);
            pw_pred[0] = 1.0;
            sum_pred = 1.0;
        }

        // 1-D earth-mover's distance between the cumulative normalized spectra.
        double cdf_gt = 0.0, cdf_pred = 0.0, emd = 0.0;
        for (int k = 0; k < frames; ++k) {
            cdf_gt += pw_gt[k] / sum_gt;
            cdf_pred += pw_pred[k] / sum_pred;
            emd += std::abs(cdf_gt - cdf_pred);
        }
        weighted_emd += emd * sum_gt;
        total_gt_power += sum_gt;
    }
    if (total_gt_power <= 0.0) {
        throw std::invalid_argument("npss: degenerate spectrum");
    }
    return weighted_emd / total_gt_power;
}

MetricReport evaluate_metrics(const Skeleton& skel, const MotionSequence& gt,
                              const MotionSequence& pred, const KeyframeSet& keys) {
    MetricReport report;
    report.l2p = l2p(skel, gt, pred, keys);
    report.l2q = l2q(gt, pred, keys);
    report.npss = npss(gt, pred);
    return report;
}

std::vector<TrainingSample> emit_training_samples(const Skeleton& s, const MotionSequence& m,
                                                  const std::vector<int>& intervals,
                                                  double offset_scale, std::uint64_t base_seed,
                                                  int rounds) {
    validate_motion(s, m);
    if (intervals.empty() || rounds < 1) {
        throw std::invalid_argument("emit_training_samples: need intervals and rounds >= 1");
    }
    std::vector<TrainingSample> samples;
    samples.reserve(static_cast<std::size_t>(rounds) * intervals.size());
    const int frames = m.frame_count();
    for (int round = 0; round < rounds; ++round) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(round);
        const auto [aug_skel, aug_motion] = rpa_augment(s, m, offset_scale, seed);
        (void)aug_skel;

        std::vector<std::vector<Quat>> foq_tracks(s.bone_count());
        std::vector<Quat> track(frames);
        for (int n = 0; n < s.bone_count(); ++n) {
            for (int t = 0; t < frames; ++t) {
                track[t] = aug_motion.rotation(t, n);
            }
            foq_tracks[n] = foq_encode(track).offsets;
        }

        for (int interval : intervals) {
            const KeyframeSet keys = extract_keyframes(frames, interval);
            TrainingSample sample;
            sample.interval = interval;
            sample.keyframe_mask.assign(frames, false);
            for (int f : keys.frames) {
                sample.keyframe_mask[f] = true;
            }
            sample.root_positions = aug_motion.root_positions;
            sample.foq = foq_tracks;
            sample.offset_scale = offset_scale;
            sample.rpa_seed = seed;
            samples.push_back(std::move(sample));
        }
    }
    return samples;
}

}  // namespace pointmotion
