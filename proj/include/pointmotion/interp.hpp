#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pointmotion/skeleton.hpp"

namespace pointmotion {

/// Ascending keyframe indices; both endpoints are always present.
struct KeyframeSet {
    std::vector<int> frames;
    int interval = 1;

    bool contains(int frame) const;
};

/// {0, interval, 2*interval, ...} plus the final frame. Throws when the
/// motion has fewer than 2 frames or the interval is < 1.
KeyframeSet extract_keyframes(int frame_count, int interval);
KeyframeSet extract_keyframes(const MotionSequence& m, int interval);

/// The conventional baseline: root positions linearly interpolated between
/// consecutive keyframes, per-bone global quaternions slerped with
/// hemisphere alignment. Keyframe poses are reproduced bit-exactly.
MotionSequence interpolate_baseline(const MotionSequence& keyed, const KeyframeSet& keys);

struct MetricReport {
    double l2p = 0.0;   // meters
    double l2q = 0.0;   // unitless
    double npss = 0.0;  // unitless
    std::string label;  // optional aggregation tag (motion category etc.)
};

/// Mean Euclidean distance between global head positions over non-keyframe
/// frames and all bones. Pass an empty KeyframeSet to average every frame.
double l2p(const Skeleton& skel, const MotionSequence& gt, const MotionSequence& pred,
           const KeyframeSet& keys = {});

/// Mean quaternion difference ||q_gt - q_pred||_2 after hemisphere-aligning
/// pred to gt per element, over non-keyframe frames and all bones.
double l2q(const MotionSequence& gt, const MotionSequence& pred, const KeyframeSet& keys = {});

/// Power-weighted earth-mover's distance between normalized temporal power
/// spectra of the flattened rotation features (D = 4 * bones). Dimensions
/// whose ground-truth power is below 1e-12 are skipped; a prediction
/// dimension below that threshold is treated as a constant signal (all power
/// at DC). Throws "degenerate spectrum" when every ground-truth dimension is
/// powerless. Runs over the full sequence; keyframes are not excluded since
/// the spectrum is not a per-frame average.
double npss(const MotionSequence& gt, const MotionSequence& pred);

MetricReport evaluate_metrics(const Skeleton& skel, const MotionSequence& gt,
                              const MotionSequence& pred, const KeyframeSet& keys = {});

/// One emitted supervision record: the keyframe mask for an interval, the
/// first-frame-offset rotation tracks of an augmented motion, and enough
/// metadata to reproduce the augmentation.
struct TrainingSample {
    int interval = 1;
    std::vector<bool> keyframe_mask;       // per frame
    std::vector<Vec3> root_positions;      // per frame
    std::vector<std::vector<Quat>> foq;    // [bone][frame], element 0 identity
    double offset_scale = 0.0;
    std::uint64_t rpa_seed = 0;
};

/// Emits one sample per (augmentation round, interval): each round applies
/// rest pose augmentation with seed base_seed + round, FOQ-encodes every
/// bone's rotation track, and records the keyframe mask for each requested
/// interval. Deterministic for fixed seeds.
std::vector<TrainingSample> emit_training_samples(const Skeleton& s, const MotionSequence& m,
                                                  const std::vector<int>& intervals,
                                                  double offset_scale, std::uint64_t base_seed,
                                                  int rounds = 1);

}  // namespace pointmotion
