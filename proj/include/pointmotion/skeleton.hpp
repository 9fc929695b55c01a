#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pointmotion/quat.hpp"
#include "pointmotion/vec3.hpp"

namespace pointmotion {

/// Body-part category attached to every bone and inherited by sampled
/// points; points of differing groups never match in the neighbor search.
enum class BodyGroup : std::uint8_t { spine, left_arm, right_arm, left_leg, right_leg };

enum class EndEffector : std::uint8_t { hand_l, hand_r, foot_l, foot_r, head };

constexpr int kBodyGroupCount = 5;

const char* to_string(BodyGroup g);
const char* to_string(EndEffector e);
std::optional<BodyGroup> parse_body_group(const std::string& s);
std::optional<EndEffector> parse_end_effector(const std::string& s);

/// One bone of the hierarchy. head is the offset from the parent head in the
/// parent-local frame (unused for the root, which has no head); tail is the
/// segment end offset in the bone's own local frame. Units are meters.
struct Bone {
    std::string name;
    int parent = -1;  // -1 for the root only
    Vec3 head;
    Vec3 tail;
    BodyGroup group = BodyGroup::spine;
    std::optional<EndEffector> end_effector;

    bool is_root() const { return parent < 0; }
    bool zero_length() const { return tail.norm_squared() <= 0.0; }
};

/// Bone tree in topological order: every parent index precedes its children.
struct Skeleton {
    std::vector<Bone> bones;

    int bone_count() const { return static_cast<int>(bones.size()); }
    int find_bone(const std::string& name) const;
};

/// Per-frame root position plus per-bone global (world-frame) unit
/// quaternions, frame-major.
struct MotionSequence {
    double frame_rate = 30.0;
    std::vector<Vec3> root_positions;             // size = frame_count
    std::vector<Quat> rotations;                  // size = frame_count * bone_count
    int bone_count = 0;

    int frame_count() const { return static_cast<int>(root_positions.size()); }
    Quat& rotation(int frame, int bone) { return rotations[static_cast<std::size_t>(frame) * bone_count + bone]; }
    const Quat& rotation(int frame, int bone) const {
        return rotations[static_cast<std::size_t>(frame) * bone_count + bone];
    }
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    std::vector<int> sampling_excluded;  // zero-length bones, kept out of point sampling

    bool ok() const { return errors.empty(); }
};

/// Checks tree structure, topological ordering, zero-length bones, duplicate
/// names and duplicate end-effector tags. Zero-length bones are warnings:
/// they keep their quaternions but are excluded from sampling.
ValidationReport validate_skeleton(const Skeleton& s);

/// Throws std::invalid_argument when the motion does not fit the skeleton or
/// carries non-unit rotations (tolerance 1e-6).
void validate_motion(const Skeleton& s, const MotionSequence& m);

/// Global head positions for every bone at one frame: the root head is the
/// root position, each child head adds its offset rotated by the parent's
/// global quaternion.
std::vector<Vec3> fk_heads(const Skeleton& s, const MotionSequence& m, int frame);

/// Global tail positions: head plus the tail offset rotated by the bone's
/// own global quaternion.
std::vector<Vec3> fk_tails(const Skeleton& s, const MotionSequence& m, int frame);

/// Matched source/target bone pair sharing an end-effector tag.
struct EndEffectorPair {
    EndEffector tag;
    int source_bone = -1;
    int target_bone = -1;
};

struct EndEffectorMap {
    std::vector<EndEffectorPair> pairs;  // ordered by tag for determinism
};

/// Pairs bones of the two skeletons carrying the same end-effector tag;
/// unmatched tags are omitted.
EndEffectorMap match_end_effectors(const Skeleton& a, const Skeleton& b);

/// Rest pose augmentation: perturbs every non-zero-length bone tail by a
/// seeded isotropic normal offset of standard deviation offset_scale, then
/// right-composes each bone's rotations with the constant max-real alignment
/// quaternion that maps the augmented local tail back onto the original tail
/// direction. The augmented global tail directions therefore match the
/// originals while the rest configuration changes. offset_scale = 0 returns
/// the inputs unchanged. Offsets are drawn bone-major, axes x,y,z.
std::pair<Skeleton, MotionSequence> rpa_augment(const Skeleton& s, const MotionSequence& m,
                                                double offset_scale, std::uint64_t seed);

}  // namespace pointmotion
