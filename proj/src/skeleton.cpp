#include "pointmotion/skeleton.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "pointmotion/rng.hpp"

namespace pointmotion {

const char* to_string(BodyGroup g) {
    switch (g) {
        case BodyGroup::spine: return "spine";
        case BodyGroup::left_arm: return "left_arm";
        case BodyGroup::right_arm: return "right_arm";
        case BodyGroup::left_leg: return "left_leg";
        case BodyGroup::right_leg: return "right_leg";
    }
    return "?";
}

const char* to_string(EndEffector e) {
    switch (e) {
        case EndEffector::hand_l: return "hand_l";
        case EndEffector::hand_r: return "hand_r";
        case EndEffector::foot_l: return "foot_l";
        case EndEffector::foot_r: return "foot_r";
        case EndEffector::head: return "head";
    }
    return "?";
}

std::optional<BodyGroup> parse_body_group(const std::string& s) {
    if (s == "spine") return BodyGroup::spine;
    if (s == "left_arm") return BodyGroup::left_arm;
    if (s == "right_arm") return BodyGroup::right_arm;
    if (s == "left_leg") return BodyGroup::left_leg;
    if (s == "right_leg") return BodyGroup::right_leg;
    return std::nullopt;
}

std::optional<EndEffector> parse_end_effector(const std::string& s) {
    if (s == "hand_l") return EndEffector::hand_l;
    if (s == "hand_r") return EndEffector::hand_r;
    if (s == "foot_l") return EndEffector::foot_l;
    if (s == "foot_r") return EndEffector::foot_r;
    if (s == "head") return EndEffector::head;
    return std::nullopt;
}

int Skeleton::find_bone(const std::string& name) const {
    for (int i = 0; i < bone_count(); ++i) {
        if (bones[i].name == name) return i;
    }
    return -1;
}

ValidationReport validate_skeleton(const Skeleton& s) {
    ValidationReport report;
    const int n = s.bone_count();
    if (n == 0) {
        report.errors.push_back("skeleton has no bones");
        return report;
    }

    int root_count = 0;
    for (int i = 0; i < n; ++i) {
        const Bone& b = s.bones[i];
        if (b.parent < 0) {
            ++root_count;
            if (i != 0) {
                report.errors.push_back("bone '" + b.name + "' (index " + std::to_string(i) +
                                        ") has no parent but is not bone 0");
            }
        } else {
            if (b.parent >= n) {
                report.errors.push_back("bone '" + b.name + "' parent index out of range");
            } else if (b.parent >= i) {
                report.errors.push_back("bone '" + b.name + "' (index " + std::to_string(i) +
                                        ") precedes its parent (index " +
                                        std::to_string(b.parent) + ")");
            }
        }
        const int g = static_cast<int>(b.group);
        if (g < 0 || g >= kBodyGroupCount) {
            report.errors.push_back("bone '" + b.name + "' has no valid body group");
        }
        if (b.zero_length()) {
            report.warnings.push_back("bone '" + b.name + "' has zero length; excluded from sampling");
            report.sampling_excluded.push_back(i);
        }
    }
    if (root_count == 0) {
        report.errors.push_back("skeleton has no root bone");
    } else if (root_count > 1) {
        report.errors.push_back("skeleton has " + std::to_string(root_count) + " root bones");
    }

    std::unordered_set<std::string> names;
    for (const Bone& b : s.bones) {
        if (!names.insert(b.name).second) {
            report.errors.push_back("duplicate bone name '" + b.name + "'");
        }
    }
    std::set<EndEffector> tags;
    for (const Bone& b : s.bones) {
        if (b.end_effector && !tags.insert(*b.end_effector).second) {
            report.errors.push_back("end-effector tag '" + std::string(to_string(*b.end_effector)) +
                                    "' appears more than once");
        }
    }
    return report;
}

void validate_motion(const Skeleton& s, const MotionSequence& m) {
    if (m.bone_count != s.bone_count()) {
        throw std::invalid_argument("motion bone count " + std::to_string(m.bone_count) +
                                    " does not match skeleton bone count " +
                                    std::to_string(s.bone_count()));
    }
    if (m.rotations.size() != static_cast<std::size_t>(m.frame_count()) * m.bone_count) {
        throw std::invalid_argument("motion rotation array has wrong shape");
    }
    for (const Quat& q : m.rotations) {
        if (std::abs(q.norm() - 1.0) > 1e-6) {
            throw std::invalid_argument("motion contains a non-unit quaternion");
        }
    }
}

std::vector<Vec3> fk_heads(const Skeleton& s, const MotionSequence& m, int frame) {
    if (frame < 0 || frame >= m.frame_count()) {
        throw std::invalid_argument("fk_heads: frame " + std::to_string(frame) + " out of range");
    }
    const int n = s.bone_count();
    std::vector<Vec3> heads(n);
    for (int i = 0; i < n; ++i) {
        const Bone& b = s.bones[i];
        if (b.is_root()) {
            heads[i] = m.root_positions[frame];
        } else {
            heads[i] = heads[b.parent] + quat_rotate(b.head, m.rotation(frame, b.parent));
        }
    }
    return heads;
}

std::vector<Vec3> fk_tails(const Skeleton& s, const MotionSequence& m, int frame) {
    std::vector<Vec3> tails = fk_heads(s, m, frame);
    for (int i = 0; i < s.bone_count(); ++i) {
        tails[i] += quat_rotate(s.bones[i].tail, m.rotation(frame, i));
    }
    return tails;
}

EndEffectorMap match_end_effectors(const Skeleton& a, const Skeleton& b) {
    EndEffectorMap map;
    constexpr EndEffector kTags[] = {EndEffector::hand_l, EndEffector::hand_r,
                                     EndEffector::foot_l, EndEffector::foot_r,
                                     EndEffector::head};
    for (EndEffector tag : kTags) {
        int ia = -1, ib = -1;
        for (int i = 0; i < a.bone_count(); ++i) {
            if (a.bones[i].end_effector == tag) ia = i;
        }
        for (int i = 0; i < b.bone_count(); ++i) {
            if (b.bones[i].end_effector == tag) ib = i;
        }
        if (ia >= 0 && ib >= 0) {
            map.pairs.push_back({tag, ia, ib});
        }
    }
    return map;
}

std::pair<Skeleton, MotionSequence> rpa_augment(const Skeleton& s, const MotionSequence& m,
                                                double offset_scale, std::uint64_t seed) {
    if (offset_scale < 0.0) {
        throw std::invalid_argument("rpa_augment: negative offset scale");
    }
    if (offset_scale == 0.0) {
        return {s, m};
    }
    validate_motion(s, m);

    Skeleton aug = s;
    MotionSequence out = m;
    Rng rng(seed);
    const int n = s.bone_count();
    for (int i = 0; i < n; ++i) {
        const Bone& bone = s.bones[i];
        if (bone.zero_length()) {
            // no geometry to perturb; quaternions pass through untouched
            continue;
        }
        const Vec3 offset{rng.normal(0.0, offset_scale), rng.normal(0.0, offset_scale),
                          rng.normal(0.0, offset_scale)};
        const Vec3 new_tail = bone.tail + offset;
        aug.bones[i].tail = new_tail;
        // Constant right-factor turning the augmented local tail back toward
        // the original direction. Sign-canonicalized so a zero offset stays
        // exactly identity.
        Quat delta = align_max_real(bone.tail, new_tail);
        if (delta.w < 0.0) delta = -delta;
        for (int t = 0; t < m.frame_count(); ++t) {
            out.rotation(t, i) = m.rotation(t, i) * delta;
        }
    }
    return {aug, out};
}

}  // namespace pointmotion
