// Synthetic skeletons and procedural motions shared by the unit and
// acceptance suites. Proportions are human-ish in meters, Y up, Z forward.
#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "pointmotion/skeleton.hpp"

namespace fixtures {

using pointmotion::BodyGroup;
using pointmotion::Bone;
using pointmotion::EndEffector;
using pointmotion::MotionSequence;
using pointmotion::Quat;
using pointmotion::Skeleton;
using pointmotion::Vec3;

inline Bone make_bone(std::string name, int parent, Vec3 head, Vec3 tail, BodyGroup group,
                      std::optional<EndEffector> ee = std::nullopt) {
    Bone b;
    b.name = std::move(name);
    b.parent = parent;
    b.head = head;
    b.tail = tail;
    b.group = group;
    b.end_effector = ee;
    return b;
}

inline void add_arm(Skeleton& s, int chest, const char* side, double sx, EndEffector hand) {
    const int shoulder = s.bone_count();
    s.bones.push_back(make_bone(std::string("shoulder_") + side, chest, {sx * 0.06, 0.14, 0.0},
                                {sx * 0.12, 0.0, 0.0},
                                sx > 0 ? BodyGroup::left_arm : BodyGroup::right_arm));
    s.bones.push_back(make_bone(std::string("upperarm_") + side, shoulder, {sx * 0.12, 0.0, 0.0},
                                {sx * 0.28, 0.0, 0.0}, s.bones[shoulder].group));
    s.bones.push_back(make_bone(std::string("forearm_") + side, shoulder + 1,
                                {sx * 0.28, 0.0, 0.0}, {sx * 0.26, 0.0, 0.0},
                                s.bones[shoulder].group));
    s.bones.push_back(make_bone(std::string("hand_") + side, shoulder + 2, {sx * 0.26, 0.0, 0.0},
                                {sx * 0.10, 0.0, 0.0}, s.bones[shoulder].group, hand));
}

inline void add_leg(Skeleton& s, int hips, const char* side, double sx, EndEffector foot,
                    bool with_toe) {
    const BodyGroup group = sx > 0 ? BodyGroup::left_leg : BodyGroup::right_leg;
    const int thigh = s.bone_count();
    s.bones.push_back(make_bone(std::string("thigh_") + side, hips, {sx * 0.09, -0.04, 0.0},
                                {0.0, -0.42, 0.0}, group));
    s.bones.push_back(make_bone(std::string("shin_") + side, thigh, {0.0, -0.42, 0.0},
                                {0.0, -0.40, 0.0}, group));
    s.bones.push_back(make_bone(std::string("foot_") + side, thigh + 1, {0.0, -0.40, 0.0},
                                {0.0, -0.06, 0.13}, group, foot));
    if (with_toe) {
        s.bones.push_back(make_bone(std::string("toe_") + side, thigh + 2, {0.0, -0.06, 0.13},
                                    {0.0, 0.0, 0.07}, group));
    }
}

/// 20 bones: 6 spinal (root hips through head), 4 per arm, 3 per leg. All
/// five end-effector tags present. scale stretches every offset; 1.0 is a
/// 1.7 m figure, larger values give stress figures with longer levers.
inline Skeleton humanoid20(double scale);
inline Skeleton humanoid20() {
    Skeleton s;
    s.bones.push_back(make_bone("hips", -1, {}, {0.0, 0.10, 0.0}, BodyGroup::spine));
    s.bones.push_back(make_bone("spine1", 0, {0.0, 0.10, 0.0}, {0.0, 0.12, 0.0}, BodyGroup::spine));
    s.bones.push_back(
        make_bone("spine2", 1, {0.0, 0.12, 0.0}, {0.0, 0.13, 0.0}, BodyGroup::spine));
    s.bones.push_back(make_bone("chest", 2, {0.0, 0.13, 0.0}, {0.0, 0.15, 0.0}, BodyGroup::spine));
    s.bones.push_back(make_bone("neck", 3, {0.0, 0.15, 0.0}, {0.0, 0.08, 0.0}, BodyGroup::spine));
    s.bones.push_back(make_bone("head", 4, {0.0, 0.08, 0.0}, {0.0, 0.16, 0.0}, BodyGroup::spine,
                                EndEffector::head));
    add_arm(s, 3, "l", 1.0, EndEffector::hand_l);
    add_arm(s, 3, "r", -1.0, EndEffector::hand_r);
    add_leg(s, 0, "l", 1.0, EndEffector::foot_l, false);
    add_leg(s, 0, "r", -1.0, EndEffector::foot_r, false);
    return s;
}

inline Skeleton humanoid20(double scale) {
    Skeleton s = humanoid20();
    for (Bone& b : s.bones) {
        b.head *= scale;
        b.tail *= scale;
    }
    return s;
}

/// 22 bones: 6 spinal and 4 bones per limb (toes included).
inline Skeleton lafan_like() {
    Skeleton s;
    s.bones.push_back(make_bone("hips", -1, {}, {0.0, 0.10, 0.0}, BodyGroup::spine));
    s.bones.push_back(make_bone("spine1", 0, {0.0, 0.10, 0.0}, {0.0, 0.12, 0.0}, BodyGroup::spine));
    s.bones.push_back(
        make_bone("spine2", 1, {0.0, 0.12, 0.0}, {0.0, 0.13, 0.0}, BodyGroup::spine));
    s.bones.push_back(make_bone("chest", 2, {0.0, 0.13, 0.0}, {0.0, 0.15, 0.0}, BodyGroup::spine));
    s.bones.push_back(make_bone("neck", 3, {0.0, 0.15, 0.0}, {0.0, 0.08, 0.0}, BodyGroup::spine));
    s.bones.push_back(make_bone("head", 4, {0.0, 0.08, 0.0}, {0.0, 0.16, 0.0}, BodyGroup::spine,
                                EndEffector::head));
    add_arm(s, 3, "l", 1.0, EndEffector::hand_l);
    add_arm(s, 3, "r", -1.0, EndEffector::hand_r);
    add_leg(s, 0, "l", 1.0, EndEffector::foot_l, true);
    add_leg(s, 0, "r", -1.0, EndEffector::foot_r, true);
    return s;
}

/// 21 bones: 5 spinal with the pelvis split into two hip bones (the
/// structural difference between common mocap skeletons), 4 per arm, 4 per
/// leg counting the hip.
inline Skeleton cmu_like() {
    Skeleton s;
    s.bones.push_back(make_bone("pelvis", -1, {}, {0.0, 0.08, 0.0}, BodyGroup::spine));
    s.bones.push_back(
        make_bone("lowerback", 0, {0.0, 0.08, 0.0}, {0.0, 0.17, 0.0}, BodyGroup::spine));
    s.bones.push_back(
        make_bone("upperback", 1, {0.0, 0.17, 0.0}, {0.0, 0.20, 0.0}, BodyGroup::spine));
    s.bones.push_back(make_bone("neck", 2, {0.0, 0.20, 0.0}, {0.0, 0.09, 0.0}, BodyGroup::spine));
    s.bones.push_back(make_bone("head", 3, {0.0, 0.09, 0.0}, {0.0, 0.15, 0.0}, BodyGroup::spine,
                                EndEffector::head));
    add_arm(s, 2, "l", 1.0, EndEffector::hand_l);
    add_arm(s, 2, "r", -1.0, EndEffector::hand_r);
    // split hip: a short lateral bone between pelvis and thigh
    const int hip_l = s.bone_count();
    s.bones.push_back(make_bone("hip_l", 0, {0.02, -0.02, 0.0}, {0.08, -0.04, 0.0},
                                BodyGroup::left_leg));
    s.bones.push_back(
        make_bone("thigh_l", hip_l, {0.08, -0.04, 0.0}, {0.0, -0.44, 0.0}, BodyGroup::left_leg));
    s.bones.push_back(make_bone("shin_l", hip_l + 1, {0.0, -0.44, 0.0}, {0.0, -0.42, 0.0},
                                BodyGroup::left_leg));
    s.bones.push_back(make_bone("foot_l", hip_l + 2, {0.0, -0.42, 0.0}, {0.0, -0.05, 0.14},
                                BodyGroup::left_leg, EndEffector::foot_l));
    const int hip_r = s.bone_count();
    s.bones.push_back(make_bone("hip_r", 0, {-0.02, -0.02, 0.0}, {-0.08, -0.04, 0.0},
                                BodyGroup::right_leg));
    s.bones.push_back(
        make_bone("thigh_r", hip_r, {-0.08, -0.04, 0.0}, {0.0, -0.44, 0.0}, BodyGroup::right_leg));
    s.bones.push_back(make_bone("shin_r", hip_r + 1, {0.0, -0.44, 0.0}, {0.0, -0.42, 0.0},
                                BodyGroup::right_leg));
    s.bones.push_back(make_bone("foot_r", hip_r + 2, {0.0, -0.42, 0.0}, {0.0, -0.05, 0.14},
                                BodyGroup::right_leg, EndEffector::foot_r));
    return s;
}

/// Builds a motion from per-bone local rotations composed down the tree.
inline MotionSequence motion_from_local(
    const Skeleton& s, int frames, double frame_rate,
    const std::function<Vec3(int frame)>& root,
    const std::function<Quat(int frame, int bone)>& local) {
    MotionSequence m;
    m.frame_rate = frame_rate;
    m.bone_count = s.bone_count();
    m.root_positions.reserve(frames);
    m.rotations.resize(static_cast<std::size_t>(frames) * s.bone_count());
    for (int t = 0; t < frames; ++t) {
        m.root_positions.push_back(root(t));
        for (int n = 0; n < s.bone_count(); ++n) {
            const Quat l = local(t, n);
            m.rotation(t, n) =
                (s.bones[n].is_root() ? l : m.rotation(t, s.bones[n].parent) * l).normalized();
        }
    }
    return m;
}

inline MotionSequence rest_motion(const Skeleton& s, int frames, double frame_rate = 30.0) {
    return motion_from_local(
        s, frames, frame_rate, [](int) { return Vec3{0.0, 0.9, 0.0}; },
        [](int, int) { return Quat::identity(); });
}

/// Horizontal whole-body spin with extended, sweeping limbs: every body
/// part stays far from its rest-pose region through the whole sequence.
/// This is the stress routine for the reconstruction suites.
inline MotionSequence aerial_spin_motion(const Skeleton& s, int frames,
                                         double frame_rate = 30.0) {
    constexpr double kPi = 3.14159265358979323846;
    const double period = 40.0;
    return motion_from_local(
        s, frames, frame_rate,
        [=](int t) {
            return Vec3{0.12 * std::sin(2 * kPi * t / period), 0.9, 0.03 * t};
        },
        [&s, frames, period](int t, int n) -> Quat {
            constexpr double kPi_ = 3.14159265358979323846;
            const double phase = 2.0 * kPi_ * t / period;
            const double turn = 2.0 * kPi_ * 2.0 * t / frames;
            const std::string& name = s.bones[n].name;
            const bool left = name.ends_with("_l");
            const double side = left ? 1.0 : -1.0;
            const double swing = std::sin(phase) * side;
            auto about = [](const Vec3& a, double r) { return pointmotion::axis_angle(a, r); };
            if (s.bones[n].is_root()) {
                return about({0, 1, 0}, turn) * about({1, 0, 0}, kPi_ / 2.0 + 0.35 * std::sin(phase));
            }
            if (name.starts_with("thigh")) {
                return about({0, 0, 1}, side * (0.95 + 0.55 * std::sin(phase))) *
                       about({1, 0, 0}, swing * 1.0);
            }
            if (name.starts_with("shin")) {
                return about({1, 0, 0}, (std::cos(phase) * side + 1.0) * 0.1);
            }
            if (name.starts_with("foot")) return about({1, 0, 0}, swing * 0.25);
            if (name.starts_with("upperarm")) {
                return about({0, 0, 1}, side * (0.6 + 0.7 * std::sin(phase + side))) *
                       about({0, 1, 0}, side * 0.5 * std::cos(phase));
            }
            if (name.starts_with("forearm")) {
                return about({0, 1, 0}, side * (std::sin(phase + 0.5) + 1.0) * 0.12);
            }
            if (name.starts_with("hand")) return about({0, 0, 1}, swing * 0.2);
            if (name.starts_with("spine") || name.starts_with("lowerback") ||
                name.starts_with("upperback") || name == "chest") {
                return about({1, 0, 0}, std::sin(phase) * 0.45) *
                       about({0, 1, 0}, std::sin(phase + 1.0) * 0.3);
            }
            if (name.starts_with("neck") || name.starts_with("head")) {
                return about({0, 1, 0}, -std::sin(phase) * 0.35) *
                       about({1, 0, 0}, std::cos(phase) * 0.35);
            }
            return Quat::identity();
        });
}

/// Vigorous walk-like cycle: swinging limbs, swaying spine, travelling and
/// bobbing root. Deterministic; amplitude in [0, 1] scales every swing.
inline MotionSequence procedural_motion(const Skeleton& s, int frames, double frame_rate = 30.0,
                                        double amplitude = 1.0) {
    constexpr double kPi = 3.14159265358979323846;
    const double period = 40.0;
    auto root = [=](int t) {
        const double phase = 2.0 * kPi * t / period;
        return Vec3{0.12 * std::sin(phase) * amplitude,
                    0.9 + 0.05 * std::sin(2.0 * phase) * amplitude, 0.025 * t};
    };
    auto local = [&s, amplitude, period](int t, int n) -> Quat {
        const double phase = 2.0 * kPi * t / period;
        const std::string& name = s.bones[n].name;
        const bool left = name.ends_with("_l");
        const double side = left ? 1.0 : -1.0;
        const double swing = std::sin(phase) * side * amplitude;
        auto about = [](const Vec3& axis, double rad) {
            return pointmotion::axis_angle(axis, rad);
        };
        if (name.starts_with("thigh")) {
            return about({1, 0, 0}, swing * 0.9);
        }
        if (name.starts_with("shin")) {
            return about({1, 0, 0}, (std::cos(phase) * side + 1.0) * 0.35 * amplitude);
        }
        if (name.starts_with("foot")) {
            return about({1, 0, 0}, swing * 0.25);
        }
        if (name.starts_with("upperarm")) {
            return about({1, 0, 0}, -swing * 1.1) * about({0, 0, 1}, side * 0.25 * amplitude);
        }
        if (name.starts_with("forearm")) {
            return about({0, 1, 0}, side * (std::sin(phase + 0.5) + 1.2) * 0.45 * amplitude);
        }
        if (name.starts_with("hand")) {
            return about({0, 0, 1}, swing * 0.2);
        }
        if (name.starts_with("spine") || name.starts_with("lowerback") ||
            name.starts_with("upperback") || name == "chest") {
            return about({0, 1, 0}, std::sin(phase) * 0.12 * amplitude) *
                   about({0, 0, 1}, std::sin(phase + 1.0) * 0.06 * amplitude);
        }
        if (name.starts_with("neck") || name.starts_with("head")) {
            return about({0, 1, 0}, -std::sin(phase) * 0.15 * amplitude);
        }
        return Quat::identity();
    };
    return motion_from_local(s, frames, frame_rate, root, local);
}

}  // namespace fixtures
