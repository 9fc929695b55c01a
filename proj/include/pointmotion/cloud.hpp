#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pointmotion/skeleton.hpp"

namespace pointmotion {

/// One sampled point, frozen in bone-local space for the lifetime of the
/// spec. The constant local offset is what makes the realized cloud
/// temporally consistent: the point traces a rigid trajectory with its bone.
struct PointSpec {
    int bone = -1;
    Vec3 local_offset;  // H_x, bone-local, meters
    BodyGroup group = BodyGroup::spine;
};

struct CloudSpec {
    std::vector<PointSpec> points;
    std::string skeleton_id;
    double sigma = 0.05;
    std::uint64_t seed = 0;

    int point_count() const { return static_cast<int>(points.size()); }
};

/// Realized world positions, frame-major: positions[t * point_count + i].
struct CloudTrajectory {
    std::vector<Vec3> positions;
    std::vector<BodyGroup> groups;  // per point
    int point_count = 0;

    int frame_count() const {
        return point_count == 0 ? 0 : static_cast<int>(positions.size()) / point_count;
    }
    const Vec3& at(int frame, int point) const {
        return positions[static_cast<std::size_t>(frame) * point_count + point];
    }
    Vec3& at(int frame, int point) {
        return positions[static_cast<std::size_t>(frame) * point_count + point];
    }
};

/// Splits n points across non-zero-length bones proportionally to bone
/// length, largest-remainder rounding, at least one point per eligible bone.
/// Counts for excluded bones are zero. Throws when n is smaller than the
/// number of eligible bones.
std::vector<int> allocate_points(const Skeleton& s, int n);

/// Draws the frozen per-point bone attachments: for each point a uniform
/// factor alpha in [0,1] along the tail segment, then an isotropic normal
/// offset of per-axis standard deviation sigma around alpha * tail.
/// Deterministic for a fixed seed; draws are bone-major, then point, then
/// alpha followed by the x,y,z axes.
CloudSpec sample_cloud_spec(const Skeleton& s, int n, double sigma, std::uint64_t seed);

/// World positions of every spec point over the motion: the bone's FK head
/// plus the local offset rotated by the bone's global quaternion.
CloudTrajectory realize_trajectory(const CloudSpec& spec, const Skeleton& s,
                                   const MotionSequence& m);

}  // namespace pointmotion
