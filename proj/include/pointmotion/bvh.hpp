#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pointmotion/skeleton.hpp"

namespace pointmotion {

/// Supported BVH subset: a single HIERARCHY, 3 rotation channels per joint
/// (any of the six axis orders) plus optional translation channels on the
/// root, End Site on every leaf.
struct BvhJoint {
    std::string name;
    int parent = -1;
    Vec3 offset;
    std::vector<std::string> channels;  // declared order
    std::optional<Vec3> end_site;
};

struct BvhDocument {
    std::vector<BvhJoint> joints;  // nesting order, parents precede children
    int frame_count = 0;
    double frame_time = 1.0 / 30.0;
    std::vector<std::vector<double>> frames;  // one row of channel values per frame
};

BvhDocument parse_bvh(const std::string& path);
BvhDocument parse_bvh_text(const std::string& text, const std::string& origin = "<bvh>");

struct BvhImportOptions {
    std::unordered_map<std::string, BodyGroup> groups;          // required per joint
    std::unordered_map<std::string, EndEffector> end_effectors;  // optional per joint
    double scale_to_meters = 1.0;
};

/// Joints become bones: head = joint OFFSET in the parent frame, tail =
/// first child's OFFSET or the End Site. Local Euler rotations are composed
/// down the hierarchy into global quaternions; root translation channels
/// (plus the root OFFSET) become the root positions.
std::pair<Skeleton, MotionSequence> import_bvh(const BvhDocument& doc,
                                               const BvhImportOptions& options);

}  // namespace pointmotion
