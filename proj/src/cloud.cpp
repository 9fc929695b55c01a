#include "pointmotion/cloud.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "pointmotion/rng.hpp"

namespace pointmotion {

std::vector<int> allocate_points(const Skeleton& s, int n) {
    const int bone_count = s.bone_count();
    std::vector<int> counts(bone_count, 0);
    std::vector<int> eligible;
    double total_length = 0.0;
    for (int i = 0; i < bone_count; ++i) {
        if (!s.bones[i].zero_length()) {
            eligible.push_back(i);
            total_length += s.bones[i].tail.norm();
        }
    }
    if (eligible.empty()) {
        throw std::invalid_argument("allocate_points: no bones eligible for sampling");
    }
    if (n < static_cast<int>(eligible.size())) {
        throw std::invalid_argument("allocate_points: need at least " +
                                    std::to_string(eligible.size()) + " points, got " +
                                    std::to_string(n));
    }

    // Largest-remainder apportionment over the n - |eligible| points that
    // remain after the guaranteed one per bone.
    const int spare = n - static_cast<int>(eligible.size());
    std::vector<double> remainders(eligible.size());
    int assigned = 0;
    for (std::size_t e = 0; e < eligible.size(); ++e) {
        const double share = spare * s.bones[eligible[e]].tail.norm() / total_length;
        const int whole = static_cast<int>(share);
        counts[eligible[e]] = 1 + whole;
        remainders[e] = share - whole;
        assigned += whole;
    }
    std::vector<std::size_t> order(eligible.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainders[a] > remainders[b];
    });
    for (int leftover = spare - assigned, j = 0; leftover > 0; --leftover, ++j) {
        counts[eligible[order[j]]] += 1;
    }
    return counts;
}

CloudSpec sample_cloud_spec(const Skeleton& s, int n, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) {
        throw std::invalid_argument("sample_cloud_spec: negative sigma");
    }
    const std::vector<int> counts = allocate_points(s, n);

    CloudSpec spec;
    spec.sigma = sigma;
    spec.seed = seed;
    spec.points.reserve(n);
    Rng rng(seed);
    for (int bone = 0; bone < s.bone_count(); ++bone) {
        const Vec3 tail = s.bones[bone].tail;
        for (int p = 0; p < counts[bone]; ++p) {
            const double alpha = rng.uniform();
            PointSpec point;
            point.bone = bone;
            point.group = s.bones[bone].group;
            point.local_offset = {rng.normal(alpha * tail.x, sigma),
                                  rng.normal(alpha * tail.y, sigma),
                                  rng.normal(alpha * tail.z, sigma)};
            spec.points.push_back(point);
        }
    }
    return spec;
}

CloudTrajectory realize_trajectory(const CloudSpec& spec, const Skeleton& s,
                                   const MotionSequence& m) {
    validate_motion(s, m);
    for (const PointSpec& p : spec.points) {
        if (p.bone < 0 || p.bone >= s.bone_count()) {
            throw std::invalid_argument("realize_trajectory: point references missing bone");
        }
    }
    const int frames = m.frame_count();
    const int points = spec.point_count();
    CloudTrajectory traj;
    traj.point_count = points;
    traj.positions.resize(static_cast<std::size_t>(frames) * points);
    traj.groups.reserve(points);
    for (const PointSpec& p : spec.points) {
        traj.groups.push_back(p.group);
    }
    for (int t = 0; t < frames; ++t) {
        const std::vector<Vec3> heads = fk_heads(s, m, t);
        for (int i = 0; i < points; ++i) {
            const PointSpec& p = spec.points[i];
            traj.at(t, i) = heads[p.bone] + quat_rotate(p.local_offset, m.rotation(t, p.bone));
        }
    }
    return traj;
}

}  // namespace pointmotion
