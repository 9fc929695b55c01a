#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pointmotion/vec3.hpp"

namespace pointmotion {

/// Rotation quaternion, component order (w, x, y, z) everywhere, including
/// serialized formats. q and -q denote the same rotation; comparisons up to
/// rotation must hemisphere-align first.
struct Quat {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quat() = default;
    constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }

    constexpr Vec3 vec() const { return {x, y, z}; }
    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    constexpr double norm_squared() const { return w * w + x * x + y * y + z * z; }
    Quat normalized() const {
        const double n = norm();
        return {w / n, x / n, y / n, z / n};
    }
    constexpr Quat operator-() const { return {-w, -x, -y, -z}; }
    constexpr bool operator==(const Quat& o) const = default;
};

constexpr double dot(const Quat& a, const Quat& b) {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Hamilton product a*b. |a*b| = |a|*|b|.
constexpr Quat quat_mul(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quat operator*(const Quat& a, const Quat& b) { return quat_mul(a, b); }

constexpr Quat quat_conjugate(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

/// Rotates v by q (normalizes q internally if needed): q v q^-1.
Vec3 quat_rotate(const Vec3& v, const Quat& q);

/// Returns q or -q, whichever has non-negative dot product with reference.
constexpr Quat hemisphere_align(const Quat& q, const Quat& reference) {
    return dot(q, reference) >= 0.0 ? q : -q;
}

/// Geodesic interpolation between unit quaternions after hemisphere
/// alignment. Endpoints exact; near-parallel inputs return a.
Quat slerp(const Quat& a, const Quat& b, double t);

/// Unit quaternion for a rotation of angle_rad about axis (normalized here).
Quat axis_angle(const Vec3& axis, double angle_rad);

/// Rotation track re-expressed relative to its own first frame. Element 0 is
/// the identity; the track is invariant to constant right-multiplied
/// rotations, which makes it blind to a bone's absolute roll.
struct FoqSequence {
    std::vector<Quat> offsets;
    int reference_frame_index = 0;
};

/// offsets[t] = q[t] * conj(q[0]). Throws on an empty sequence.
FoqSequence foq_encode(const std::vector<Quat>& seq);

/// Reconstructs the rotation track from its first-frame offsets given one
/// known pose q_ref at frame t_ref. foq_encode(result) == foq and
/// result[t_ref] == q_ref up to floating error.
std::vector<Quat> foq_decode(const FoqSequence& foq, const Quat& q_ref, std::size_t t_ref);

/// Roll rotation about a bone's local tail direction: alpha + beta*(xi+yj+zk)
/// with (x,y,z) the normalized axis, normalized to unit length.
struct RollQuat {
    Vec3 axis;  // bone tail direction, normalized before use
    double alpha = 1.0;
    double beta = 0.0;
};

/// Throws if the axis is zero or (alpha, beta) are both zero.
Quat roll_quat(const RollQuat& spec);

/// Quaternion rotating the tail direction onto the IK target direction with
/// the maximum possible real component among all such rotations, i.e. the
/// least total rotation. The raw construction
///   q_min = (0, eta + omega) / 2,   q_max = q_min * (0, eta)
/// is not unit-norm in general, so the result is normalized before return.
/// Throws for antipodal inputs (zero real part, one-parameter ambiguity).
Quat align_max_real(const Vec3& p_ik, const Vec3& tail);

/// Channel orders for Euler conversion; each names the axis sequence the
/// angles apply to, composed intrinsically in the stated order.
enum class EulerOrder { xyz, xzy, yxz, yzx, zxy, zyx };

/// Parses tags like "zxy" (case-insensitive). Throws on anything else.
EulerOrder parse_euler_order(const std::string& tag);

/// Intrinsic composition of per-axis rotations, angles in degrees, in the
/// channel order given by the tag. angles[i] rotates about order axis i.
Quat euler_to_quat(const double angles_deg[3], EulerOrder order);

}  // namespace pointmotion
