#include "pointmotion/quat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace pointmotion {

namespace {

constexpr double kUnitTol = 1e-12;

}  // namespace

Vec3 quat_rotate(const Vec3& v, const Quat& q_in) {
    Quat q = q_in;
    const double n2 = q.norm_squared();
    if (std::abs(n2 - 1.0) > kUnitTol) {
        q = q.normalized();
    }
    // q v q^-1 expanded: v + 2w(u x v) + 2 u x (u x v), u = imaginary part.
    const Vec3 u = q.vec();
    const Vec3 uv = cross(u, v);
    const Vec3 uuv = cross(u, uv);
    return v + 2.0 * q.w * uv + 2.0 * uuv;
}

Quat slerp(const Quat& a, const Quat& b, double t) {
    const Quat bh = hemisphere_align(b, a);
    const double c = std::clamp(dot(a, bh), -1.0, 1.0);
    const double angle = std::acos(c);
    if (angle < 1e-8) {
        return a;  // degenerate geodesic, endpoints coincide up to sign
    }
    const double s = std::sin(angle);
    const double wa = std::sin((1.0 - t) * angle) / s;
    const double wb = std::sin(t * angle) / s;
    return {wa * a.w + wb * bh.w, wa * a.x + wb * bh.x, wa * a.y + wb * bh.y,
            wa * a.z + wb * bh.z};
}

Quat axis_angle(const Vec3& axis, double angle_rad) {
    const Vec3 u = axis.normalized();
    const double h = 0.5 * angle_rad;
    const double s = std::sin(h);
    return {std::cos(h), u.x * s, u.y * s, u.z * s};
}

FoqSequence foq_encode(const std::vector<Quat>& seq) {
    if (seq.empty()) {
        throw std::invalid_argument("empty motion");
    }
    FoqSequence out;
    out.offsets.reserve(seq.size());
    const Quat inv0 = quat_conjugate(seq[0]);
    for (const Quat& q : seq) {
        out.offsets.push_back(q * inv0);
    }
    return out;
}

std::vector<Quat> foq_decode(const FoqSequence& foq, const Quat& q_ref, std::size_t t_ref) {
    if (t_ref >= foq.offsets.size()) {
        throw std::invalid_argument("foq_decode: reference frame out of range");
    }
    // offsets[t] = q_t * conj(q_0), so q_0 = conj(offsets[t_ref]) * q_ref
    // and q_t = offsets[t] * q_0.
    const Quat q0 = quat_conjugate(foq.offsets[t_ref]) * q_ref;
    std::vector<Quat> out;
    out.reserve(foq.offsets.size());
    for (const Quat& f : foq.offsets) {
        out.push_back(f * q0);
    }
    return out;
}

Quat roll_quat(const RollQuat& spec) {
    const double axis_norm = spec.axis.norm();
    if (axis_norm <= 0.0) {
        throw std::invalid_argument("roll_quat: zero axis");
    }
    const double mag = std::sqrt(spec.alpha * spec.alpha + spec.beta * spec.beta);
    if (mag <= 0.0) {
        throw std::invalid_argument("roll_quat: alpha and beta both zero");
    }
    const Vec3 u = spec.axis / axis_norm;
    const Quat r{spec.alpha, spec.beta * u.x, spec.beta * u.y, spec.beta * u.z};
    return r.normalized();
}

Quat align_max_real(const Vec3& p_ik, const Vec3& tail) {
    const double tn = tail.norm();
    const double pn = p_ik.norm();
    if (tn <= 0.0 || pn <= 0.0) {
        throw std::invalid_argument("align_max_real: zero-length input vector");
    }
    const Vec3 eta = tail / tn;
    const Vec3 omega = p_ik / pn;
    const Vec3 mid = (eta + omega) * 0.5;
    const Quat q_min{0.0, mid.x, mid.y, mid.z};
    const Quat q_max = q_min * Quat{0.0, eta.x, eta.y, eta.z};
    const double n = q_max.norm();
    if (n < 1e-9) {
        throw std::invalid_argument("antipodal IK target");
    }
    return {q_max.w / n, q_max.x / n, q_max.y / n, q_max.z / n};
}

EulerOrder parse_euler_order(const std::string& tag) {
    std::string t = tag;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "xyz") return EulerOrder::xyz;
    if (t == "xzy") return EulerOrder::xzy;
    if (t == "yxz") return EulerOrder::yxz;
    if (t == "yzx") return EulerOrder::yzx;
    if (t == "zxy") return EulerOrder::zxy;
    if (t == "zyx") return EulerOrder::zyx;
    throw std::invalid_argument("unknown Euler order tag: " + tag);
}

namespace {

constexpr Vec3 kAxes[3] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};

void order_axes(EulerOrder order, int out[3]) {
    switch (order) {
        case EulerOrder::xyz: out[0] = 0, out[1] = 1, out[2] = 2; break;
        case EulerOrder::xzy: out[0] = 0, out[1] = 2, out[2] = 1; break;
        case EulerOrder::yxz: out[0] = 1, out[1] = 0, out[2] = 2; break;
        case EulerOrder::yzx: out[0] = 1, out[1] = 2, out[2] = 0; break;
        case EulerOrder::zxy: out[0] = 2, out[1] = 0, out[2] = 1; break;
        case EulerOrder::zyx: out[0] = 2, out[1] = 1, out[2] = 0; break;
        default: throw std::invalid_argument("invalid Euler order");
    }
}

}  // namespace

Quat euler_to_quat(const double angles_deg[3], EulerOrder order) {
    constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
    int axes[3];
    order_axes(order, axes);
    Quat q = Quat::identity();
    for (int i = 0; i < 3; ++i) {
        q = q * axis_angle(kAxes[axes[i]], angles_deg[i] * kDegToRad);
    }
    return q;
}

}  // namespace pointmotion
