#include "hexplore/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace hexplore::geometry {

RigidTransform RigidTransform::inverse() const {
    // g^{-1}: rotate by -phi, translate by -R(-phi) * delta
    const Mat2 r_inv = rotation_of(-rotation_angle);
    return RigidTransform{-(r_inv * translation), -rotation_angle};
}

FrequencyVector::FrequencyVector(Vec2 direction_, double magnitude_)
    : direction(direction_), magnitude(magnitude_) {
    if (!std::isfinite(direction.x) || !std::isfinite(direction.y) || !std::isfinite(magnitude))
        throw std::invalid_argument("FrequencyVector: non-finite component");
    if (std::fabs(direction.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("FrequencyVector: direction must be unit length");
    if (magnitude <= 0.0)
        throw std::invalid_argument("FrequencyVector: magnitude must be positive");
}

FrequencyVector FrequencyVector::from_angle(double angle, double magnitude) {
    return FrequencyVector{{std::cos(angle), std::sin(angle)}, magnitude};
}

Mat2 rotation_of(double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("rotation_of: non-finite angle");
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c, -s, s, c};
}

Pose step_pose(const Pose& p, const MotorCommand& u, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step_pose: dt must be > 0");
    Pose out;
    out.position = p.position + rotation_of(p.heading) * u.linear_velocity * dt;
    out.heading = wrap_angle(p.heading + u.angular_velocity * dt);
    return out;
}

Pose integrate_path(const Pose& p0, std::span<const MotorCommand> commands, double dt) {
    Pose p = p0;
    for (const MotorCommand& u : commands) p = step_pose(p, u, dt);
    return p;
}

Pose apply_rigid(const RigidTransform& g, const Pose& p) {
    Pose out;
    out.position = rotation_of(g.rotation_angle) * p.position + g.translation;
    out.heading = wrap_angle(p.heading + g.rotation_angle);
    return out;
}

PhaseState phase_step(const PhaseState& y, const FrequencyVector& q, Vec2 dr) {
    return PhaseState{rotation_of(q.vec().dot(dr)) * y.y};
}

PhaseState phase_closed_form(const FrequencyVector& q, Vec2 net_displacement) {
    const double phase = q.vec().dot(net_displacement);
    return PhaseState{{std::cos(phase), std::sin(phase)}};
}

}  // namespace hexplore::geometry
