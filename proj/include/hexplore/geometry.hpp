#pragma once

// Planar pose kinematics: SE(2) poses, dead-reckoning integration of motor
// commands, rigid-body transforms, and the rotation-phase code that tracks
// net displacement through a frequency vector.

#include <span>
#include <vector>

#include "hexplore/vec2.hpp"

namespace hexplore::geometry {

// Agent pose (r, theta). Heading in radians, stored reduced to [0, 2*pi),
// measured counterclockwise from +x.
struct Pose {
    Vec2 position;
    double heading = 0.0;

    Pose() = default;
    Pose(Vec2 position_, double heading_) : position(position_), heading(wrap_angle(heading_)) {}
};

// Egocentric control input (v, omega): body-frame translational velocity in
// m/s and angular velocity in rad/s.
struct MotorCommand {
    Vec2 linear_velocity;
    double angular_velocity = 0.0;
};

// Rigid-body transform: rotate position by rotation_angle, then translate;
// heading shifts by the same angle.
struct RigidTransform {
    Vec2 translation;
    double rotation_angle = 0.0;

    RigidTransform() = default;
    RigidTransform(Vec2 translation_, double angle_)
        : translation(translation_), rotation_angle(wrap_angle(angle_)) {}

    RigidTransform inverse() const;
};

// Spatial frequency q = magnitude * direction; direction is a unit vector,
// magnitude in rad/m. Throws std::invalid_argument if the direction is not
// unit length within 1e-12 or the magnitude is not positive.
struct FrequencyVector {
    Vec2 direction{1.0, 0.0};
    double magnitude = 1.0;

    FrequencyVector() = default;
    FrequencyVector(Vec2 direction_, double magnitude_);
    static FrequencyVector from_angle(double angle, double magnitude);

    Vec2 vec() const { return magnitude * direction; }
};

// Two-dimensional phase subspace state. Norm is conserved by phase_step.
struct PhaseState {
    Vec2 y{1.0, 0.0};
};

// Counterclockwise rotation matrix R(angle). Throws on non-finite input.
Mat2 rotation_of(double angle);

// One step of the pose dynamics: heading accumulates omega*dt; position
// advances by R(theta_t) * v * dt using the pre-step heading. dt must be > 0.
Pose step_pose(const Pose& p, const MotorCommand& u, double dt);

// Left fold of step_pose over a command sequence.
Pose integrate_path(const Pose& p0, std::span<const MotorCommand> commands, double dt);

// Apply g to p: (R(phi) * r + delta, theta + phi mod 2*pi).
Pose apply_rigid(const RigidTransform& g, const Pose& p);

// Phase update for displacement dr: y' = R(q . dr) * y.
PhaseState phase_step(const PhaseState& y, const FrequencyVector& q, Vec2 dr);

// Phase reached from y0 = (1, 0) after a net displacement:
// (cos(q . R_net), sin(q . R_net)).
PhaseState phase_closed_form(const FrequencyVector& q, Vec2 net_displacement);

}  // namespace hexplore::geometry
