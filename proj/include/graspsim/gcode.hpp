#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "graspsim/geometry.hpp"
#include "graspsim/traj.hpp"

namespace graspsim::gcode {

struct LinearMove {
    std::optional<double> x, y, feed;
    friend bool operator==(const LinearMove&, const LinearMove&) = default;
};

struct ArcMove {
    bool clockwise{false};
    std::optional<double> x, y;
    double i{0.0};
    double j{0.0};
    std::optional<double> feed;
    friend bool operator==(const ArcMove&, const ArcMove&) = default;
};

struct SetUnitsMM {
    friend bool operator==(const SetUnitsMM&, const SetUnitsMM&) = default;
};
struct SetAbsolute {
    friend bool operator==(const SetAbsolute&, const SetAbsolute&) = default;
};

using GCommand = std::variant<LinearMove, ArcMove, SetUnitsMM, SetAbsolute>;

/// Accepted dialect: G21, G90, G1 X Y F, G2/G3 X Y I J F. Comments are `;`
/// to end of line or parenthesised. Words are case-insensitive.
/// Throws SyntaxError carrying 1-based line and column.
std::vector<GCommand> parse(std::string_view text);

struct PlannerConfig {
    double speed_cap{traj::kPlatformSpeedLimit};  // mm/s
    double accel{std::numeric_limits<double>::infinity()};  // mm/s^2

    bool infinite_accel() const { return accel == std::numeric_limits<double>::infinity(); }
    void validate() const;
};

/// Cruise speed plus optional trapezoid ramps; ramps start and end at rest.
struct SpeedProfile {
    double cruise{0.0};  // mm/s
    double accel{std::numeric_limits<double>::infinity()};
    double ramp_time{0.0};
    double ramp_distance{0.0};

    // Distance covered `t` seconds into a move of length `length`.
    double distance_at(double t, double length, double duration) const;
};

struct TimedMove {
    traj::PathElement element;
    double length{0.0};
    double start_time{0.0};
    double duration{0.0};
    SpeedProfile profile;
};

struct MotionTimeline {
    Vec2 start{Vec2::Zero()};
    std::vector<TimedMove> moves;
    double total_duration{0.0};
    double speed_cap{traj::kPlatformSpeedLimit};
};

/// Converts feed (mm/min) to mm/s, clamps to `speed_cap`, and lays the moves
/// end to end in time. Zero-length moves are dropped.
/// Throws PlanError for motion before G21/G90 or before any feed word.
MotionTimeline plan(const std::vector<GCommand>& commands, const PlannerConfig& config,
                    const Vec2& start = Vec2::Zero());

/// Clamps to the start for t <= 0 and to the final point past the end.
Vec2 position_at_time(const MotionTimeline& timeline, double t);

/// Instantaneous path speed at time t (mm/s).
double speed_at_time(const MotionTimeline& timeline, double t);

}  // namespace graspsim::gcode
