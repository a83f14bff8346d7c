#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "graspsim/geometry.hpp"
#include "graspsim/rng.hpp"

namespace graspsim::traj {

/// Random-walk generator settings. Lengths in mm, angles in degrees.
struct TrajectoryParams {
    double segment_length{50.0};
    double fillet_radius{10.0};
    double turn_min{45.0};
    double turn_max{315.0};
    std::size_t n_segments{40};
    double bounds_half{140.0};
    std::uint64_t seed{0};
    std::size_t max_resamples{100};

    // Throws ConfigError when an invariant is violated.
    void validate() const;

    friend bool operator==(const TrajectoryParams&, const TrajectoryParams&) = default;
};

struct Line {
    Vec2 start;
    Vec2 end;

    friend bool operator==(const Line&, const Line&) = default;
};

/// Circular arc. `start_angle` is the polar angle of the start point seen
/// from `center`; positive sweep is counter-clockwise.
struct Arc {
    Vec2 center;
    double radius{0.0};
    double start_angle{0.0};
    double sweep{0.0};

    friend bool operator==(const Arc&, const Arc&) = default;
};

using PathElement = std::variant<Line, Arc>;

double element_length(const PathElement& e);
Vec2 element_start(const PathElement& e);
Vec2 element_end(const PathElement& e);
double element_start_heading(const PathElement& e);
double element_end_heading(const PathElement& e);
// Point at distance `d` along the element, d clamped to [0, length].
Vec2 element_point(const PathElement& e, double d);
double element_heading(const PathElement& e, double d);

struct PathSample {
    Vec2 position;
    double heading{0.0};
    double arc_length{0.0};
};

class Trajectory {
public:
    Trajectory() = default;
    Trajectory(TrajectoryParams params, std::vector<PathElement> elements);

    const std::vector<PathElement>& elements() const noexcept { return elements_; }
    const TrajectoryParams& params() const noexcept { return params_; }
    double total_length() const noexcept { return total_length_; }
    // Arc length at which element i begins.
    double element_offset(std::size_t i) const { return offsets_.at(i); }

    friend bool operator==(const Trajectory& a, const Trajectory& b) {
        return a.params_ == b.params_ && a.elements_ == b.elements_;
    }

private:
    TrajectoryParams params_;
    std::vector<PathElement> elements_;
    std::vector<double> offsets_;
    double total_length_{0.0};
};

/// Draws one heading-change magnitude in degrees, uniform in
/// [turn_min, turn_max).
double sample_turn(Rng& rng, const TrajectoryParams& params);

/// Maps a heading-change magnitude in degrees to a signed sweep in radians:
/// theta <= 180 turns left by theta, otherwise right by 360 - theta.
double turn_to_sweep(double turn_deg);

/// Builds a random walk of `n_segments` straights of `segment_length`,
/// joined by arcs of `fillet_radius` whose sweep is the sampled turn.
/// Draws that would leave the bounds square are re-drawn up to
/// `max_resamples` times; after that BoundsUnsatisfiable is thrown.
Trajectory generate(const TrajectoryParams& params);

/// Throws OutOfRange unless 0 <= s <= total_length.
PathSample position_at(const Trajectory& traj, double s);

/// Constant-speed traversal; the platform holds at the path end.
Vec2 position_at_time(const Trajectory& traj, double speed, double t);

/// Grbl-subset program: G21, G90, then one G1/G2/G3 per element with the
/// feed word in mm/min. Throws SpeedExceedsPlatform above 250 mm/s.
std::string emit_gcode(const Trajectory& traj, double speed);

inline constexpr double kPlatformSpeedLimit = 250.0;

}  // namespace graspsim::traj
