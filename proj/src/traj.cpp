#include "graspsim/traj.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "graspsim/error.hpp"
#include "graspsim/format.hpp"

namespace graspsim::traj {

void TrajectoryParams::validate() const {
    if (!(segment_length > 0.0)) throw ConfigError("traj.segment_length must be > 0");
    if (!(fillet_radius >= 0.0)) throw ConfigError("traj.fillet_radius must be >= 0");
    if (!(turn_min > 0.0 && turn_min <= turn_max && turn_max < 360.0))
        throw ConfigError("traj.turn_min/turn_max must satisfy 0 < min <= max < 360");
    if (!(bounds_half > 0.0)) throw ConfigError("traj.bounds_half must be > 0");
}

// ─── Path elements ──────────────────────────────────────────────────────────

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sweep_sign(const Arc& a) { return a.sweep >= 0.0 ? 1.0 : -1.0; }

Vec2 arc_point(const Arc& a, double angle) {
    return a.center + a.radius * Vec2(std::cos(angle), std::sin(angle));
}

}  // namespace

double element_length(const PathElement& e) {
    return std::visit(overloaded{[](const Line& l) { return (l.end - l.start).norm(); },
                                 [](const Arc& a) { return a.radius * std::abs(a.sweep); }},
                      e);
}

Vec2 element_start(const PathElement& e) {
    return std::visit(overloaded{[](const Line& l) { return l.start; },
                                 [](const Arc& a) { return arc_point(a, a.start_angle); }},
                      e);
}

Vec2 element_end(const PathElement& e) {
    return std::visit(
        overloaded{[](const Line& l) { return l.end; },
                   [](const Arc& a) { return arc_point(a, a.start_angle + a.sweep); }},
        e);
}

Vec2 element_point(const PathElement& e, double d) {
    return std::visit(overloaded{[d](const Line& l) -> Vec2 {
                                     const double len = (l.end - l.start).norm();
                                     if (len == 0.0) return l.start;
                                     const double u = std::clamp(d / len, 0.0, 1.0);
                                     return l.start + u * (l.end - l.start);
                                 },
                                 [d](const Arc& a) -> Vec2 {
                                     const double len = a.radius * std::abs(a.sweep);
                                     const double u = len == 0.0 ? 0.0 : std::clamp(d / len, 0.0, 1.0);
                                     return arc_point(a, a.start_angle + u * a.sweep);
                                 }},
                      e);
}

double element_heading(const PathElement& e, double d) {
    return std::visit(overloaded{[](const Line& l) {
                                     const Vec2 v = l.end - l.start;
                                     return std::atan2(v.y(), v.x());
                                 },
                                 [d](const Arc& a) {
                                     const double len = a.radius * std::abs(a.sweep);
                                     const double u = len == 0.0 ? 0.0 : std::clamp(d / len, 0.0, 1.0);
                                     return wrap_angle(a.start_angle + u * a.sweep +
                                                       sweep_sign(a) * kPi / 2.0);
                                 }},
                      e);
}

double element_start_heading(const PathElement& e) { return element_heading(e, 0.0); }

double element_end_heading(const PathElement& e) {
    return element_heading(e, element_length(e));
}

// ─── Trajectory ─────────────────────────────────────────────────────────────

Trajectory::Trajectory(TrajectoryParams params, std::vector<PathElement> elements)
    : params_(params), elements_(std::move(elements)) {
    offsets_.reserve(elements_.size());
    double acc = 0.0;
    for (const auto& e : elements_) {
        offsets_.push_back(acc);
        acc += element_length(e);
    }
    total_length_ = acc;
}

double sample_turn(Rng& rng, const TrajectoryParams& params) {
    return rng.uniform(params.turn_min, params.turn_max);
}

double turn_to_sweep(double turn_deg) {
    return turn_deg <= 180.0 ? deg2rad(turn_deg) : deg2rad(turn_deg - 360.0);
}

namespace {

bool inside(const Vec2& p, double half) {
    return std::abs(p.x()) <= half && std::abs(p.y()) <= half;
}

// An arc stays inside an axis-aligned square iff its endpoints and every
// axis-extreme point it passes through do.
bool arc_inside(const Arc& a, double half) {
    if (!inside(element_start(a), half) || !inside(element_end(a), half)) return false;
    const double lo = std::min(a.start_angle, a.start_angle + a.sweep);
    const double hi = std::max(a.start_angle, a.start_angle + a.sweep);
    for (double k = std::ceil(lo / (kPi / 2.0)); k * (kPi / 2.0) <= hi; k += 1.0) {
        if (!inside(arc_point(a, k * (kPi / 2.0)), half)) return false;
    }
    return true;
}

Arc make_fillet(const Vec2& at, double heading, double radius, double sweep) {
    const double side = sweep >= 0.0 ? 1.0 : -1.0;
    const Vec2 normal(-std::sin(heading), std::cos(heading));
    Arc arc;
    arc.center = at + side * radius * normal;
    arc.radius = radius;
    arc.start_angle = std::atan2(at.y() - arc.center.y(), at.x() - arc.center.x());
    arc.sweep = sweep;
    return arc;
}

struct Candidate {
    Arc arc;
    Line line;
    double heading;
};

std::optional<Candidate> try_turn(const Vec2& pos, double heading, double sweep,
                                  const TrajectoryParams& params) {
    Candidate c;
    c.arc = make_fillet(pos, heading, params.fillet_radius, sweep);
    const Vec2 line_start = element_end(c.arc);
    c.heading = wrap_angle(heading + sweep);
    c.line = Line{line_start, line_start + params.segment_length * unit_heading(heading + sweep)};
    if (!arc_inside(c.arc, params.bounds_half) || !inside(c.line.end, params.bounds_half)) {
        return std::nullopt;
    }
    return c;
}

// True if some turn on a 1-degree grid over [turn_min, turn_max] can follow
// from (pos, heading) without leaving the bounds.
bool has_continuation(const Vec2& pos, double heading, const TrajectoryParams& params) {
    for (double turn = params.turn_min; turn <= params.turn_max; turn += 1.0) {
        if (try_turn(pos, heading, turn_to_sweep(turn), params)) return true;
    }
    return try_turn(pos, heading, turn_to_sweep(params.turn_max), params).has_value();
}

}  // namespace

Trajectory generate(const TrajectoryParams& params) {
    params.validate();
    Rng rng(params.seed);
    std::vector<PathElement> elements;
    if (params.n_segments == 0) return Trajectory(params, std::move(elements));

    const double half = params.bounds_half;
    const double len = params.segment_length;

    double heading = 0.0;
    Vec2 pos = Vec2::Zero();
    bool placed = false;
    for (std::size_t attempt = 0; attempt <= params.max_resamples && !placed; ++attempt) {
        heading = rng.uniform(0.0, kTwoPi);
        const Vec2 end = pos + len * unit_heading(heading);
        placed = inside(end, half) &&
                 (params.n_segments == 1 || has_continuation(end, wrap_angle(heading), params));
    }
    if (!placed) throw BoundsUnsatisfiable(0, "first segment does not fit inside the bounds");
    elements.emplace_back(Line{pos, pos + len * unit_heading(heading)});
    pos = std::get<Line>(elements.back()).end;

    for (std::size_t seg = 1; seg < params.n_segments; ++seg) {
        const bool last = seg + 1 == params.n_segments;
        placed = false;
        for (std::size_t attempt = 0; attempt <= params.max_resamples; ++attempt) {
            const double sweep = turn_to_sweep(sample_turn(rng, params));
            const auto cand = try_turn(pos, heading, sweep, params);
            if (!cand) continue;
            if (!last && !has_continuation(cand->line.end, cand->heading, params)) continue;

            elements.emplace_back(cand->arc);
            elements.emplace_back(cand->line);
            heading = cand->heading;
            pos = cand->line.end;
            placed = true;
            break;
        }
        if (!placed) {
            throw BoundsUnsatisfiable(
                seg, fmt::format("seed {}: segment {} could not be placed inside +/-{} mm after {} "
                                 "re-draws",
                                 params.seed, seg, half, params.max_resamples));
        }
    }
    return Trajectory(params, std::move(elements));
}

PathSample position_at(const Trajectory& traj, double s) {
    if (!(s >= 0.0 && s <= traj.total_length())) {
        throw OutOfRange(fmt::format("arc length {} outside [0, {}]", s, traj.total_length()));
    }
    const auto& elems = traj.elements();
    if (elems.empty()) return {Vec2::Zero(), 0.0, 0.0};

    // Last element whose offset is <= s.
    std::size_t lo = 0, hi = elems.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (traj.element_offset(mid) <= s) lo = mid;
        else hi = mid;
    }
    const double d = s - traj.element_offset(lo);
    return {element_point(elems[lo], d), element_heading(elems[lo], d), s};
}

Vec2 position_at_time(const Trajectory& traj, double speed, double t) {
    const double s = std::min(speed * t, traj.total_length());
    return position_at(traj, std::max(s, 0.0)).position;
}

std::string emit_gcode(const Trajectory& traj, double speed) {
    if (speed > kPlatformSpeedLimit) {
        throw SpeedExceedsPlatform(
            fmt::format("speed {} mm/s exceeds the platform limit of {} mm/s", speed,
                        kPlatformSpeedLimit));
    }
    const std::string feed = format_number(speed * 60.0);
    std::string out = "G21\nG90\n";
    for (const auto& e : traj.elements()) {
        if (element_length(e) == 0.0) continue;
        const Vec2 end = element_end(e);
        if (const auto* arc = std::get_if<Arc>(&e)) {
            const Vec2 offset = arc->center - element_start(e);
            out += fmt::format("{} X{} Y{} I{} J{} F{}\n", arc->sweep < 0.0 ? "G2" : "G3",
                               format_number(end.x()), format_number(end.y()),
                               format_number(offset.x()), format_number(offset.y()), feed);
        } else {
            out += fmt::format("G1 X{} Y{} F{}\n", format_number(end.x()), format_number(end.y()),
                               feed);
        }
    }
    return out;
}

}  // namespace graspsim::traj
