#include "graspsim/gcode.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "graspsim/error.hpp"

namespace graspsim::gcode {

// ─── Parser ─────────────────────────────────────────────────────────────────

namespace {

struct Word {
    char letter;
    double value;
    std::size_t column;
};

// Blanks out comments in place so columns stay aligned with the source.
void strip_comments(std::string& line, std::size_t line_no) {
    bool in_paren = false;
    std::size_t paren_col = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (in_paren) {
            if (line[i] == ')') in_paren = false;
            line[i] = ' ';
        } else if (line[i] == '(') {
            in_paren = true;
            paren_col = i + 1;
            line[i] = ' ';
        } else if (line[i] == ';') {
            line.erase(i);
            break;
        }
    }
    if (in_paren) throw SyntaxError(line_no, paren_col, "unterminated comment");
}

std::vector<Word> tokenize(const std::string& line, std::size_t line_no) {
    std::vector<Word> words;
    std::size_t i = 0;
    const auto n = line.size();
    while (i < n) {
        const char c = line[i];
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        const std::size_t col = i + 1;
        if (!std::isalpha(static_cast<unsigned char>(c))) {
            throw SyntaxError(line_no, col, fmt::format("expected a word letter, found '{}'", c));
        }
        const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        ++i;
        const std::size_t num_begin = i;
        if (i < n && (line[i] == '+' || line[i] == '-')) ++i;
        std::size_t digits = 0;
        while (i < n && std::isdigit(static_cast<unsigned char>(line[i]))) ++i, ++digits;
        if (i < n && line[i] == '.') {
            ++i;
            while (i < n && std::isdigit(static_cast<unsigned char>(line[i]))) ++i, ++digits;
        }
        if (digits == 0) {
            throw SyntaxError(line_no, col, fmt::format("malformed number after '{}'", letter));
        }
        if (i < n && line[i] != ' ' && line[i] != '\t' &&
            !std::isalpha(static_cast<unsigned char>(line[i]))) {
            throw SyntaxError(line_no, i + 1, fmt::format("malformed number after '{}'", letter));
        }
        words.push_back({letter, std::stod(line.substr(num_begin, i - num_begin)), col});
    }
    return words;
}

}  // namespace

std::vector<GCommand> parse(std::string_view text) {
    std::vector<GCommand> commands;
    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        auto end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(begin, end - begin));
        begin = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        strip_comments(line, line_no);
        const auto words = tokenize(line, line_no);
        if (words.empty()) continue;

        std::optional<int> motion;
        std::size_t motion_col = 0;
        std::optional<double> x, y, i, j, f;
        std::optional<std::size_t> first_axis_col;
        std::vector<GCommand> setup;

        auto set_once = [&](std::optional<double>& slot, const Word& w) {
            if (slot) throw SyntaxError(line_no, w.column, fmt::format("repeated '{}' word", w.letter));
            slot = w.value;
            if (!first_axis_col) first_axis_col = w.column;
        };

        for (const auto& w : words) {
            switch (w.letter) {
                case 'G': {
                    const double code = w.value;
                    if (code == 21.0) {
                        setup.emplace_back(SetUnitsMM{});
                    } else if (code == 90.0) {
                        setup.emplace_back(SetAbsolute{});
                    } else if (code == 1.0 || code == 2.0 || code == 3.0) {
                        if (motion) throw SyntaxError(line_no, w.column, "more than one motion command on a line");
                        motion = static_cast<int>(code);
                        motion_col = w.column;
                    } else if (code == 20.0) {
                        throw SyntaxError(line_no, w.column, "inch units (G20) are not supported");
                    } else if (code == 91.0) {
                        throw SyntaxError(line_no, w.column, "relative positioning (G91) is not supported");
                    } else {
                        throw SyntaxError(line_no, w.column, fmt::format("unsupported command G{}", code));
                    }
                    break;
                }
                case 'X': set_once(x, w); break;
                case 'Y': set_once(y, w); break;
                case 'I': set_once(i, w); break;
                case 'J': set_once(j, w); break;
                case 'F':
                    set_once(f, w);
                    if (!(w.value > 0.0)) throw SyntaxError(line_no, w.column, "feed must be positive");
                    break;
                default:
                    throw SyntaxError(line_no, w.column, fmt::format("unknown word '{}'", w.letter));
            }
        }

        commands.insert(commands.end(), setup.begin(), setup.end());
        if (!motion) {
            if (first_axis_col) throw SyntaxError(line_no, *first_axis_col, "axis or feed word without a motion command");
            continue;
        }
        if (*motion == 1) {
            if (i || j) throw SyntaxError(line_no, motion_col, "I/J offsets on a linear move");
            commands.emplace_back(LinearMove{x, y, f});
        } else {
            if (!i || !j) throw SyntaxError(line_no, motion_col, "arc move requires both I and J offsets");
            commands.emplace_back(ArcMove{*motion == 2, x, y, *i, *j, f});
        }
    }
    return commands;
}

// ─── Planner ────────────────────────────────────────────────────────────────

void PlannerConfig::validate() const {
    if (!(speed_cap > 0.0)) throw ConfigError("gcode.speed_cap must be > 0");
    if (!(accel > 0.0)) throw ConfigError("gcode.accel must be > 0");
}

double SpeedProfile::distance_at(double t, double length, double duration) const {
    if (t <= 0.0) return 0.0;
    if (t >= duration) return length;
    if (ramp_time == 0.0) return std::min(cruise * t, length);
    if (t < ramp_time) return 0.5 * accel * t * t;
    const double remaining = duration - t;
    if (remaining < ramp_time) return length - 0.5 * accel * remaining * remaining;
    return ramp_distance + cruise * (t - ramp_time);
}

namespace {

SpeedProfile make_profile(double cruise, double length, double accel, double& duration) {
    SpeedProfile p;
    p.accel = accel;
    if (accel == std::numeric_limits<double>::infinity()) {
        p.cruise = cruise;
        duration = length / cruise;
        return p;
    }
    const double ramp_distance = 0.5 * cruise * cruise / accel;
    if (2.0 * ramp_distance <= length) {
        p.cruise = cruise;
        p.ramp_time = cruise / accel;
        p.ramp_distance = ramp_distance;
        duration = 2.0 * p.ramp_time + (length - 2.0 * ramp_distance) / cruise;
    } else {
        // Triangular: never reaches the commanded feed.
        p.cruise = std::sqrt(length * accel);
        p.ramp_time = p.cruise / accel;
        p.ramp_distance = 0.5 * length;
        duration = 2.0 * p.ramp_time;
    }
    return p;
}

}  // namespace

MotionTimeline plan(const std::vector<GCommand>& commands, const PlannerConfig& config,
                    const Vec2& start) {
    config.validate();
    MotionTimeline timeline;
    timeline.start = start;
    timeline.speed_cap = config.speed_cap;

    bool units = false;
    bool absolute = false;
    std::optional<double> feed;
    Vec2 pos = start;
    double clock = 0.0;

    auto push = [&](traj::PathElement element, std::size_t index) {
        const double length = traj::element_length(element);
        if (length <= 0.0) return;
        if (!feed) throw PlanError(fmt::format("command {}: motion before any feed rate", index + 1));
        const double cruise = std::min(*feed / 60.0, config.speed_cap);
        TimedMove move{std::move(element), length, clock, 0.0, {}};
        move.profile = make_profile(cruise, length, config.accel, move.duration);
        clock += move.duration;
        timeline.moves.push_back(std::move(move));
    };

    for (std::size_t idx = 0; idx < commands.size(); ++idx) {
        const auto& cmd = commands[idx];
        if (std::holds_alternative<SetUnitsMM>(cmd)) {
            units = true;
            continue;
        }
        if (std::holds_alternative<SetAbsolute>(cmd)) {
            absolute = true;
            continue;
        }
        if (!units || !absolute) {
            throw PlanError(fmt::format("command {}: motion before G21/G90 setup", idx + 1));
        }
        if (const auto* lin = std::get_if<LinearMove>(&cmd)) {
            if (lin->feed) feed = *lin->feed;
            const Vec2 target(lin->x.value_or(pos.x()), lin->y.value_or(pos.y()));
            push(traj::Line{pos, target}, idx);
            pos = target;
        } else if (const auto* arc = std::get_if<ArcMove>(&cmd)) {
            if (arc->feed) feed = *arc->feed;
            const Vec2 target(arc->x.value_or(pos.x()), arc->y.value_or(pos.y()));
            const Vec2 center = pos + Vec2(arc->i, arc->j);
            const double radius = (pos - center).norm();
            const double end_radius = (target - center).norm();
            if (radius == 0.0 || std::abs(end_radius - radius) > 0.005 + 1e-3 * radius) {
                throw PlanError(fmt::format("command {}: arc end point is not on the arc", idx + 1));
            }
            const double a0 = std::atan2(pos.y() - center.y(), pos.x() - center.x());
            const double a1 = std::atan2(target.y() - center.y(), target.x() - center.x());
            double sweep = a1 - a0;
            if (arc->clockwise) {
                if (sweep >= 0.0) sweep -= kTwoPi;
            } else {
                if (sweep <= 0.0) sweep += kTwoPi;
            }
            push(traj::Arc{center, radius, a0, sweep}, idx);
            pos = target;
        }
    }
    timeline.total_duration = clock;
    return timeline;
}

namespace {

const TimedMove* move_at(const MotionTimeline& timeline, double t) {
    const auto& moves = timeline.moves;
    auto it = std::upper_bound(moves.begin(), moves.end(), t,
                               [](double tt, const TimedMove& m) { return tt < m.start_time; });
    if (it == moves.begin()) return nullptr;
    return &*std::prev(it);
}

}  // namespace

Vec2 position_at_time(const MotionTimeline& timeline, double t) {
    if (timeline.moves.empty() || t <= 0.0) return timeline.start;
    if (t >= timeline.total_duration) {
        const auto& last = timeline.moves.back();
        return traj::element_point(last.element, last.length);
    }
    const TimedMove* m = move_at(timeline, t);
    const double d = m->profile.distance_at(t - m->start_time, m->length, m->duration);
    return traj::element_point(m->element, d);
}

double speed_at_time(const MotionTimeline& timeline, double t) {
    if (timeline.moves.empty() || t < 0.0 || t >= timeline.total_duration) return 0.0;
    const TimedMove* m = move_at(timeline, t);
    const auto& p = m->profile;
    const double local = t - m->start_time;
    if (p.ramp_time == 0.0) return p.cruise;
    if (local < p.ramp_time) return p.accel * local;
    if (m->duration - local < p.ramp_time) return p.accel * (m->duration - local);
    return p.cruise;
}

}  // namespace graspsim::gcode
