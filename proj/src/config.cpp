#include "graspsim/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "graspsim/error.hpp"

namespace graspsim::config {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json number(double v) { return std::isinf(v) && v > 0.0 ? json("inf") : json(v); }

json vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json polygon(const Polygon& poly) {
    json out = json::array();
    for (const auto& p : poly) out.push_back({p.x(), p.y()});
    return out;
}

json mount_to_json(const percept::CameraMount& m) {
    json occ = json::array();
    for (const auto& poly : m.occluders) occ.push_back(polygon(poly));
    return {
        {"translation", vec3(m.translation)},
        {"yaw_deg", m.yaw_deg},
        {"pitch_deg", m.pitch_deg},
        {"roll_deg", m.roll_deg},
        {"fov_half_x_deg", m.fov_half_x_deg},
        {"fov_half_y_deg", m.fov_half_y_deg},
        {"finger_occluders", m.finger_occluders},
        {"occluders", occ},
    };
}

// Strict reader over one JSON object: every key must be claimed by a field.
class Section {
public:
    Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
        if (!doc_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where()));
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : doc_.items()) {
            if (!seen_.contains(key)) throw ConfigError(fmt::format("unknown key '{}'", join(key)));
        }
    }

    template <typename F>
    void with(const std::string& key, F&& f) {
        seen_.insert(key);
        auto it = doc_.find(key);
        if (it == doc_.end()) return;
        try {
            f(*it, join(key));
        } catch (const json::exception& e) {
            throw ConfigError(fmt::format("'{}': {}", join(key), e.what()));
        }
    }

    void real(const std::string& key, double& out, bool allow_inf = false) {
        with(key, [&](const json& v, const std::string& path) {
            if (allow_inf && v.is_string() && v.get<std::string>() == "inf") {
                out = kInf;
            } else if (v.is_number()) {
                out = v.get<double>();
            } else {
                throw ConfigError(fmt::format("'{}': expected a number{}", path, allow_inf ? " or \"inf\"" : ""));
            }
        });
    }

    template <typename T>
    void count(const std::string& key, T& out) {
        with(key, [&](const json& v, const std::string& path) {
            if (!v.is_number_unsigned()) throw ConfigError(fmt::format("'{}': expected a non-negative integer", path));
            out = v.get<T>();
        });
    }

    void flag(const std::string& key, bool& out) {
        with(key, [&](const json& v, const std::string& path) {
            if (!v.is_boolean()) throw ConfigError(fmt::format("'{}': expected true or false", path));
            out = v.get<bool>();
        });
    }

    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

    const json& doc_;
    std::string path_;
    std::set<std::string> seen_;
};

Vec3 read_vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
        throw ConfigError(fmt::format("'{}': expected [x, y, z]", path));
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::vector<Polygon> read_polygons(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(fmt::format("'{}': expected a list of polygons", path));
    std::vector<Polygon> out;
    for (const auto& poly : v) {
        Polygon p;
        if (!poly.is_array()) throw ConfigError(fmt::format("'{}': a polygon is a list of [u, v] points", path));
        for (const auto& pt : poly) {
            if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
                throw ConfigError(fmt::format("'{}': a polygon is a list of [u, v] points", path));
            }
            p.emplace_back(pt[0].get<double>(), pt[1].get<double>());
        }
        if (p.size() < 3) throw ConfigError(fmt::format("'{}': polygons need at least 3 points", path));
        // Stored CCW so the clipper can use them directly.
        out.push_back(convex_hull(std::move(p)));
    }
    return out;
}

void read_mount(const json& doc, const std::string& path, percept::CameraMount& m) {
    Section s(doc, path);
    s.with("translation", [&](const json& v, const std::string& p) { m.translation = read_vec3(v, p); });
    s.real("yaw_deg", m.yaw_deg);
    s.real("pitch_deg", m.pitch_deg);
    s.real("roll_deg", m.roll_deg);
    s.real("fov_half_x_deg", m.fov_half_x_deg);
    s.real("fov_half_y_deg", m.fov_half_y_deg);
    s.flag("finger_occluders", m.finger_occluders);
    s.with("occluders", [&](const json& v, const std::string& p) { m.occluders = read_polygons(v, p); });
}

template <typename T, typename F>
std::vector<T> read_list(const json& v, const std::string& path, F&& convert) {
    if (!v.is_array()) throw ConfigError(fmt::format("'{}': expected a list", path));
    std::vector<T> out;
    for (const auto& item : v) out.push_back(convert(item));
    return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

json to_json(const bench::SweepSpec& spec) {
    const auto& t = spec.trajectory;
    const auto& p = spec.plant;
    const auto& c = spec.controller;
    json perceptions = json::array();
    for (auto k : spec.perceptions) perceptions.push_back(percept::to_string(k));
    return {
        {"schema", kConfigSchema},
        {"trajectory",
         {
             {"segment_length", t.segment_length},
             {"fillet_radius", t.fillet_radius},
             {"turn_min", t.turn_min},
             {"turn_max", t.turn_max},
             {"n_segments", t.n_segments},
             {"bounds_half", t.bounds_half},
             {"max_resamples", t.max_resamples},
         }},
        {"planner", {{"speed_cap", number(spec.planner.speed_cap)}, {"accel", number(spec.planner.accel)}}},
        {"plant",
         {
             {"platform_top_z", p.platform_top_z},
             {"home_height", p.home_height},
             {"finger_gap_open", p.finger_gap_open},
             {"finger_length", p.finger_length},
             {"finger_thickness", p.finger_thickness},
             {"finger_width", p.finger_width},
             {"grasp_height_z", p.grasp_height_z ? json(*p.grasp_height_z) : json(nullptr)},
             {"close_speed", p.close_speed},
             {"vmax_axis", p.vmax_axis},
             {"accel_max", number(p.accel_max)},
             {"descent_speed", p.descent_speed},
             {"push_limit", p.push_limit},
             {"overlap_min", p.overlap_min},
             {"platform_half", p.platform_half},
             {"lift_height", p.lift_height},
         }},
        {"controller",
         {
             {"kp", c.kp},
             {"kd", c.kd},
             {"vmax", c.vmax},
             {"descent", c.descent},
             {"close_ex", c.close_ex},
             {"close_ey", c.close_ey},
             {"rate", c.rate},
         }},
        {"cameras",
         {{"wrist", mount_to_json(spec.wrist)},
          {"hand_a", mount_to_json(spec.hand_a)},
          {"hand_b", mount_to_json(spec.hand_b)}}},
        {"trial", {{"loss_frames", spec.loss_frames}, {"max_duration", spec.max_duration}}},
        {"bench",
         {
             {"seeds", spec.seeds},
             {"speeds", spec.speeds},
             {"cubes", spec.cube_sides},
             {"perception", perceptions},
             {"repeats", spec.repeats},
         }},
    };
}

bench::SweepSpec from_json(const json& doc, const bench::SweepSpec& base) {
    bench::SweepSpec spec = base;
    Section root(doc, "");
    root.with("schema", [&](const json& v, const std::string& path) {
        if (!v.is_number_integer() || v.get<int>() != kConfigSchema) {
            throw ConfigError(fmt::format("'{}': unsupported schema {} (expected {})", path, v.dump(), kConfigSchema));
        }
    });
    root.with("trajectory", [&](const json& v, const std::string& path) {
        Section s(v, path);
        auto& t = spec.trajectory;
        s.real("segment_length", t.segment_length);
        s.real("fillet_radius", t.fillet_radius);
        s.real("turn_min", t.turn_min);
        s.real("turn_max", t.turn_max);
        s.count("n_segments", t.n_segments);
        s.real("bounds_half", t.bounds_half);
        s.count("max_resamples", t.max_resamples);
    });
    root.with("planner", [&](const json& v, const std::string& path) {
        Section s(v, path);
        s.real("speed_cap", spec.planner.speed_cap, true);
        s.real("accel", spec.planner.accel, true);
    });
    root.with("plant", [&](const json& v, const std::string& path) {
        Section s(v, path);
        auto& p = spec.plant;
        s.real("platform_top_z", p.platform_top_z);
        s.real("home_height", p.home_height);
        s.real("finger_gap_open", p.finger_gap_open);
        s.real("finger_length", p.finger_length);
        s.real("finger_thickness", p.finger_thickness);
        s.real("finger_width", p.finger_width);
        s.with("grasp_height_z", [&](const json& g, const std::string& gp) {
            if (g.is_null()) {
                p.grasp_height_z.reset();
            } else if (g.is_number()) {
                p.grasp_height_z = g.get<double>();
            } else {
                throw ConfigError(fmt::format("'{}': expected a number or null", gp));
            }
        });
        s.real("close_speed", p.close_speed);
        s.real("vmax_axis", p.vmax_axis);
        s.real("accel_max", p.accel_max, true);
        s.real("descent_speed", p.descent_speed);
        s.real("push_limit", p.push_limit);
        s.real("overlap_min", p.overlap_min);
        s.real("platform_half", p.platform_half);
        s.real("lift_height", p.lift_height);
    });
    root.with("controller", [&](const json& v, const std::string& path) {
        Section s(v, path);
        auto& c = spec.controller;
        s.real("kp", c.kp);
        s.real("kd", c.kd);
        s.real("vmax", c.vmax);
        s.real("descent", c.descent);
        s.real("close_ex", c.close_ex);
        s.real("close_ey", c.close_ey);
        s.real("rate", c.rate);
    });
    root.with("cameras", [&](const json& v, const std::string& path) {
        Section s(v, path);
        s.with("wrist", [&](const json& m, const std::string& p) { read_mount(m, p, spec.wrist); });
        s.with("hand_a", [&](const json& m, const std::string& p) { read_mount(m, p, spec.hand_a); });
        s.with("hand_b", [&](const json& m, const std::string& p) { read_mount(m, p, spec.hand_b); });
    });
    root.with("trial", [&](const json& v, const std::string& path) {
        Section s(v, path);
        s.count("loss_frames", spec.loss_frames);
        s.real("max_duration", spec.max_duration);
    });
    root.with("bench", [&](const json& v, const std::string& path) {
        Section s(v, path);
        s.with("seeds", [&](const json& l, const std::string& p) {
            spec.seeds = read_list<std::uint64_t>(l, p, [&](const json& x) {
                if (!x.is_number_unsigned()) throw ConfigError(fmt::format("'{}': seeds are non-negative integers", p));
                return x.get<std::uint64_t>();
            });
        });
        s.with("speeds", [&](const json& l, const std::string& p) {
            spec.speeds = read_list<double>(l, p, [&](const json& x) {
                if (!x.is_number()) throw ConfigError(fmt::format("'{}': expected numbers", p));
                return x.get<double>();
            });
        });
        s.with("cubes", [&](const json& l, const std::string& p) {
            spec.cube_sides = read_list<double>(l, p, [&](const json& x) {
                if (!x.is_number()) throw ConfigError(fmt::format("'{}': expected numbers", p));
                return x.get<double>();
            });
        });
        s.with("perception", [&](const json& l, const std::string& p) {
            spec.perceptions = read_list<percept::PerceptionKind>(l, p, [&](const json& x) {
                if (!x.is_string()) throw ConfigError(fmt::format("'{}': expected names", p));
                return percept::perception_kind_from_string(x.get<std::string>());
            });
        });
        s.count("repeats", spec.repeats);
    });
    return spec;
}

json parse_json(std::string_view text, const std::string& source) {
    try {
        return json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string msg = e.what();
        // Drop the library's own prefix, keep the reason.
        if (auto pos = msg.find(": "); pos != std::string::npos) msg = msg.substr(pos + 2);
        throw ConfigError(fmt::format("{}:{}:{}: {}", source, line, col, msg));
    }
}

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError(fmt::format("override '{}' is not of the form key=value", assignment));
    }
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json* node = &doc;
    std::size_t begin = 0;
    while (true) {
        const auto dot = key.find('.', begin);
        const std::string part = key.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
        if (part.empty()) throw ConfigError(fmt::format("override key '{}' has an empty component", key));
        if (!node->is_object() || !node->contains(part)) throw ConfigError(fmt::format("unknown key '{}'", key));
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        begin = dot + 1;
    }
    *node = std::move(value);
}

bench::SweepSpec resolve(const std::optional<std::filesystem::path>& file,
                         const std::vector<std::string>& overrides) {
    bench::SweepSpec spec;
    if (file) spec = from_json(parse_json(read_file(*file), file->string()), spec);
    if (!overrides.empty()) {
        json doc = to_json(spec);
        for (const auto& o : overrides) apply_override(doc, o);
        spec = from_json(doc, spec);
    }
    spec.validate();
    return spec;
}

json trajectory_to_json(const traj::Trajectory& trajectory) {
    const auto& p = trajectory.params();
    json elements = json::array();
    for (const auto& e : trajectory.elements()) {
        if (const auto* line = std::get_if<traj::Line>(&e)) {
            elements.push_back({{"type", "line"},
                                {"start", {line->start.x(), line->start.y()}},
                                {"end", {line->end.x(), line->end.y()}}});
        } else {
            const auto& arc = std::get<traj::Arc>(e);
            elements.push_back({{"type", "arc"},
                                {"center", {arc.center.x(), arc.center.y()}},
                                {"radius", arc.radius},
                                {"start_angle", arc.start_angle},
                                {"sweep", arc.sweep}});
        }
    }
    return {
        {"schema", kTrajectorySchema},
        {"params",
         {
             {"segment_length", p.segment_length},
             {"fillet_radius", p.fillet_radius},
             {"turn_min", p.turn_min},
             {"turn_max", p.turn_max},
             {"n_segments", p.n_segments},
             {"bounds_half", p.bounds_half},
             {"seed", p.seed},
             {"max_resamples", p.max_resamples},
         }},
        {"total_length", trajectory.total_length()},
        {"elements", elements},
    };
}

traj::Trajectory trajectory_from_json(const json& doc) {
    Section root(doc, "");
    root.with("schema", [&](const json& v, const std::string& path) {
        if (!v.is_number_integer() || v.get<int>() != kTrajectorySchema) {
            throw ConfigError(fmt::format("'{}': unsupported trajectory schema {}", path, v.dump()));
        }
    });
    traj::TrajectoryParams params;
    root.with("params", [&](const json& v, const std::string& path) {
        Section s(v, path);
        s.real("segment_length", params.segment_length);
        s.real("fillet_radius", params.fillet_radius);
        s.real("turn_min", params.turn_min);
        s.real("turn_max", params.turn_max);
        s.count("n_segments", params.n_segments);
        s.real("bounds_half", params.bounds_half);
        s.count("seed", params.seed);
        s.count("max_resamples", params.max_resamples);
    });
    root.with("total_length", [](const json&, const std::string&) {});
    std::vector<traj::PathElement> elements;
    auto point = [](const json& v, const std::string& path) {
        if (!v.is_array() || v.size() != 2) throw ConfigError(fmt::format("'{}': expected [x, y]", path));
        return Vec2(v[0].get<double>(), v[1].get<double>());
    };
    root.with("elements", [&](const json& list, const std::string& path) {
        if (!list.is_array()) throw ConfigError(fmt::format("'{}': expected a list", path));
        for (std::size_t i = 0; i < list.size(); ++i) {
            Section s(list[i], fmt::format("{}[{}]", path, i));
            std::string type;
            s.with("type", [&](const json& v, const std::string&) { type = v.get<std::string>(); });
            if (type == "line") {
                traj::Line l;
                s.with("start", [&](const json& v, const std::string& p) { l.start = point(v, p); });
                s.with("end", [&](const json& v, const std::string& p) { l.end = point(v, p); });
                elements.emplace_back(l);
            } else if (type == "arc") {
                traj::Arc a;
                s.with("center", [&](const json& v, const std::string& p) { a.center = point(v, p); });
                s.real("radius", a.radius);
                s.real("start_angle", a.start_angle);
                s.real("sweep", a.sweep);
                elements.emplace_back(a);
            } else {
                throw ConfigError(fmt::format("'{}[{}].type': expected \"line\" or \"arc\"", path, i));
            }
        }
    });
    return traj::Trajectory(params, std::move(elements));
}

json result_to_json(const trial::TrialResult& result) {
    return {
        {"outcome", trial::to_string(result.outcome)},
        {"grasp_time_s", result.grasp_time ? json(*result.grasp_time) : json(nullptr)},
        {"frames", result.frames},
        {"lifted_object_z", result.lifted_object_z ? json(*result.lifted_object_z) : json(nullptr)},
    };
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("io", fmt::format("cannot open '{}' for reading", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("io", fmt::format("cannot open '{}' for writing", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("io", fmt::format("write to '{}' failed", path.string()));
}

}  // namespace graspsim::config
