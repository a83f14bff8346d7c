#include "graspsim/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "graspsim/config.hpp"
#include "graspsim/error.hpp"
#include "graspsim/format.hpp"

namespace graspsim::bench {

std::vector<std::uint64_t> default_seeds() {
    std::vector<std::uint64_t> seeds(20);
    std::iota(seeds.begin(), seeds.end(), std::uint64_t{1});
    return seeds;
}

SweepSpec::SweepSpec() : seeds(default_seeds()) {}

std::size_t SweepSpec::trial_count() const {
    return seeds.size() * speeds.size() * cube_sides.size() * perceptions.size() * repeats;
}

namespace {

template <typename T>
bool has_duplicates(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

}  // namespace

void SweepSpec::validate() const {
    if (seeds.empty() || speeds.empty() || cube_sides.empty() || perceptions.empty()) {
        throw ConfigError("bench: seeds, speeds, cubes and perception must all be non-empty");
    }
    if (repeats == 0) throw ConfigError("bench.repeats must be >= 1");
    for (double v : speeds) {
        if (!(v > 0.0 && v <= traj::kPlatformSpeedLimit)) {
            throw ConfigError(fmt::format("bench speed {} outside (0, {}] mm/s", format_exact(v),
                                          format_exact(traj::kPlatformSpeedLimit)));
        }
    }
    if (has_duplicates(seeds) || has_duplicates(speeds) || has_duplicates(cube_sides) ||
        has_duplicates(perceptions)) {
        throw ConfigError("bench lists must not contain duplicates");
    }
    for (double side : cube_sides) {
        plant::PlantConfig p = plant;
        p.cube_side = side;
        p.validate();
    }
    if (loss_frames == 0) throw ConfigError("trial.loss_frames must be >= 1");
    if (!(max_duration > 0.0)) throw ConfigError("trial.max_duration must be > 0");
}

trial::TrialConfig make_trial_config(const SweepSpec& spec, const traj::Trajectory& trajectory,
                                     double speed, double cube_side, percept::PerceptionKind kind) {
    trial::TrialConfig tc;
    tc.trajectory = trajectory;
    tc.speed = speed;
    tc.plant = spec.plant;
    tc.plant.cube_side = cube_side;
    tc.perception = percept::make_perception(kind, spec.wrist.build(tc.plant), spec.hand_a.build(tc.plant),
                                             spec.hand_b.build(tc.plant));
    tc.controller = spec.controller;
    tc.planner = spec.planner;
    tc.loss_frames = spec.loss_frames;
    tc.max_duration = spec.max_duration;
    return tc;
}

namespace {

std::string strip_module(const Error& e) {
    const std::string what = e.what();
    const std::string prefix = e.module() + ": ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

traj::Trajectory generate_for_seed(const SweepSpec& spec, std::uint64_t seed) {
    traj::TrajectoryParams params = spec.trajectory;
    params.seed = seed;
    try {
        return traj::generate(params);
    } catch (const BoundsUnsatisfiable& e) {
        throw BoundsUnsatisfiable(e.segment(), fmt::format("seed {}: {}", seed, strip_module(e)));
    } catch (const Error& e) {
        throw Error(e.module(), fmt::format("seed {}: {}", seed, strip_module(e)));
    }
}

struct Job {
    CellKey cell;
    std::size_t seed_index;
    std::size_t repeat;
};

}  // namespace

Report run_benchmark(const SweepSpec& spec, std::size_t jobs) {
    spec.validate();

    std::vector<traj::Trajectory> trajectories;
    trajectories.reserve(spec.seeds.size());
    for (auto seed : spec.seeds) trajectories.push_back(generate_for_seed(spec, seed));

    // Build every trial configuration up front so camera errors surface
    // before any thread starts.
    std::vector<Job> work;
    work.reserve(spec.trial_count());
    for (double speed : spec.speeds) {
        for (double cube : spec.cube_sides) {
            for (auto kind : spec.perceptions) {
                make_trial_config(spec, trajectories.front(), speed, cube, kind).validate();
                for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
                    for (std::size_t r = 0; r < spec.repeats; ++r) work.push_back({{speed, cube, kind}, s, r});
                }
            }
        }
    }

    std::vector<TrialRecord> records(work.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= work.size()) return;
            const Job& job = work[i];
            try {
                const auto tc = make_trial_config(spec, trajectories[job.seed_index], job.cell.speed,
                                                  job.cell.cube_side, job.cell.perception);
                const auto result = trial::run_trial(tc);
                records[i] = {job.cell, spec.seeds[job.seed_index], job.repeat, result.outcome,
                              result.grasp_time, result.frames};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(work.size());
                return;
            }
        }
    };

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, work.size());
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return std::tie(a.cell, a.seed, a.repeat) < std::tie(b.cell, b.seed, b.repeat);
    });

    Report report;
    report.spec = spec;
    report.cells = aggregate(records);
    report.trials = std::move(records);
    return report;
}

std::vector<CellStats> aggregate(std::span<const TrialRecord> trials) {
    struct Tally {
        std::size_t n{0};
        std::size_t counts[4]{};
        std::vector<double> times;
    };
    std::map<CellKey, Tally> cells;
    for (const auto& t : trials) {
        auto& tally = cells[t.cell];
        ++tally.n;
        ++tally.counts[static_cast<int>(t.outcome)];
        if (t.outcome == trial::Outcome::Success && t.grasp_time) tally.times.push_back(*t.grasp_time);
    }

    std::vector<CellStats> out;
    out.reserve(cells.size());
    for (auto& [key, tally] : cells) {
        CellStats s;
        s.key = key;
        s.n = tally.n;
        const double n = static_cast<double>(tally.n);
        s.success_rate = static_cast<double>(tally.counts[static_cast<int>(trial::Outcome::Success)]) / n;
        s.grasp_failure_rate = static_cast<double>(tally.counts[static_cast<int>(trial::Outcome::GraspFailure)]) / n;
        s.perception_failure_rate =
            static_cast<double>(tally.counts[static_cast<int>(trial::Outcome::PerceptionFailure)]) / n;
        s.timeout_rate = static_cast<double>(tally.counts[static_cast<int>(trial::Outcome::Timeout)]) / n;
        // Sum in a fixed order so the statistics never depend on trial order.
        std::sort(tally.times.begin(), tally.times.end());
        if (!tally.times.empty()) {
            const double m = std::accumulate(tally.times.begin(), tally.times.end(), 0.0) /
                             static_cast<double>(tally.times.size());
            s.mean_grasp_time = m;
            if (tally.times.size() >= 2) {
                double ss = 0.0;
                for (double t : tally.times) ss += (t - m) * (t - m);
                s.sigma_grasp_time = std::sqrt(ss / static_cast<double>(tally.times.size() - 1));
            }
        }
        out.push_back(s);
    }
    return out;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_exact(*v) : std::string(); }

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        const auto pos = line.find(sep, begin);
        out.push_back(line.substr(begin, pos == std::string_view::npos ? std::string_view::npos : pos - begin));
        if (pos == std::string_view::npos) return out;
        begin = pos + 1;
    }
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    for (auto line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
    }
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

double parse_double(std::string_view s, std::size_t line, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw IoError("bench", fmt::format("line {}: bad {} '{}'", line, what, s));
    }
    return v;
}

std::uint64_t parse_uint(std::string_view s, std::size_t line, const char* what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw IoError("bench", fmt::format("line {}: bad {} '{}'", line, what, s));
    }
    return v;
}

std::optional<double> parse_opt(std::string_view s, std::size_t line, const char* what) {
    if (s.empty()) return std::nullopt;
    return parse_double(s, line, what);
}

template <typename F>
auto parse_enum(std::string_view s, std::size_t line, F&& f) {
    try {
        return f(std::string(s));
    } catch (const Error& e) {
        throw IoError("bench", fmt::format("line {}: {}", line, strip_module(e)));
    }
}

// Checks the header and yields the split data rows with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::vector<std::string_view>>> csv_rows(std::string_view text,
                                                                              std::string_view header) {
    const auto lines = lines_of(text);
    if (lines.empty() || lines.front() != header) {
        throw IoError("bench", fmt::format("line 1: expected header '{}'", header));
    }
    const std::size_t columns = split(header, ',').size();
    std::vector<std::pair<std::size_t, std::vector<std::string_view>>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split(lines[i], ',');
        if (fields.size() != columns) {
            throw IoError("bench", fmt::format("line {}: expected {} fields, got {}", i + 1, columns, fields.size()));
        }
        rows.emplace_back(i + 1, std::move(fields));
    }
    return rows;
}

}  // namespace

std::string report_csv(std::span<const CellStats> cells) {
    std::string out(kReportHeader);
    out += '\n';
    for (const auto& c : cells) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", format_exact(c.key.speed), format_exact(c.key.cube_side),
                           percept::to_string(c.key.perception), c.n, format_exact(c.success_rate),
                           format_exact(c.grasp_failure_rate), format_exact(c.perception_failure_rate),
                           format_exact(c.timeout_rate), opt(c.mean_grasp_time), opt(c.sigma_grasp_time));
    }
    return out;
}

std::string trials_csv(std::span<const TrialRecord> trials) {
    std::string out(kTrialsHeader);
    out += '\n';
    for (const auto& t : trials) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", format_exact(t.cell.speed), format_exact(t.cell.cube_side),
                           percept::to_string(t.cell.perception), t.seed, t.repeat, trial::to_string(t.outcome),
                           opt(t.grasp_time), t.frames);
    }
    return out;
}

std::vector<CellStats> parse_report_csv(std::string_view text) {
    std::vector<CellStats> out;
    for (const auto& [line, f] : csv_rows(text, kReportHeader)) {
        CellStats c;
        c.key.speed = parse_double(f[0], line, "speed");
        c.key.cube_side = parse_double(f[1], line, "cube size");
        c.key.perception = parse_enum(f[2], line, percept::perception_kind_from_string);
        c.n = parse_uint(f[3], line, "n");
        c.success_rate = parse_double(f[4], line, "rate");
        c.grasp_failure_rate = parse_double(f[5], line, "rate");
        c.perception_failure_rate = parse_double(f[6], line, "rate");
        c.timeout_rate = parse_double(f[7], line, "rate");
        c.mean_grasp_time = parse_opt(f[8], line, "grasp time");
        c.sigma_grasp_time = parse_opt(f[9], line, "sigma");
        out.push_back(c);
    }
    return out;
}

std::vector<TrialRecord> parse_trials_csv(std::string_view text) {
    std::vector<TrialRecord> out;
    for (const auto& [line, f] : csv_rows(text, kTrialsHeader)) {
        TrialRecord t;
        t.cell.speed = parse_double(f[0], line, "speed");
        t.cell.cube_side = parse_double(f[1], line, "cube size");
        t.cell.perception = parse_enum(f[2], line, percept::perception_kind_from_string);
        t.seed = parse_uint(f[3], line, "seed");
        t.repeat = parse_uint(f[4], line, "repeat");
        t.outcome = parse_enum(f[5], line, trial::outcome_from_string);
        t.grasp_time = parse_opt(f[6], line, "grasp time");
        t.frames = parse_uint(f[7], line, "frames");
        out.push_back(t);
    }
    return out;
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kPanelHeight = 220.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;  // room for the legend
constexpr double kTop = 30.0;
constexpr double kBottom = 40.0;

const char* series_colour(percept::PerceptionKind kind) {
    switch (kind) {
        case percept::PerceptionKind::Wrist: return "#d62728";
        case percept::PerceptionKind::SingleHand: return "#1f77b4";
        case percept::PerceptionKind::DualHand: return "#2ca02c";
    }
    return "#000";
}

struct Axis {
    double lo;
    double hi;
    double px_lo;
    double px_hi;
    double map(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

std::string tick(double v) {
    const double r = std::round(v * 1000.0) / 1000.0;
    return format_number(r);
}

}  // namespace

std::string render_charts_svg(std::span<const CellStats> cells, double cube_side) {
    std::map<percept::PerceptionKind, std::vector<const CellStats*>> series;
    std::set<double> speeds;
    double t_max = 0.0;
    for (const auto& c : cells) {
        if (c.key.cube_side != cube_side) continue;
        series[c.key.perception].push_back(&c);
        speeds.insert(c.key.speed);
        if (c.mean_grasp_time) t_max = std::max(t_max, *c.mean_grasp_time + c.sigma_grasp_time.value_or(0.0));
    }
    if (series.empty()) throw IoError("bench", fmt::format("no cells for cube size {}", format_exact(cube_side)));
    for (auto& [kind, s] : series) {
        std::sort(s.begin(), s.end(), [](auto* a, auto* b) { return a->key.speed < b->key.speed; });
    }

    double s_lo = *speeds.begin();
    double s_hi = *speeds.rbegin();
    if (s_hi - s_lo < 1e-9) {
        s_lo -= 25.0;
        s_hi += 25.0;
    }
    t_max = t_max > 0.0 ? std::ceil(t_max * 1.1) : 1.0;

    const double height = 3.0 * kPanelHeight;
    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, height);

    struct Panel {
        const char* title;
        const char* ylabel;
        double y_hi;
        std::optional<double> (*value)(const CellStats&);
        bool band;
    };
    const Panel panels[3] = {
        {"Success rate", "rate", 1.0, [](const CellStats& c) { return std::optional<double>(c.success_rate); },
         false},
        {"Perception failure rate", "rate", 1.0,
         [](const CellStats& c) { return std::optional<double>(c.perception_failure_rate); }, false},
        {"Mean grasp time", "s", t_max, [](const CellStats& c) { return c.mean_grasp_time; }, true},
    };

    for (int p = 0; p < 3; ++p) {
        const Panel& panel = panels[p];
        const double y0 = p * kPanelHeight;
        const Axis xa{s_lo, s_hi, kLeft, kWidth - kRight};
        const Axis ya{0.0, panel.y_hi, y0 + kPanelHeight - kBottom, y0 + kTop};

        svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"14\">{} ({} mm cube)</text>\n", kLeft, y0 + 18.0,
                           panel.title, format_number(cube_side));
        svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
                           kLeft, ya.px_hi, xa.px_hi - xa.px_lo, ya.px_lo - ya.px_hi);
        for (int k = 0; k <= 4; ++k) {
            const double v = panel.y_hi * k / 4.0;
            const double y = ya.map(v);
            svg += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", kLeft, y,
                               xa.px_hi, y);
            svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6.0, y + 4.0,
                               tick(v));
        }
        for (double s : speeds) {
            const double x = xa.map(s);
            svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x,
                               ya.px_lo + 16.0, format_number(s));
        }
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">speed (mm/s)</text>\n",
                           0.5 * (xa.px_lo + xa.px_hi), ya.px_lo + 32.0);
        svg += fmt::format("<text x=\"16\" y=\"{:.2f}\" transform=\"rotate(-90 16 {:.2f})\" "
                           "text-anchor=\"middle\">{}</text>\n",
                           0.5 * (ya.px_lo + ya.px_hi), 0.5 * (ya.px_lo + ya.px_hi), panel.ylabel);

        for (const auto& [kind, s] : series) {
            const char* colour = series_colour(kind);
            if (panel.band) {
                std::vector<std::pair<double, double>> upper;
                std::vector<std::pair<double, double>> lower;
                for (const auto* c : s) {
                    if (!c->mean_grasp_time || !c->sigma_grasp_time) continue;
                    const double x = xa.map(c->key.speed);
                    upper.emplace_back(x, ya.map(*c->mean_grasp_time + *c->sigma_grasp_time));
                    lower.emplace_back(x, ya.map(std::max(0.0, *c->mean_grasp_time - *c->sigma_grasp_time)));
                }
                if (upper.size() >= 2) {
                    std::string pts;
                    for (const auto& [x, y] : upper) pts += fmt::format("{:.2f},{:.2f} ", x, y);
                    for (auto it = lower.rbegin(); it != lower.rend(); ++it) {
                        pts += fmt::format("{:.2f},{:.2f} ", it->first, it->second);
                    }
                    pts.pop_back();
                    svg += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
                                       pts, colour);
                }
            }
            std::string pts;
            for (const auto* c : s) {
                const auto v = panel.value(*c);
                if (!v) continue;
                const double x = xa.map(c->key.speed);
                const double y = ya.map(*v);
                pts += fmt::format("{:.2f},{:.2f} ", x, y);
                svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\"/>\n", x, y, colour);
            }
            if (std::count(pts.begin(), pts.end(), ' ') >= 2) {
                pts.pop_back();
                svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", pts,
                                   colour);
            }
        }

        double ly = ya.px_hi + 10.0;
        for (const auto& [kind, s] : series) {
            svg += fmt::format("<rect x=\"{}\" y=\"{:.2f}\" width=\"14\" height=\"4\" fill=\"{}\"/>\n",
                               xa.px_hi + 12.0, ly, series_colour(kind));
            svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\">{}</text>\n", xa.px_hi + 32.0, ly + 6.0,
                               percept::to_string(kind));
            ly += 18.0;
        }
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("bench", fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
}

void write(const std::filesystem::path& path, std::string_view content) {
    try {
        config::write_file(path, content);
    } catch (const IoError& e) {
        throw IoError("bench", strip_module(e));
    }
}

}  // namespace

std::vector<std::filesystem::path> write_charts(std::span<const CellStats> cells, const std::filesystem::path& dir) {
    if (cells.empty()) throw IoError("bench", "report has no cells");
    ensure_dir(dir);
    std::set<double> cubes;
    for (const auto& c : cells) cubes.insert(c.key.cube_side);
    std::vector<std::filesystem::path> written;
    for (double cube : cubes) {
        const auto path = dir / fmt::format("charts_cube{}.svg", format_number(cube));
        write(path, render_charts_svg(cells, cube));
        written.push_back(path);
    }
    return written;
}

std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir) {
    if (report.cells.empty()) throw IoError("bench", "report has no cells");
    ensure_dir(dir);
    std::vector<std::filesystem::path> written;
    written.push_back(dir / "report.csv");
    write(written.back(), report_csv(report.cells));
    written.push_back(dir / "trials.csv");
    write(written.back(), trials_csv(report.trials));

    // Loadable as a config file: `bench run --config metadata.json` repeats the run.
    written.push_back(dir / "metadata.json");
    write(written.back(), config::to_json(report.spec).dump(2) + "\n");

    for (auto& p : write_charts(report.cells, dir)) written.push_back(std::move(p));
    return written;
}

}  // namespace graspsim::bench
