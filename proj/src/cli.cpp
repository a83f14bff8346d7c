#include "graspsim/cli.hpp"

#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "graspsim/bench.hpp"
#include "graspsim/config.hpp"
#include "graspsim/error.hpp"
#include "graspsim/format.hpp"
#include "graspsim/gcode.hpp"
#include "graspsim/percept.hpp"
#include "graspsim/trial.hpp"

namespace graspsim::cli {

namespace fs = std::filesystem;
using config::json;

namespace {

std::uint64_t to_u64(std::string_view s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(fmt::format("bad seed '{}'", s));
    }
    return v;
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    if (text.find(',') != std::string_view::npos) {
        std::size_t begin = 0;
        while (begin <= text.size()) {
            const auto pos = text.find(',', begin);
            const auto item = text.substr(begin, pos == std::string_view::npos ? std::string_view::npos : pos - begin);
            if (!item.empty()) seeds.push_back(to_u64(item));
            if (pos == std::string_view::npos) break;
            begin = pos + 1;
        }
    } else if (const auto dash = text.find('-'); dash != std::string_view::npos) {
        const auto lo = to_u64(text.substr(0, dash));
        const auto hi = to_u64(text.substr(dash + 1));
        if (hi < lo) throw ConfigError(fmt::format("empty seed range '{}'", text));
        if (hi - lo >= 1000000) throw ConfigError(fmt::format("seed range '{}' is too large", text));
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
        const auto n = to_u64(text);
        if (n == 0) throw ConfigError("--seeds needs at least one seed");
        for (std::uint64_t s = 1; s <= n; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) throw ConfigError(fmt::format("no seeds in '{}'", text));
    return seeds;
}

namespace {

// Options shared by every command that builds simulation configs.
struct ConfigOptions {
    std::string file;
    std::vector<std::string> sets;

    void add_to(CLI::App* app) {
        app->add_option("--config", file, "JSON config file (see docs/formats.md); flags override it")
            ->check(CLI::ExistingFile);
        app->add_option("--set", sets, "Override one config value, e.g. --set plant.accel_max=1500 (repeatable)");
    }

    bench::SweepSpec resolve() const {
        return config::resolve(file.empty() ? std::nullopt : std::optional<fs::path>(file), sets);
    }
};

void emit(const std::string& path, std::string_view content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
    } else {
        config::write_file(path, content);
    }
}

traj::Trajectory load_trajectory(const std::string& path) {
    return config::trajectory_from_json(config::parse_json(config::read_file(path), path));
}

Vec3 parse_vec3(const std::vector<double>& v, const char* flag) {
    if (v.size() != 3) throw ConfigError(fmt::format("{} expects x,y,z", flag));
    return {v[0], v[1], v[2]};
}

struct TrajGen {
    ConfigOptions cfg;
    std::uint64_t seed{0};
    std::optional<std::size_t> segments;
    std::string out_path;

    void add(CLI::App* parent) {
        auto* c = parent->add_subcommand("gen", "Generate a random-walk trajectory and write it as JSON");
        cfg.add_to(c);
        c->add_option("--seed", seed, "Trajectory seed")->capture_default_str();
        c->add_option("--segments", segments, "Number of linear segments (default from config: 40)");
        c->add_option("--out", out_path, "Output file; stdout when omitted or '-'");
        c->callback([this] { pending = true; });
    }

    bool pending{false};

    void exec(std::ostream& out) const {
        auto params = cfg.resolve().trajectory;
        params.seed = seed;
        if (segments) params.n_segments = *segments;
        emit(out_path, config::trajectory_to_json(traj::generate(params)).dump(2) + "\n", out);
    }
};

struct TrajGcode {
    ConfigOptions cfg;
    std::uint64_t seed{0};
    std::optional<std::size_t> segments;
    std::string in_path;
    double speed{100.0};
    std::string out_path;
    bool pending{false};

    void add(CLI::App* parent) {
        auto* c = parent->add_subcommand("gcode", "Emit Grbl G-code for a trajectory at a constant speed");
        cfg.add_to(c);
        c->add_option("--seed", seed, "Trajectory seed (ignored with --in)")->capture_default_str();
        c->add_option("--segments", segments, "Number of linear segments (ignored with --in)");
        c->add_option("--in", in_path, "Trajectory JSON written by 'traj gen'")->check(CLI::ExistingFile);
        c->add_option("--speed", speed, "Platform speed in mm/s (<= 250)")->capture_default_str();
        c->add_option("--out", out_path, "Output file; stdout when omitted or '-'");
        c->callback([this] { pending = true; });
    }

    void exec(std::ostream& out) const {
        traj::Trajectory t;
        if (!in_path.empty()) {
            t = load_trajectory(in_path);
        } else {
            auto params = cfg.resolve().trajectory;
            params.seed = seed;
            if (segments) params.n_segments = *segments;
            t = traj::generate(params);
        }
        emit(out_path, traj::emit_gcode(t, speed), out);
    }
};

struct GcodeSim {
    ConfigOptions cfg;
    std::string in_path;
    std::size_t samples{1000};
    std::optional<double> dt;
    std::string out_path;
    bool pending{false};

    void add(CLI::App* parent) {
        auto* c = parent->add_subcommand("sim", "Interpret G-code and print the platform position over time as CSV t,x,y");
        cfg.add_to(c);
        c->add_option("--in", in_path, "G-code file; stdin when omitted or '-'");
        c->add_option("--samples", samples, "Evenly spaced samples over the program, both ends included")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        c->add_option("--dt", dt, "Sample period in s (replaces --samples)")->check(CLI::PositiveNumber);
        c->add_option("--out", out_path, "Output CSV; stdout when omitted or '-'");
        c->callback([this] { pending = true; });
    }

    void exec(std::ostream& out) const {
        std::string text;
        if (in_path.empty() || in_path == "-") {
            text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
        } else {
            text = config::read_file(in_path);
        }
        const auto timeline = gcode::plan(gcode::parse(text), cfg.resolve().planner);
        std::vector<double> times;
        if (dt) {
            const auto n = static_cast<std::size_t>(std::floor(timeline.total_duration / *dt + 1e-9));
            for (std::size_t k = 0; k <= n; ++k) times.push_back(static_cast<double>(k) * *dt);
        } else if (samples == 1) {
            times.push_back(0.0);
        } else {
            for (std::size_t k = 0; k < samples; ++k) {
                times.push_back(timeline.total_duration * static_cast<double>(k) / static_cast<double>(samples - 1));
            }
        }
        std::string csv = "t,x,y\n";
        for (double t : times) {
            const Vec2 p = gcode::position_at_time(timeline, t);
            csv += fmt::format("{},{},{}\n", format_exact(t), format_exact(p.x()), format_exact(p.y()));
        }
        emit(out_path, csv, out);
    }
};

struct TrialRun {
    ConfigOptions cfg;
    std::uint64_t seed{1};
    std::optional<std::size_t> segments;
    std::string trajectory_path;
    double speed{100.0};
    double cube{30.0};
    std::string perception{"dual_hand"};
    std::string trace_path;
    bool pending{false};

    void add(CLI::App* parent) {
        auto* c = parent->add_subcommand("run", "Run one grasp trial and print its result as JSON");
        cfg.add_to(c);
        c->add_option("--seed", seed, "Trajectory seed")->capture_default_str();
        c->add_option("--segments", segments, "Number of linear segments; 0 keeps the platform still");
        c->add_option("--trajectory", trajectory_path, "Trajectory JSON (replaces --seed/--segments)")
            ->check(CLI::ExistingFile);
        c->add_option("--speed", speed, "Platform speed in mm/s")->capture_default_str();
        c->add_option("--cube", cube, "Cube side in mm")->capture_default_str();
        c->add_option("--perception", perception, "wrist, single_hand or dual_hand")->capture_default_str();
        c->add_option("--trace", trace_path, "Also write the per-tick plant trace CSV here");
        c->callback([this] { pending = true; });
    }

    void exec(std::ostream& out) const {
        const auto spec = cfg.resolve();
        traj::Trajectory t;
        if (!trajectory_path.empty()) {
            t = load_trajectory(trajectory_path);
        } else {
            auto params = spec.trajectory;
            params.seed = seed;
            if (segments) params.n_segments = *segments;
            t = traj::generate(params);
        }
        const auto kind = percept::perception_kind_from_string(perception);
        const auto tc = bench::make_trial_config(spec, t, speed, cube, kind);
        const auto result = trial::run_trial(tc, !trace_path.empty());
        if (!trace_path.empty()) config::write_file(trace_path, trial::trace_csv(result.trace));
        json record = config::result_to_json(result);
        record["seed"] = t.params().seed;
        record["speed_mm_s"] = speed;
        record["cube_mm"] = cube;
        record["perception"] = percept::to_string(kind);
        out << record.dump(2) << "\n";
    }
};

struct BenchRun {
    ConfigOptions cfg;
    std::string seeds;
    std::vector<double> speeds;
    std::vector<double> cubes;
    std::vector<std::string> perceptions;
    std::optional<std::size_t> repeats;
    std::size_t jobs{0};
    std::string out_dir{"report"};
    bool pending{false};

    void add(CLI::App* parent) {
        auto* c = parent->add_subcommand("run", "Run the sweep and write report.csv, trials.csv, metadata.json and charts");
        cfg.add_to(c);
        c->add_option("--seeds", seeds, "N (seeds 1..N), a range a-b, or a list a,b,c (default 20)");
        c->add_option("--speeds", speeds, "Platform speeds in mm/s, comma separated")->delimiter(',');
        c->add_option("--cubes", cubes, "Cube sides in mm, comma separated")->delimiter(',');
        c->add_option("--perception", perceptions, "Any of wrist,single_hand,dual_hand")->delimiter(',');
        c->add_option("--repeats", repeats, "Runs per (seed, cell); trials are deterministic so repeats agree")
            ->check(CLI::PositiveNumber);
        c->add_option("--jobs", jobs, "Worker threads; 0 uses every core")->capture_default_str();
        c->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
        c->callback([this] { pending = true; });
    }

    void exec(std::ostream& out) const {
        auto spec = cfg.resolve();
        if (!seeds.empty()) spec.seeds = parse_seeds(seeds);
        if (!speeds.empty()) spec.speeds = speeds;
        if (!cubes.empty()) spec.cube_sides = cubes;
        if (!perceptions.empty()) {
            spec.perceptions.clear();
            for (const auto& p : perceptions) spec.perceptions.push_back(percept::perception_kind_from_string(p));
        }
        if (repeats) spec.repeats = *repeats;
        const auto report = bench::run_benchmark(spec, jobs);
        for (const auto& p : bench::write_report(report, out_dir)) out << p.string() << "\n";
    }
};

struct BenchPlot {
    std::string in_path;
    std::string out_dir{"."};
    bool pending{false};

    void add(CLI::App* parent) {
        auto* c = parent->add_subcommand("plot", "Render charts_cube<N>.svg from a report.csv");
        c->add_option("--in", in_path, "report.csv written by 'bench run'")->required()->check(CLI::ExistingFile);
        c->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
        c->callback([this] { pending = true; });
    }

    void exec(std::ostream& out) const {
        const auto cells = bench::parse_report_csv(config::read_file(in_path));
        for (const auto& p : bench::write_charts(cells, out_dir)) out << p.string() << "\n";
    }
};

struct PerceptView {
    ConfigOptions cfg;
    std::string camera{"wrist"};
    double cube{30.0};
    std::vector<double> ee;
    std::vector<double> object;
    std::string out_path;
    bool pending{false};

    void add(CLI::App* parent) {
        auto* c = parent->add_subcommand("view", "Draw what one camera sees for a given ee and cube position, as SVG");
        cfg.add_to(c);
        c->add_option("--camera", camera, "wrist, hand_a or hand_b")->capture_default_str();
        c->add_option("--cube", cube, "Cube side in mm")->capture_default_str();
        c->add_option("--ee", ee, "Fingertip midpoint x,y,z in mm (default: home above the cube)")->delimiter(',');
        c->add_option("--object", object, "Cube centre x,y on the platform in mm (default 0,0)")->delimiter(',');
        c->add_option("--out", out_path, "Output SVG; stdout when omitted or '-'");
        c->callback([this] { pending = true; });
    }

    void exec(std::ostream& out) const {
        const auto spec = cfg.resolve();
        plant::PlantConfig pc = spec.plant;
        pc.cube_side = cube;
        pc.validate();
        const percept::CameraMount* mount = nullptr;
        if (camera == "wrist") mount = &spec.wrist;
        if (camera == "hand_a") mount = &spec.hand_a;
        if (camera == "hand_b") mount = &spec.hand_b;
        if (!mount) throw ConfigError(fmt::format("unknown camera '{}' (expected wrist, hand_a, hand_b)", camera));

        plant::PlantState s;
        s.gripper_gap = pc.finger_gap_open;
        s.ee_pos = ee.empty() ? Vec3(0.0, 0.0, pc.platform_top_z + pc.home_height) : parse_vec3(ee, "--ee");
        Vec2 obj = Vec2::Zero();
        if (!object.empty()) {
            if (object.size() != 2) throw ConfigError("--object expects x,y");
            obj = {object[0], object[1]};
        }
        s.object_center = Vec3(obj.x(), obj.y(), pc.platform_top_z + 0.5 * pc.cube_side);
        emit(out_path, percept::render_view_svg(mount->build(pc), s, pc), out);
    }
};

struct ConfigDump {
    ConfigOptions cfg;
    bool pending{false};

    void add(CLI::App* parent) {
        auto* c = parent->add_subcommand("dump", "Print the effective config (defaults, file, overrides) as JSON");
        cfg.add_to(c);
        c->callback([this] { pending = true; });
    }

    void exec(std::ostream& out) const { out << config::to_json(cfg.resolve()).dump(2) << "\n"; }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Deterministic dynamic-grasping benchmark simulator", "graspsim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "graspsim 0.1.0");

    auto* traj_cmd = app.add_subcommand("traj", "Random-walk trajectories")->require_subcommand(1);
    auto* gcode_cmd = app.add_subcommand("gcode", "G-code interpretation")->require_subcommand(1);
    auto* trial_cmd = app.add_subcommand("trial", "Single grasp trials")->require_subcommand(1);
    auto* bench_cmd = app.add_subcommand("bench", "Benchmark sweeps and reports")->require_subcommand(1);
    auto* percept_cmd = app.add_subcommand("percept", "Camera debugging")->require_subcommand(1);
    auto* config_cmd = app.add_subcommand("config", "Configuration files")->require_subcommand(1);

    TrajGen traj_gen;
    TrajGcode traj_gcode;
    GcodeSim gcode_sim;
    TrialRun trial_run;
    BenchRun bench_run;
    BenchPlot bench_plot;
    PerceptView percept_view;
    ConfigDump config_dump;
    traj_gen.add(traj_cmd);
    traj_gcode.add(traj_cmd);
    gcode_sim.add(gcode_cmd);
    trial_run.add(trial_cmd);
    bench_run.add(bench_cmd);
    bench_plot.add(bench_cmd);
    percept_view.add(percept_cmd);
    config_dump.add(config_cmd);

    // CLI11 wants argv order reversed when given a vector.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (traj_gen.pending) traj_gen.exec(out);
        if (traj_gcode.pending) traj_gcode.exec(out);
        if (gcode_sim.pending) gcode_sim.exec(out);
        if (trial_run.pending) trial_run.exec(out);
        if (bench_run.pending) bench_run.exec(out);
        if (bench_plot.pending) bench_plot.exec(out);
        if (percept_view.pending) percept_view.exec(out);
        if (config_dump.pending) config_dump.exec(out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace graspsim::cli
