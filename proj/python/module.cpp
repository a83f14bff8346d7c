#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graspsim/bench.hpp"
#include "graspsim/config.hpp"
#include "graspsim/error.hpp"
#include "graspsim/gcode.hpp"
#include "graspsim/traj.hpp"
#include "graspsim/trial.hpp"

namespace py = pybind11;
using namespace graspsim;

namespace {

// Configs cross the boundary as JSON text; the Python wrapper does the dict conversion.
bench::SweepSpec spec_from(const std::optional<std::string>& config_json) {
    bench::SweepSpec spec;
    if (config_json) spec = config::from_json(config::parse_json(*config_json, "<python>"), spec);
    spec.validate();
    return spec;
}

traj::Trajectory make_trajectory(const bench::SweepSpec& spec, std::uint64_t seed,
                                 std::optional<std::size_t> n_segments) {
    auto params = spec.trajectory;
    params.seed = seed;
    if (n_segments) params.n_segments = *n_segments;
    return traj::generate(params);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of the graspsim benchmark simulator";
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def("default_config", [] { return config::to_json(bench::SweepSpec{}).dump(); });

    m.def(
        "generate_trajectory",
        [](std::uint64_t seed, std::optional<std::size_t> n_segments, std::optional<std::string> cfg) {
            return config::trajectory_to_json(make_trajectory(spec_from(cfg), seed, n_segments)).dump();
        },
        py::arg("seed"), py::arg("n_segments") = py::none(), py::arg("config") = py::none());

    m.def(
        "emit_gcode",
        [](std::uint64_t seed, double speed, std::optional<std::size_t> n_segments, std::optional<std::string> cfg) {
            return traj::emit_gcode(make_trajectory(spec_from(cfg), seed, n_segments), speed);
        },
        py::arg("seed"), py::arg("speed"), py::arg("n_segments") = py::none(), py::arg("config") = py::none());

    m.def(
        "simulate_gcode",
        [](const std::string& text, std::size_t samples, std::optional<std::string> cfg) {
            if (samples < 2) throw ConfigError("samples must be >= 2");
            const auto timeline = gcode::plan(gcode::parse(text), spec_from(cfg).planner);
            std::vector<std::tuple<double, double, double>> out;
            for (std::size_t k = 0; k < samples; ++k) {
                const double t = timeline.total_duration * static_cast<double>(k) / static_cast<double>(samples - 1);
                const Vec2 p = gcode::position_at_time(timeline, t);
                out.emplace_back(t, p.x(), p.y());
            }
            return out;
        },
        py::arg("text"), py::arg("samples") = 1000, py::arg("config") = py::none());

    m.def(
        "run_trial",
        [](std::uint64_t seed, double speed, double cube, const std::string& perception,
           std::optional<std::size_t> n_segments, std::optional<std::string> cfg) {
            const auto spec = spec_from(cfg);
            const auto t = make_trajectory(spec, seed, n_segments);
            const auto tc = bench::make_trial_config(spec, t, speed, cube, percept::perception_kind_from_string(perception));
            trial::TrialResult r;
            {
                py::gil_scoped_release release;
                r = trial::run_trial(tc);
            }
            return config::result_to_json(r).dump();
        },
        py::arg("seed"), py::arg("speed"), py::arg("cube"), py::arg("perception"),
        py::arg("n_segments") = py::none(), py::arg("config") = py::none());

    m.def(
        "run_benchmark",
        [](std::optional<std::string> cfg, std::size_t jobs) {
            const auto spec = spec_from(cfg);
            bench::Report report;
            {
                py::gil_scoped_release release;
                report = bench::run_benchmark(spec, jobs);
            }
            return py::make_tuple(bench::report_csv(report.cells), bench::trials_csv(report.trials));
        },
        py::arg("config") = py::none(), py::arg("jobs") = 0);

    m.def("render_charts_svg", [](const std::string& report_csv, double cube) {
        return bench::render_charts_svg(bench::parse_report_csv(report_csv), cube);
    });
}
