#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graspsim/control.hpp"
#include "graspsim/gcode.hpp"
#include "graspsim/percept.hpp"
#include "graspsim/plant.hpp"
#include "graspsim/traj.hpp"
#include "graspsim/trial.hpp"

namespace graspsim::bench {

/// The sweep grid plus the base configuration every trial starts from.
/// `trajectory.seed` and `plant.cube_side` are overwritten per trial.
struct SweepSpec {
    std::vector<std::uint64_t> seeds;
    std::vector<double> speeds{100.0, 125.0, 150.0, 175.0, 200.0};
    std::vector<double> cube_sides{30.0, 40.0};
    std::vector<percept::PerceptionKind> perceptions{percept::PerceptionKind::Wrist,
                                                     percept::PerceptionKind::SingleHand,
                                                     percept::PerceptionKind::DualHand};
    std::size_t repeats{1};

    traj::TrajectoryParams trajectory;
    gcode::PlannerConfig planner;
    plant::PlantConfig plant;
    control::ControllerConfig controller;
    percept::CameraMount wrist{percept::default_wrist_mount()};
    percept::CameraMount hand_a{percept::default_hand_mount_a()};
    percept::CameraMount hand_b{percept::default_hand_mount_b()};
    std::size_t loss_frames{12};
    double max_duration{30.0};

    SweepSpec();

    std::size_t trial_count() const;
    void validate() const;
};

/// Seeds 1..20.
std::vector<std::uint64_t> default_seeds();

struct CellKey {
    double speed{0.0};
    double cube_side{0.0};
    percept::PerceptionKind perception{percept::PerceptionKind::Wrist};

    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct TrialRecord {
    CellKey cell;
    std::uint64_t seed{0};
    std::size_t repeat{0};
    trial::Outcome outcome{trial::Outcome::Timeout};
    std::optional<double> grasp_time;
    std::size_t frames{0};

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct CellStats {
    CellKey key;
    std::size_t n{0};
    double success_rate{0.0};
    double grasp_failure_rate{0.0};
    double perception_failure_rate{0.0};
    double timeout_rate{0.0};
    std::optional<double> mean_grasp_time;   // over successes
    std::optional<double> sigma_grasp_time;  // sample deviation, >= 2 successes

    friend bool operator==(const CellStats&, const CellStats&) = default;
};

struct Report {
    SweepSpec spec;
    std::vector<CellStats> cells;     // sorted by key
    std::vector<TrialRecord> trials;  // sorted by (key, seed, repeat)
};

/// Trial configuration for one grid point, built from the spec's base configs.
trial::TrialConfig make_trial_config(const SweepSpec& spec, const traj::Trajectory& trajectory,
                                     double speed, double cube_side, percept::PerceptionKind kind);

/// Runs every (seed, speed, cube, perception, repeat) combination on up to
/// `jobs` threads (0 picks the hardware concurrency). The report does not
/// depend on `jobs` or on completion order.
Report run_benchmark(const SweepSpec& spec, std::size_t jobs = 0);

/// Folds trial records into per-cell statistics, sorted by key.
std::vector<CellStats> aggregate(std::span<const TrialRecord> trials);

inline constexpr std::string_view kReportHeader =
    "speed_mm_s,cube_mm,perception,n,success_rate,grasp_failure_rate,perception_failure_rate,"
    "timeout_rate,mean_grasp_time_s,sigma_grasp_time_s";
inline constexpr std::string_view kTrialsHeader =
    "speed_mm_s,cube_mm,perception,seed,repeat,outcome,grasp_time_s,frames";

std::string report_csv(std::span<const CellStats> cells);
std::string trials_csv(std::span<const TrialRecord> trials);

/// Inverse of report_csv / trials_csv. Throws IoError on malformed input.
std::vector<CellStats> parse_report_csv(std::string_view text);
std::vector<TrialRecord> parse_trials_csv(std::string_view text);

/// Three stacked line charts for one cube size: success rate, perception
/// failure rate and mean grasp time with a +-1 sigma band, against speed.
std::string render_charts_svg(std::span<const CellStats> cells, double cube_side);

/// Writes report.csv, trials.csv, metadata.json and charts_cube<N>.svg.
/// Returns the paths written.
std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir);

/// Writes one charts_cube<N>.svg per cube size found in `cells`.
std::vector<std::filesystem::path> write_charts(std::span<const CellStats> cells,
                                                const std::filesystem::path& dir);

}  // namespace graspsim::bench
