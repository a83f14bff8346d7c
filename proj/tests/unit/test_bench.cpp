#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <random>
#include <sstream>

#include "graspsim/bench.hpp"
#include "graspsim/config.hpp"
#include "graspsim/error.hpp"
#include "graspsim/rng.hpp"

using namespace graspsim;
using namespace graspsim::bench;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const char* root = std::getenv("GRASPSIM_TEST_TMP");
    auto dir = std::filesystem::path(root ? root : std::filesystem::temp_directory_path().string()) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Synthetic records with every outcome mixed across a few cells.
std::vector<TrialRecord> synthetic(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    auto pick = [&](int hi) { return static_cast<int>(rng.uniform() * (hi + 1)); };  // 0..hi
    const trial::Outcome outcomes[] = {trial::Outcome::Success, trial::Outcome::GraspFailure,
                                       trial::Outcome::PerceptionFailure, trial::Outcome::Timeout};
    std::vector<TrialRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        TrialRecord r;
        r.cell.speed = 100.0 + 25.0 * static_cast<double>(pick(4));
        r.cell.cube_side = rng.uniform() < 0.5 ? 30.0 : 40.0;
        r.cell.perception = static_cast<percept::PerceptionKind>(pick(2));
        r.seed = i + 1;
        r.outcome = outcomes[pick(3)];
        r.frames = static_cast<std::size_t>(1 + pick(749));
        if (r.outcome == trial::Outcome::Success) r.grasp_time = static_cast<double>(r.frames) / 25.0;
        out.push_back(r);
    }
    return out;
}

SweepSpec tiny_spec() {
    SweepSpec s;
    s.seeds = {1, 2};
    s.speeds = {150.0};
    s.cube_sides = {30.0};
    s.perceptions = {percept::PerceptionKind::Wrist, percept::PerceptionKind::DualHand};
    return s;
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST(Bench, DefaultGrid) {
    const SweepSpec s;
    EXPECT_EQ(s.seeds, default_seeds());
    EXPECT_EQ(s.seeds.size(), 20u);
    EXPECT_EQ(s.trial_count(), 20u * 5u * 2u * 3u);
}

TEST(Bench, SingleTrialCell) {
    auto s = tiny_spec();
    s.seeds = {1};
    s.perceptions = {percept::PerceptionKind::DualHand};
    const auto r = run_benchmark(s, 1);
    ASSERT_EQ(r.cells.size(), 1u);
    ASSERT_EQ(r.trials.size(), 1u);
    const auto& c = r.cells.front();
    EXPECT_EQ(c.n, 1u);
    for (double rate : {c.success_rate, c.grasp_failure_rate, c.perception_failure_rate, c.timeout_rate}) {
        EXPECT_TRUE(rate == 0.0 || rate == 1.0);
    }
    EXPECT_FALSE(c.sigma_grasp_time);
    EXPECT_EQ(c.mean_grasp_time.has_value(), c.success_rate == 1.0);
}

TEST(Bench, RejectsBadSpec) {
    auto s = tiny_spec();
    s.seeds.clear();
    EXPECT_THROW(run_benchmark(s, 1), ConfigError);
    s = tiny_spec();
    s.speeds = {260.0};
    EXPECT_THROW(run_benchmark(s, 1), ConfigError);
    s = tiny_spec();
    s.repeats = 0;
    EXPECT_THROW(run_benchmark(s, 1), ConfigError);
}

TEST(Bench, RatesAndMoments) {
    const auto trials = synthetic(5, 700);
    const auto cells = aggregate(trials);
    EXPECT_TRUE(std::is_sorted(cells.begin(), cells.end(),
                               [](const CellStats& a, const CellStats& b) { return a.key < b.key; }));
    std::size_t total = 0;
    for (const auto& c : cells) {
        total += c.n;
        EXPECT_NEAR(c.success_rate + c.grasp_failure_rate + c.perception_failure_rate + c.timeout_rate, 1.0, 1e-12);

        // Recompute from the records of this cell.
        std::vector<double> times;
        std::size_t n = 0;
        for (const auto& t : trials) {
            if (t.cell != c.key) continue;
            ++n;
            if (t.outcome == trial::Outcome::Success) times.push_back(*t.grasp_time);
        }
        EXPECT_EQ(c.n, n);
        EXPECT_DOUBLE_EQ(c.success_rate, static_cast<double>(times.size()) / static_cast<double>(n));
        if (times.empty()) {
            EXPECT_FALSE(c.mean_grasp_time);
        } else {
            const double mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
            EXPECT_NEAR(*c.mean_grasp_time, mean, 1e-12);
        }
        if (times.size() < 2) {
            EXPECT_FALSE(c.sigma_grasp_time);
        } else {
            const double mean = *c.mean_grasp_time;
            double ss = 0.0;
            for (double t : times) ss += (t - mean) * (t - mean);
            EXPECT_NEAR(*c.sigma_grasp_time, std::sqrt(ss / static_cast<double>(times.size() - 1)), 1e-12);
        }
    }
    EXPECT_EQ(total, trials.size());
}

TEST(Bench, SigmaNeedsTwoSuccesses) {
    TrialRecord a;
    a.cell = {100.0, 30.0, percept::PerceptionKind::Wrist};
    a.outcome = trial::Outcome::Success;
    a.grasp_time = 6.0;
    a.seed = 1;
    TrialRecord b = a;
    b.seed = 2;
    b.outcome = trial::Outcome::PerceptionFailure;
    b.grasp_time.reset();
    std::vector<TrialRecord> two{a, b};
    auto cells = aggregate(two);
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_EQ(cells[0].mean_grasp_time, 6.0);
    EXPECT_FALSE(cells[0].sigma_grasp_time);

    TrialRecord c = a;
    c.seed = 3;
    c.grasp_time = 8.0;
    two.push_back(c);
    cells = aggregate(two);
    EXPECT_DOUBLE_EQ(*cells[0].mean_grasp_time, 7.0);
    EXPECT_DOUBLE_EQ(*cells[0].sigma_grasp_time, std::sqrt(2.0));
}

TEST(Bench, AggregateIgnoresOrder) {
    auto trials = synthetic(9, 300);
    const auto ref = aggregate(trials);
    std::mt19937_64 g(4);
    for (int k = 0; k < 5; ++k) {
        std::shuffle(trials.begin(), trials.end(), g);
        EXPECT_EQ(aggregate(trials), ref);
    }
}

TEST(Bench, CsvHeadersAndRoundTrip) {
    const auto trials = synthetic(11, 200);
    const auto cells = aggregate(trials);
    const auto rep = report_csv(cells);
    const auto tri = trials_csv(trials);
    EXPECT_EQ(rep.substr(0, rep.find('\n')), kReportHeader);
    EXPECT_EQ(tri.substr(0, tri.find('\n')), kTrialsHeader);
    EXPECT_EQ(count(rep, "\n"), cells.size() + 1);
    EXPECT_EQ(count(tri, "\n"), trials.size() + 1);

    // Every row has as many columns as the header.
    std::istringstream lines(rep);
    for (std::string line; std::getline(lines, line);) EXPECT_EQ(count(line, ","), 9u);

    const auto parsed_cells = parse_report_csv(rep);
    EXPECT_EQ(parsed_cells, cells);
    const auto parsed_trials = parse_trials_csv(tri);
    EXPECT_EQ(parsed_trials, trials);
    EXPECT_EQ(aggregate(parsed_trials), cells);
    EXPECT_EQ(report_csv(parsed_cells), rep);
}

TEST(Bench, MalformedCsvIsIoError) {
    EXPECT_THROW(parse_report_csv("nope\n"), IoError);
    EXPECT_THROW(parse_trials_csv(std::string(kTrialsHeader) + "\n100,30,wrist,1,0,success\n"), IoError);
    EXPECT_THROW(parse_trials_csv(std::string(kTrialsHeader) + "\n100,30,eyes,1,0,success,6,150\n"), IoError);
}

TEST(Bench, IndependentOfJobsAndByteStable) {
    const auto s = tiny_spec();
    const auto one = run_benchmark(s, 1);
    const auto three = run_benchmark(s, 3);
    EXPECT_EQ(one.trials, three.trials);
    EXPECT_EQ(one.cells, three.cells);
    EXPECT_EQ(report_csv(one.cells), report_csv(three.cells));
    EXPECT_EQ(trials_csv(one.trials), trials_csv(three.trials));
    EXPECT_EQ(one.trials.size(), s.trial_count());
    EXPECT_EQ(aggregate(one.trials), one.cells);
}

TEST(Bench, RepeatsDuplicateTrials) {
    auto s = tiny_spec();
    s.seeds = {3};
    s.repeats = 2;
    const auto r = run_benchmark(s, 1);
    ASSERT_EQ(r.trials.size(), 4u);
    for (std::size_t i = 0; i < r.trials.size(); i += 2) {
        EXPECT_EQ(r.trials[i].repeat, 0u);
        EXPECT_EQ(r.trials[i + 1].repeat, 1u);
        EXPECT_EQ(r.trials[i].outcome, r.trials[i + 1].outcome);
        EXPECT_EQ(r.trials[i].grasp_time, r.trials[i + 1].grasp_time);
    }
}

TEST(Bench, ChartsOnePointPerSeries) {
    std::vector<CellStats> cells;
    for (auto kind : {percept::PerceptionKind::Wrist, percept::PerceptionKind::DualHand}) {
        CellStats c;
        c.key = {150.0, 30.0, kind};
        c.n = 4;
        c.success_rate = 0.5;
        c.perception_failure_rate = 0.5;
        c.mean_grasp_time = 6.5;
        c.sigma_grasp_time = 0.2;
        cells.push_back(c);
    }
    const auto svg = render_charts_svg(cells, 30.0);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    // Three panels, one marker per series in each, no lines through one point.
    EXPECT_EQ(count(svg, "<circle"), 3u * 2u);
    EXPECT_EQ(count(svg, "<polyline"), 0u);
    EXPECT_THROW(render_charts_svg(cells, 40.0), IoError);
}

TEST(Bench, WriteReportFiles) {
    const auto dir = scratch("bench_write");
    Report r;
    r.spec = tiny_spec();
    r.trials = synthetic(2, 50);
    r.cells = aggregate(r.trials);
    const auto paths = write_report(r, dir);
    for (const char* name : {"report.csv", "trials.csv", "metadata.json", "charts_cube30.svg", "charts_cube40.svg"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
        EXPECT_NE(std::find(paths.begin(), paths.end(), dir / name), paths.end()) << name;
    }
    EXPECT_EQ(config::read_file(dir / "report.csv"), report_csv(r.cells));

    // The metadata reloads to the same spec.
    const auto doc = config::parse_json(config::read_file(dir / "metadata.json"));
    EXPECT_EQ(config::to_json(config::from_json(doc)), config::to_json(r.spec));
}
