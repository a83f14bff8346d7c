#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspsim/bench.hpp"
#include "graspsim/traj.hpp"
#include "graspsim/trial.hpp"

namespace graspsim::config {

using json = nlohmann::ordered_json;

inline constexpr int kConfigSchema = 1;
inline constexpr int kTrajectorySchema = 1;

/// Every effective setting. Infinite limits are written as the string "inf".
json to_json(const bench::SweepSpec& spec);

/// Overlays `doc` onto `base`. Keys that `to_json` would not produce are
/// rejected with ConfigError naming the dotted path.
bench::SweepSpec from_json(const json& doc, const bench::SweepSpec& base = {});

/// Parses config text. Syntax errors carry the line and column.
json parse_json(std::string_view text, const std::string& source = "<config>");

/// Applies one "dotted.key=value" override to a config document. The value
/// is read as JSON when it parses, otherwise as a string.
void apply_override(json& doc, std::string_view assignment);

/// Defaults, then the optional file, then the overrides in order.
bench::SweepSpec resolve(const std::optional<std::filesystem::path>& file,
                         const std::vector<std::string>& overrides);

json trajectory_to_json(const traj::Trajectory& trajectory);
traj::Trajectory trajectory_from_json(const json& doc);

json result_to_json(const trial::TrialResult& result);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace graspsim::config
