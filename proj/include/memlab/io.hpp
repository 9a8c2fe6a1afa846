#pragma once

#include "memlab/analysis.hpp"
#include "memlab/experiments.hpp"
#include "memlab/greens.hpp"
#include "memlab/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace memlab {

inline constexpr int kSchemaVersion = 1;

/// Columns t, x, u, I; one row per node per snapshot, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Columns t, x, u for a grid function.
void write_grid_csv(const GridFunction& field, const std::filesystem::path& path);

/// Columns t, x, u for a Picard space-time field.
void write_field_csv(const SpaceTimeField& field, const std::filesystem::path& path);

/// Columns x, y, t, G.
void write_kernel_csv(const NeumannHeatKernel& kernel, const std::vector<double>& xs,
                      const std::vector<double>& ts, const std::filesystem::path& path);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

nlohmann::json params_json(const ModelParams& params);
nlohmann::json trajectory_summary(const Trajectory& traj);
nlohmann::json to_json(const ResidualReport& report);
nlohmann::json to_json(const OrderingReport& report);
nlohmann::json to_json(const GronwallReport& report);
nlohmann::json to_json(const PositivityReport& report);
nlohmann::json to_json(const SubSuperSpec& spec);
nlohmann::json to_json(const PicardResult& result);
nlohmann::json to_json(const SweepResult& result);
nlohmann::json to_json(const NonuniqReport& report);
nlohmann::json to_json(const UniquenessReport& report);
nlohmann::json to_json(const ConvergenceTable& table);
nlohmann::json to_json(const CompatibilityReport& report);

/// One line: verdict plus the worst-violation row.
std::string verdict_line(const ResidualReport& report);
std::string verdict_line(const OrderingReport& report);

}  // namespace memlab
