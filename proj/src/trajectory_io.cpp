#include "memlab/io.hpp"
#include "memlab/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>

namespace memlab {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    File f(std::fopen(path.c_str(), "w"));
    if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
    return f;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    File f = open_for_write(path);
    std::fputs("t,x,u,I\n", f.get());
    const std::vector<double> xs = traj.domain().node_positions();
    for (const Snapshot& s : traj.snapshots()) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g\n", s.t, xs[i], s.u[i], s.memory[i]);
        }
    }
}

void write_grid_csv(const GridFunction& field, const std::filesystem::path& path) {
    File f = open_for_write(path);
    std::fputs("t,x,u\n", f.get());
    for (std::size_t j = 0; j < field.t.size(); ++j) {
        for (std::size_t i = 0; i < field.x.size(); ++i) {
            std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", field.t[j], field.x[i], field.u[j][i]);
        }
    }
}

void write_field_csv(const SpaceTimeField& field, const std::filesystem::path& path) {
    File f = open_for_write(path);
    std::fputs("t,x,u\n", f.get());
    for (std::size_t j = 0; j < field.t.size(); ++j) {
        for (std::size_t i = 0; i < field.x.size(); ++i) {
            std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", field.t[j], field.x[i],
                         field.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
    }
}

void write_kernel_csv(const NeumannHeatKernel& kernel, const std::vector<double>& xs,
                      const std::vector<double>& ts, const std::filesystem::path& path) {
    File f = open_for_write(path);
    std::fputs("x,y,t,G\n", f.get());
    for (double t : ts) {
        const Eigen::MatrixXd g = kernel.matrix(xs, xs, t);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            for (std::size_t k = 0; k < xs.size(); ++k) {
                std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g\n", xs[i], xs[k], t,
                             g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
            }
        }
    }
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

nlohmann::json trajectory_summary(const Trajectory& traj) {
    nlohmann::json snaps = nlohmann::json::array();
    for (const Snapshot& s : traj.snapshots()) {
        const auto [lo, hi] = std::minmax_element(s.u.begin(), s.u.end());
        snaps.push_back({{"t", s.t}, {"min", *lo}, {"max", *hi}});
    }
    const StepCounters& c = traj.counters();
    const SolverConfig& cfg = traj.config();
    return {
        {"schema_version", kSchemaVersion},
        {"params", params_json(traj.problem().params)},
        {"domain", {{"length", traj.domain().length()}, {"nodes", traj.domain().nodes()}}},
        {"kernel", traj.problem().kernel.description()},
        {"solver",
         {{"dt", cfg.dt},
          {"t_final", cfg.t_final},
          {"epsilon", cfg.epsilon},
          {"adaptive", cfg.adaptive},
          {"snapshot_stride", cfg.snapshot_stride},
          {"blowup_cap", cfg.blowup_cap}}},
        {"termination", std::string(to_string(traj.termination()))},
        {"final_time", traj.final_time()},
        {"counters",
         {{"steps", c.steps},
          {"substeps", c.substeps},
          {"clamp_events", c.clamp_events},
          {"dt_halvings", c.dt_halvings}}},
        {"mass_initial", total_mass(traj.snapshots().front().u, traj.domain())},
        {"mass_final", total_mass(traj.snapshots().back().u, traj.domain())},
        {"snapshots", snaps},
    };
}

}  // namespace memlab
