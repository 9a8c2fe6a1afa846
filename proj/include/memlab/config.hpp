#pragma once

#include "memlab/experiments.hpp"
#include "memlab/greens.hpp"
#include "memlab/problem.hpp"
#include "memlab/solver.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace memlab {

struct KernelSettings {
    std::string type = "zero";  // zero | constant | separable | table
    double kappa = 0.0;
    std::vector<double> phi{1.0};  // polynomial coefficients in y, lowest first
    std::vector<double> eta{1.0};  // polynomial coefficients in t, lowest first
    std::filesystem::path table;   // CSV with columns boundary, y, t, value
};

struct InitialSettings {
    std::string type = "constant";  // constant | compatible | cosine | bump | zero
    double level = 1.0;
    double amplitude = 0.5;
    // bump: amplitude * max(0, 1 - |x - center L| / (width L))^2
    double center = 0.5;
    double width = 0.25;
    std::string compatible = "auto";  // auto | true | false
};

struct CompareSettings {
    double upper_shift = 0.5;
    double tolerance = 1e-6;
    bool swap = false;
};

struct ConvergeSettings {
    std::vector<ConvergenceLevel> levels{{51, 4e-4}, {101, 1e-4}, {201, 2.5e-5}};
    std::string exact = "none";  // heat_mode | ode | none
};

struct GreensSettings {
    std::size_t samples = 100;
    double t_min = 1e-5;
    double t_max = 1.0;
    bool dump = false;
    std::size_t dump_nodes = 21;
    std::vector<double> dump_times{1e-3, 1e-2, 1e-1};
};

struct VerifySettings {
    // solution | zero | exp_super | tgamma | constant | boundary_layer
    std::string candidate = "solution";
    double tolerance = 1e-4;
    std::size_t nodes = 101;
    std::size_t intervals = 100;
    double eps = 0.1;
    double tau = 0.5;
    double T0 = 1.0;
    double t_end = 0.0;  // > 0 clips the checked window
};

struct NonuniqSettings {
    std::string branch = "auto";  // auto | tgamma | boundary
    double dominance_horizon = 0.0;
    double ordering_tolerance = 1e-9;
    double check_tolerance = 1e-4;
};

/// Everything a run needs, read from an INI file plus command-line overrides.
struct RunSettings {
    ModelParams params;
    double length = 1.0;
    std::size_t nodes = 101;
    KernelSettings kernel;
    InitialSettings initial;
    SolverConfig solver;
    PicardConfig picard;
    bool picard_cross_check = false;
    std::vector<double> ladder = default_ladder();
    double sweep_tolerance = 1e-6;
    CompareSettings compare;
    double delta0 = 1e-6;
    ConvergeSettings converge;
    GreensSettings greens;
    VerifySettings verify;
    NonuniqSettings nonuniq;
};

/// Every accepted "section.key", in file order of the documentation.
const std::vector<std::string>& known_config_keys();

/// Sets one key from its textual value. Throws InvalidConfig on unknown keys
/// or malformed values. Relative table paths resolve against `base_dir`.
void apply_setting(RunSettings& settings, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir = {});

/// Parses "section.key=value".
void apply_override(RunSettings& settings, const std::string& assignment);

/// Reads an INI file (sections and key = value lines, ';' or '#' comments),
/// then applies overrides in order.
RunSettings load_settings(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

RunSettings settings_from_string(const std::string& text,
                                 const std::vector<std::string>& overrides = {},
                                 const std::filesystem::path& base_dir = {});

/// Kernel table from CSV rows (boundary, y, t, value); boundary is left|right|0|L.
BoundaryKernel read_kernel_table(const std::filesystem::path& path, double length);

BoundaryKernel build_kernel(const RunSettings& settings);

/// Closed-form u0(x) for every initial type except "compatible".
std::function<double(double)> initial_profile(const RunSettings& settings);

InitialData build_initial(const RunSettings& settings, const Domain1D& domain,
                          const BoundaryKernel& kernel);
Problem build_problem(const RunSettings& settings);

}  // namespace memlab
