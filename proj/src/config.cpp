#include "memlab/config.hpp"
#include "memlab/error.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace memlab {

namespace {

using Setter = std::function<void(RunSettings&, const std::string&, const std::filesystem::path&)>;

std::string trimmed(const std::string& s) { return boost::algorithm::trim_copy(s); }

[[noreturn]] void bad_value(const std::string& what, const std::string& value) {
    throw std::invalid_argument("bad value '" + value + "', expected " + what);
}

double as_double(const std::string& value) {
    try {
        return boost::lexical_cast<double>(trimmed(value));
    } catch (const boost::bad_lexical_cast&) {
        bad_value("a real number", value);
    }
}

std::size_t as_size(const std::string& value) {
    try {
        const long long v = boost::lexical_cast<long long>(trimmed(value));
        if (v < 0) bad_value("a count", value);
        return static_cast<std::size_t>(v);
    } catch (const boost::bad_lexical_cast&) {
        bad_value("a count", value);
    }
}

bool as_bool(const std::string& value) {
    const std::string v = boost::algorithm::to_lower_copy(trimmed(value));
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    bad_value("a flag", value);
}

std::vector<std::string> words(const std::string& value) {
    std::vector<std::string> out;
    std::string text = trimmed(value);
    boost::algorithm::split(out, text, boost::is_any_of(" ,\t"), boost::token_compress_on);
    out.erase(std::remove(out.begin(), out.end(), std::string{}), out.end());
    return out;
}

std::vector<double> as_list(const std::string& value) {
    std::vector<double> out;
    for (const std::string& w : words(value)) out.push_back(as_double(w));
    if (out.empty()) bad_value("a list of numbers", value);
    return out;
}

std::string one_of(const std::string& value, std::initializer_list<const char*> choices) {
    const std::string v = trimmed(value);
    for (const char* c : choices) {
        if (v == c) return v;
    }
    std::string allowed;
    for (const char* c : choices) allowed += std::string(allowed.empty() ? "" : "|") + c;
    bad_value(allowed, value);
}

std::vector<ConvergenceLevel> as_levels(const std::string& value) {
    std::vector<ConvergenceLevel> out;
    for (const std::string& w : words(value)) {
        const auto colon = w.find(':');
        if (colon == std::string::npos) bad_value("a level N:dt", w);
        out.push_back({as_size(w.substr(0, colon)), as_double(w.substr(colon + 1))});
    }
    if (out.empty()) bad_value("a list of levels", value);
    return out;
}

template <class T>
Setter real(T RunSettings::*section, double T::*field) {
    return [=](RunSettings& s, const std::string& v, const std::filesystem::path&) {
        s.*section.*field = as_double(v);
    };
}

#define MEMLAB_FIELD(member) [](RunSettings& s, const std::string& v, const std::filesystem::path&) { member; }

const std::vector<std::pair<std::string, Setter>>& registry() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"params.a", real(&RunSettings::params, &ModelParams::a)},
        {"params.b", real(&RunSettings::params, &ModelParams::b)},
        {"params.p", real(&RunSettings::params, &ModelParams::p)},
        {"params.q", real(&RunSettings::params, &ModelParams::q)},
        {"params.m", real(&RunSettings::params, &ModelParams::m)},
        {"params.l", real(&RunSettings::params, &ModelParams::l)},
        {"domain.length", MEMLAB_FIELD(s.length = as_double(v))},
        {"domain.nodes", MEMLAB_FIELD(s.nodes = as_size(v))},
        {"kernel.type", MEMLAB_FIELD(s.kernel.type = one_of(v, {"zero", "constant", "separable", "table"}))},
        {"kernel.kappa", MEMLAB_FIELD(s.kernel.kappa = as_double(v))},
        {"kernel.phi", MEMLAB_FIELD(s.kernel.phi = as_list(v))},
        {"kernel.eta", MEMLAB_FIELD(s.kernel.eta = as_list(v))},
        {"kernel.table",
         [](RunSettings& s, const std::string& v, const std::filesystem::path& base) {
             std::filesystem::path p = trimmed(v);
             s.kernel.table = p.is_relative() && !base.empty() ? base / p : p;
         }},
        {"initial.type",
         MEMLAB_FIELD(s.initial.type = one_of(v, {"constant", "compatible", "cosine", "bump", "zero"}))},
        {"initial.level", MEMLAB_FIELD(s.initial.level = as_double(v))},
        {"initial.amplitude", MEMLAB_FIELD(s.initial.amplitude = as_double(v))},
        {"initial.center", MEMLAB_FIELD(s.initial.center = as_double(v))},
        {"initial.width", MEMLAB_FIELD(s.initial.width = as_double(v))},
        {"initial.compatible", MEMLAB_FIELD(s.initial.compatible = one_of(v, {"auto", "true", "false"}))},
        {"solver.dt", MEMLAB_FIELD(s.solver.dt = as_double(v))},
        {"solver.t_final", MEMLAB_FIELD(s.solver.t_final = as_double(v))},
        {"solver.epsilon", MEMLAB_FIELD(s.solver.epsilon = as_double(v))},
        {"solver.clamp",
         MEMLAB_FIELD(s.solver.clamp = one_of(v, {"clamp_to_zero_and_count", "error_on_negative"}) ==
                                               "error_on_negative"
                                           ? ClampPolicy::error_on_negative
                                           : ClampPolicy::clamp_to_zero_and_count)},
        {"solver.snapshot_stride", MEMLAB_FIELD(s.solver.snapshot_stride = as_size(v))},
        {"solver.adaptive", MEMLAB_FIELD(s.solver.adaptive = as_bool(v))},
        {"solver.blowup_cap", MEMLAB_FIELD(s.solver.blowup_cap = as_double(v))},
        {"picard.space_nodes", MEMLAB_FIELD(s.picard.space_nodes = as_size(v))},
        {"picard.time_nodes", MEMLAB_FIELD(s.picard.time_nodes = as_size(v))},
        {"picard.t_final", MEMLAB_FIELD(s.picard.t_final = as_double(v))},
        {"picard.max_iterations", MEMLAB_FIELD(s.picard.max_iterations = as_size(v))},
        {"picard.tolerance", MEMLAB_FIELD(s.picard.tolerance = as_double(v))},
        {"picard.epsilon", MEMLAB_FIELD(s.picard.epsilon = as_double(v))},
        {"picard.stall_limit", MEMLAB_FIELD(s.picard.stall_limit = as_size(v))},
        {"picard.cross_check", MEMLAB_FIELD(s.picard_cross_check = as_bool(v))},
        {"sweep.ladder", MEMLAB_FIELD(s.ladder = as_list(v))},
        {"sweep.tolerance", MEMLAB_FIELD(s.sweep_tolerance = as_double(v))},
        {"compare.upper_shift", MEMLAB_FIELD(s.compare.upper_shift = as_double(v))},
        {"compare.tolerance", MEMLAB_FIELD(s.compare.tolerance = as_double(v))},
        {"compare.swap", MEMLAB_FIELD(s.compare.swap = as_bool(v))},
        {"unique.delta0", MEMLAB_FIELD(s.delta0 = as_double(v))},
        {"converge.levels", MEMLAB_FIELD(s.converge.levels = as_levels(v))},
        {"converge.exact", MEMLAB_FIELD(s.converge.exact = one_of(v, {"heat_mode", "ode", "none"}))},
        {"greens.samples", MEMLAB_FIELD(s.greens.samples = as_size(v))},
        {"greens.t_min", MEMLAB_FIELD(s.greens.t_min = as_double(v))},
        {"greens.t_max", MEMLAB_FIELD(s.greens.t_max = as_double(v))},
        {"greens.dump", MEMLAB_FIELD(s.greens.dump = as_bool(v))},
        {"greens.dump_nodes", MEMLAB_FIELD(s.greens.dump_nodes = as_size(v))},
        {"greens.dump_times", MEMLAB_FIELD(s.greens.dump_times = as_list(v))},
        {"verify.candidate",
         MEMLAB_FIELD(s.verify.candidate = one_of(v, {"solution", "zero", "exp_super", "tgamma",
                                                      "constant", "boundary_layer"}))},
        {"verify.tolerance", MEMLAB_FIELD(s.verify.tolerance = as_double(v))},
        {"verify.nodes", MEMLAB_FIELD(s.verify.nodes = as_size(v))},
        {"verify.intervals", MEMLAB_FIELD(s.verify.intervals = as_size(v))},
        {"verify.eps", MEMLAB_FIELD(s.verify.eps = as_double(v))},
        {"verify.tau", MEMLAB_FIELD(s.verify.tau = as_double(v))},
        {"verify.T0", MEMLAB_FIELD(s.verify.T0 = as_double(v))},
        {"verify.t_end", MEMLAB_FIELD(s.verify.t_end = as_double(v))},
        {"nonuniq.branch", MEMLAB_FIELD(s.nonuniq.branch = one_of(v, {"auto", "tgamma", "boundary"}))},
        {"nonuniq.dominance_horizon", MEMLAB_FIELD(s.nonuniq.dominance_horizon = as_double(v))},
        {"nonuniq.ordering_tolerance", MEMLAB_FIELD(s.nonuniq.ordering_tolerance = as_double(v))},
        {"nonuniq.check_tolerance", MEMLAB_FIELD(s.nonuniq.check_tolerance = as_double(v))},
    };
    return table;
}

#undef MEMLAB_FIELD

double polynomial(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

std::string describe_polynomial(const std::vector<double>& c) {
    std::ostringstream os;
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << c[i];
    return os.str();
}

RunSettings from_tree(const boost::property_tree::ptree& tree,
                      const std::vector<std::string>& overrides,
                      const std::filesystem::path& base_dir) {
    RunSettings settings;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw Error(ErrorCode::InvalidConfig, "key '" + section + "' outside any section");
        }
        for (const auto& [key, node] : body) {
            apply_setting(settings, section + "." + key, node.data(), base_dir);
        }
    }
    for (const std::string& o : overrides) apply_override(settings, o);
    return settings;
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [k, _] : registry()) out.push_back(k);
        return out;
    }();
    return keys;
}

void apply_setting(RunSettings& settings, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir) {
    for (const auto& [k, setter] : registry()) {
        if (k == key) {
            try {
                setter(settings, value, base_dir);
            } catch (const std::invalid_argument& e) {
                throw Error(ErrorCode::InvalidConfig, key + ": " + e.what());
            }
            return;
        }
    }
    throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
}

void apply_override(RunSettings& settings, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw Error(ErrorCode::InvalidConfig,
                    "override '" + assignment + "' is not of the form section.key=value");
    }
    apply_setting(settings, trimmed(assignment.substr(0, eq)), assignment.substr(eq + 1),
                  std::filesystem::current_path());
}

RunSettings load_settings(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return settings_from_string(buffer.str(), overrides, path.parent_path());
}

RunSettings settings_from_string(const std::string& text,
                                 const std::vector<std::string>& overrides,
                                 const std::filesystem::path& base_dir) {
    // The INI reader only knows ';' comments.
    std::istringstream lines(text);
    std::ostringstream cleaned;
    for (std::string line; std::getline(lines, line);) {
        const std::string t = trimmed(line);
        if (!t.empty() && t.front() == '#') continue;
        cleaned << line << '\n';
    }
    boost::property_tree::ptree tree;
    std::istringstream in(cleaned.str());
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    return from_tree(tree, overrides, base_dir);
}

BoundaryKernel read_kernel_table(const std::filesystem::path& path, double length) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidKernel, "cannot read kernel table " + path.string());
    std::map<std::pair<double, double>, double> cells[2];
    std::set<double> ys[2], ts[2];
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string t = trimmed(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<std::string> f;
        boost::algorithm::split(f, t, boost::is_any_of(","));
        if (f.size() != 4) {
            throw Error(ErrorCode::InvalidKernel,
                        path.string() + ":" + std::to_string(row) + ": expected 4 columns");
        }
        if (trimmed(f[0]) == "boundary") continue;  // header
        int side;
        const std::string b = trimmed(f[0]);
        if (b == "left" || b == "0") {
            side = 0;
        } else if (b == "right" || b == "L") {
            side = 1;
        } else {
            try {
                const double pos = boost::lexical_cast<double>(b);
                if (std::abs(pos - length) > 1e-12 * std::max(1.0, length)) throw 0;
                side = 1;
            } catch (...) {
                throw Error(ErrorCode::InvalidKernel, path.string() + ":" + std::to_string(row) +
                                                         ": boundary must be left|right|0|L");
            }
        }
        double y, tt, v;
        try {
            y = as_double(f[1]);
            tt = as_double(f[2]);
            v = as_double(f[3]);
        } catch (const std::invalid_argument&) {
            throw Error(ErrorCode::InvalidKernel,
                        path.string() + ":" + std::to_string(row) + ": malformed number");
        }
        cells[side][{tt, y}] = v;
        ys[side].insert(y);
        ts[side].insert(tt);
    }
    KernelTable tables[2];
    for (int side = 0; side < 2; ++side) {
        if (cells[side].empty()) {
            throw Error(ErrorCode::InvalidKernel, std::string("kernel table has no rows for the ") +
                                                      (side ? "right" : "left") + " boundary");
        }
        KernelTable& k = tables[side];
        k.y.assign(ys[side].begin(), ys[side].end());
        k.t.assign(ts[side].begin(), ts[side].end());
        for (double tt : k.t) {
            for (double y : k.y) {
                const auto it = cells[side].find({tt, y});
                if (it == cells[side].end()) {
                    throw Error(ErrorCode::InvalidKernel, "kernel table is not rectangular");
                }
                k.values.push_back(it->second);
            }
        }
    }
    return BoundaryKernel::tabulated(std::move(tables[0]), std::move(tables[1]));
}

BoundaryKernel build_kernel(const RunSettings& s) {
    const KernelSettings& k = s.kernel;
    if (k.type == "zero") return BoundaryKernel::zero();
    if (k.type == "constant") return BoundaryKernel::constant(k.kappa);
    if (k.type == "separable") {
        std::ostringstream d;
        d << "separable kappa=" << k.kappa << " phi=[" << describe_polynomial(k.phi) << "] eta=["
          << describe_polynomial(k.eta) << "]";
        return BoundaryKernel::separable(
            k.kappa, [c = k.phi](double y) { return polynomial(c, y); },
            [c = k.eta](double t) { return polynomial(c, t); }, d.str());
    }
    if (k.table.empty()) throw Error(ErrorCode::InvalidConfig, "kernel.table is required");
    return read_kernel_table(k.table, s.length);
}

std::function<double(double)> initial_profile(const RunSettings& s) {
    const InitialSettings in = s.initial;
    const double L = s.length;
    if (in.type == "constant") return [in](double) { return in.level; };
    if (in.type == "zero") return [](double) { return 0.0; };
    if (in.type == "cosine") {
        return [in, L](double x) {
            return in.level + in.amplitude * std::cos(std::numbers::pi * x / L);
        };
    }
    if (in.type == "bump") {
        return [in, L](double x) {
            const double r = std::max(0.0, 1.0 - std::abs(x - in.center * L) / (in.width * L));
            return in.amplitude * r * r;
        };
    }
    throw Error(ErrorCode::InvalidConfig, "initial type '" + in.type + "' has no closed-form profile");
}

InitialData build_initial(const RunSettings& s, const Domain1D& domain,
                          const BoundaryKernel& kernel) {
    const InitialSettings& in = s.initial;
    if (in.type == "compatible") {
        return make_compatible_initial(in.level, kernel, s.params, domain);
    }
    const auto profile = initial_profile(s);
    std::vector<double> u(domain.nodes());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = profile(domain.node(i));
    InitialData data(domain, std::move(u));
    if (in.compatible == "false") return data;
    if (in.compatible == "true" || !compatibility_residual(data, kernel, s.params, 1e-8).pass) {
        return shift_compatible(data, 0.0, kernel, s.params);
    }
    return data;
}

Problem build_problem(const RunSettings& s) {
    validate_numeric_params(s.params);
    Domain1D domain(s.length, s.nodes);
    BoundaryKernel kernel = build_kernel(s);
    InitialData initial = build_initial(s, domain, kernel);
    return Problem{s.params, domain, std::move(kernel), std::move(initial)};
}

}  // namespace memlab
