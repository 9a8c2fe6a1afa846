#include "memlab/io.hpp"

#include <cmath>
#include <sstream>

namespace memlab {

using nlohmann::json;

namespace {

// JSON has no infinities; spell them out.
json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

json stats_json(const FieldStats& s) {
    return {{"min", num(s.min)},
            {"max", num(s.max)},
            {"at_min", {{"x", s.x_at_min}, {"t", s.t_at_min}}},
            {"at_max", {{"x", s.x_at_max}, {"t", s.t_at_max}}},
            {"magnitude", num(s.magnitude)},
            {"tolerance", num(s.tolerance)}};
}

}  // namespace

json params_json(const ModelParams& p) {
    return {{"a", p.a}, {"b", p.b}, {"p", p.p}, {"q", p.q}, {"m", p.m}, {"l", p.l}};
}

json to_json(const ResidualReport& r) {
    return {{"schema_version", kSchemaVersion},
            {"candidate", r.candidate},
            {"verdict", std::string(to_string(r.verdict))},
            {"relative_tolerance", r.relative_tolerance},
            {"check_nodes", r.x.size()},
            {"check_times", r.t.size()},
            {"window", {r.t.front(), r.t.back()}},
            {"interior", stats_json(r.interior_stats)},
            {"boundary", stats_json(r.boundary_stats)},
            {"initial", stats_json(r.initial_stats)}};
}

json to_json(const OrderingReport& r) {
    json rows = json::array();
    for (const Violation& v : r.violations) {
        rows.push_back({{"x", v.x}, {"t", v.t}, {"lower", v.lower}, {"upper", v.upper}});
    }
    return {{"schema_version", kSchemaVersion},
            {"ordered", r.ordered},
            {"points_checked", r.points_checked},
            {"violation_count", r.violation_count},
            {"max_excess", num(r.max_excess)},
            {"proviso_required", r.proviso_required},
            {"proviso_witness", r.proviso_witness},
            {"violations", rows}};
}

json to_json(const GronwallReport& r) {
    json samples = json::array();
    for (const GronwallSample& s : r.samples) {
        samples.push_back({{"t", s.t}, {"lhs", s.lhs}, {"rhs", num(s.rhs)}});
    }
    return {{"schema_version", kSchemaVersion},
            {"constant", num(r.constant)},
            {"prefactor", num(r.prefactor)},
            {"min_margin", num(r.min_margin)},
            {"holds", r.holds},
            {"samples", samples}};
}

json to_json(const PositivityReport& r) {
    json first = r.first_nonpositive ? json(*r.first_nonpositive) : json(nullptr);
    return {{"schema_version", kSchemaVersion},
            {"hypothesis", r.hypothesis},
            {"positive", r.positive},
            {"min_value", num(r.min_positive_time)},
            {"first_nonpositive_time", first},
            {"t", r.t},
            {"min_per_snapshot", r.min_value}};
}

json to_json(const SubSuperSpec& s) {
    json j = {{"kind", std::string(to_string(s.kind))},
              {"name", s.name},
              {"window", {s.window.start, s.window.end}}};
    switch (s.kind) {
        case SpecKind::exp_super:
            j["C"] = s.exp_super.C;
            j["s"] = s.exp_super.s;
            j["alpha"] = s.exp_super.alpha;
            j["T_valid"] = s.exp_super.T_valid;
            j["K"] = s.exp_super.K;
            break;
        case SpecKind::tgamma_sub:
            j["gamma"] = s.tgamma.gamma;
            j["gamma_bound"] = s.tgamma.bound;
            j["tau_valid"] = s.tgamma.tau_valid;
            break;
        case SpecKind::boundary_layer_sub:
            j["A"] = s.boundary_layer.A;
            j["xi0"] = s.boundary_layer.xi0;
            j["alpha"] = s.boundary_layer.alpha;
            j["beta"] = s.boundary_layer.beta;
            j["t0"] = s.boundary_layer.t0;
            j["T0"] = s.boundary_layer.T0;
            break;
        case SpecKind::constant_sub:
            j["eps1"] = s.constant.eps1;
            j["eps"] = s.constant.eps;
            j["tau"] = s.constant.tau;
            j["T0"] = s.constant.T0;
            break;
        case SpecKind::numeric:
            break;
    }
    return j;
}

json to_json(const PicardResult& r) {
    json inc = json::array();
    for (double v : r.increments) inc.push_back(num(v));
    return {{"schema_version", kSchemaVersion},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"clamp_events", r.clamp_events},
            {"increments", inc}};
}

json to_json(const SweepResult& r) {
    json rungs = json::array();
    for (std::size_t j = 0; j < r.runs.size(); ++j) {
        const Trajectory& t = r.runs[j];
        double sup = 0.0;
        for (const Snapshot& s : t.snapshots()) {
            for (double v : s.u) sup = std::max(sup, v);
        }
        rungs.push_back({{"epsilon", r.ladder[j]},
                         {"sup", sup},
                         {"clamp_events", t.counters().clamp_events},
                         {"termination", std::string(to_string(t.termination()))}});
    }
    const MonotonicityReport& m = r.monotonicity;
    return {{"schema_version", kSchemaVersion},
            {"ladder", r.ladder},
            {"rungs", rungs},
            {"monotonicity",
             {{"monotone", m.monotone},
              {"max_excess", num(m.max_excess)},
              {"epsilon_small", m.epsilon_small},
              {"epsilon_large", m.epsilon_large},
              {"x", m.x},
              {"t", m.t}}},
            {"limit_tag", std::string(to_string(r.tag))},
            {"rate", r.rate},
            {"agreement", r.agreement},
            {"limit_sup", r.limit.u.empty() ? 0.0 : r.limit.max()}};
}

json to_json(const NonuniqReport& r) {
    json j = {{"schema_version", kSchemaVersion},
              {"branch", r.branch == NonuniqBranch::tgamma ? "tgamma" : "boundary"},
              {"zero_solution", to_json(r.zero_check)},
              {"sweep", to_json(r.sweep)},
              {"sup_limit", r.sup_limit},
              {"distinct", r.distinct},
              {"pass", r.pass}};
    if (!r.sweep.limit.u.empty()) {
        j["limit_final_profile"] = {{"t", r.sweep.limit.t.back()},
                                    {"x", r.sweep.limit.x},
                                    {"u", r.sweep.limit.u.back()}};
    }
    if (r.subsolution) j["subsolution"] = to_json(*r.subsolution);
    if (r.subsolution_check) j["subsolution_check"] = to_json(*r.subsolution_check);
    if (r.limit_dominates) j["limit_dominates"] = to_json(*r.limit_dominates);
    if (r.rung_dominates) j["rung_dominates"] = to_json(*r.rung_dominates);
    if (!r.search_failure.empty()) {
        j["search_failure"] = r.search_failure;
        const BoundaryLayerData& b = *r.least_violating;
        j["least_violating"] = {{"A", b.A},         {"xi0", b.xi0}, {"T0", b.T0},
                                {"alpha", b.alpha}, {"beta", b.beta}};
    }
    return j;
}

json to_json(const UniquenessReport& r) {
    return {{"schema_version", kSchemaVersion},
            {"hypothesis", r.hypothesis},
            {"delta0", r.delta0},
            {"divergence", r.divergence},
            {"ratio", r.ratio},
            {"M", r.M},
            {"identical", r.identical},
            {"within_envelope", r.within_envelope},
            {"envelope", to_json(r.envelope)}};
}

json to_json(const ConvergenceTable& t) {
    json rows = json::array();
    for (const ConvergenceRow& row : t.rows) {
        rows.push_back({{"nodes", row.level.nodes},
                        {"dt", row.level.dt},
                        {"error", row.error},
                        {"order", row.order ? json(*row.order) : json("undefined")}});
    }
    return {{"schema_version", kSchemaVersion}, {"reference", t.reference}, {"rows", rows}};
}

json to_json(const CompatibilityReport& r) {
    return {{"residual_left", r.residual_left},
            {"residual_right", r.residual_right},
            {"tolerance", r.tolerance},
            {"pass", r.pass}};
}

std::string verdict_line(const ResidualReport& r) {
    std::ostringstream os;
    os << r.candidate << ": " << to_string(r.verdict);
    const FieldStats* worst = &r.interior_stats;
    double worst_ratio = -1.0;
    for (const FieldStats* s : {&r.interior_stats, &r.boundary_stats, &r.initial_stats}) {
        const double size = std::max(std::abs(s->min), std::abs(s->max));
        const double ratio = s->tolerance > 0.0 ? size / s->tolerance : size;
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst = s;
        }
    }
    const bool low = std::abs(worst->min) >= std::abs(worst->max);
    os << " | worst residual " << (low ? worst->min : worst->max) << " at x = "
       << (low ? worst->x_at_min : worst->x_at_max) << ", t = "
       << (low ? worst->t_at_min : worst->t_at_max) << " (tolerance " << worst->tolerance << ")";
    return os.str();
}

std::string verdict_line(const OrderingReport& r) {
    std::ostringstream os;
    os << (r.ordered ? "ordered" : "violated") << " | " << r.violation_count << " of "
       << r.points_checked << " points, max(lower - upper) = " << r.max_excess;
    if (!r.violations.empty()) {
        const Violation& v = r.violations.front();
        os << ", first at x = " << v.x << ", t = " << v.t;
    }
    return os.str();
}

}  // namespace memlab
