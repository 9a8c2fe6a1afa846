#include "memlab/analysis.hpp"
#include "memlab/error.hpp"
#include "memlab/problem.hpp"
#include "memlab/solver.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace memlab;

namespace {

Problem grid_problem(ModelParams prm, std::size_t nodes, BoundaryKernel k,
                     const std::function<double(double)>& u0) {
    Domain1D d(1.0, nodes);
    std::vector<double> v(nodes);
    for (std::size_t i = 0; i < nodes; ++i) v[i] = u0(d.node(i));
    return Problem{prm, d, std::move(k), InitialData(d, std::move(v))};
}

SubSuperSpec constant_spec(double c, double T) {
    SubSuperSpec s;
    s.name = "constant";
    s.window = {0.0, T};
    s.eval = [c](double, double) { return c; };
    s.memory_prefix = [](double) { return 0.0; };
    s.initial_reference = [c](double) { return c; };
    return s;
}

SolverConfig run_config(double dt, double T, std::size_t stride, double eps = 0.0) {
    SolverConfig c;
    c.dt = dt;
    c.t_final = T;
    c.snapshot_stride = stride;
    c.epsilon = eps;
    return c;
}

double bump(double x) {
    const double r = std::max(0.0, 1.0 - std::abs(x - 0.5) / 0.25);
    return 0.1 * r * r;
}

}  // namespace

TEST(CheckCandidate, ZeroIsASolution) {
    const Problem pr = grid_problem({1, 1, 1, 1, 1, 1}, 21, BoundaryKernel::zero(), [](double) { return 0.0; });
    const ResidualReport r =
        check_candidate(constant_spec(0.0, 1.0), pr, CheckGrid::uniform(21, 0.0, 1.0, 20));
    EXPECT_EQ(r.verdict, Verdict::solution);
    EXPECT_TRUE(r.is_subsolution());
    EXPECT_TRUE(r.is_supersolution());
    EXPECT_EQ(r.interior.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.boundary.cwiseAbs().maxCoeff(), 0.0);
}

TEST(CheckCandidate, WindowOutsideGrid) {
    const Problem pr = grid_problem({1, 1, 1, 1, 1, 1}, 11, BoundaryKernel::zero(), [](double) { return 0.0; });
    SubSuperSpec s = constant_spec(0.0, 1.0);
    s.window = {2.0, 3.0};
    try {
        check_candidate(s, pr, CheckGrid::uniform(11, 0.0, 1.0, 10));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::WindowEmpty);
    }
}

TEST(CheckCandidate, SolverTrajectoryResidualIsTruncationError) {
    // The check stencil lags the implicit scheme by one step, so a solver
    // trajectory leaves an O(dt) residual: quartering dt must quarter it.
    const ModelParams prm{1, 1, 1, 1, 1, 1};
    auto worst = [&](double dt) {
        const Problem pr = grid_problem(prm, 51, BoundaryKernel::zero(),
                                        [](double x) { return 1.0 + 0.5 * std::cos(M_PI * x); });
        const Trajectory t = solve(pr, run_config(dt, 0.05, 1));
        const ResidualReport r = check_candidate(numeric_spec(t), pr, CheckGrid::of(t));
        double w = 0.0;
        for (Eigen::Index j = 0; j < r.interior.cols(); ++j) {
            if (r.t[j + 1] >= 0.01) w = std::max(w, r.interior.col(j).cwiseAbs().maxCoeff());
        }
        return w;
    };
    const double coarse = worst(1e-4), fine = worst(2.5e-5);
    EXPECT_LT(coarse, 1e-2);
    EXPECT_NEAR(coarse / fine, 4.0, 0.5) << coarse << " " << fine;
}

TEST(CheckCandidate, ConstantAboveZeroDataIsASupersolutionOfDecay) {
    // u ≡ 1 with a = 0: u_t - u_xx + b u^m = b > 0, initial residual 1 - 0 > 0.
    const Problem pr = grid_problem({0, 1, 1, 1, 1, 1}, 11, BoundaryKernel::zero(), [](double) { return 0.0; });
    const ResidualReport r =
        check_candidate(constant_spec(1.0, 0.5), pr, CheckGrid::uniform(11, 0.0, 0.5, 10));
    EXPECT_EQ(r.verdict, Verdict::supersolution);
}

TEST(TGamma, ExponentExamples) {
    const SubSuperSpec s = build_tgamma_subsolution({1, 1, 0.2, 0.2, 0.8, 1});
    EXPECT_NEAR(s.tgamma.bound, 10.0 / 3.0, 1e-14);
    EXPECT_NEAR(s.tgamma.gamma, 4.0, 1e-14);
    const SubSuperSpec s2 = build_tgamma_subsolution({1, 1, 0.1, 0.1, 1.5, 1});
    EXPECT_NEAR(s2.tgamma.bound, 2.5, 1e-14);
    EXPECT_NEAR(s2.tgamma.gamma, 3.0, 1e-14);
}

TEST(TGamma, ValidityHorizon) {
    const SubSuperSpec s = build_tgamma_subsolution({1, 1, 0.2, 0.2, 0.8, 1});
    EXPECT_GT(s.tgamma.tau_valid, 1e-3);
    EXPECT_LT(s.tgamma.tau_valid, 1e-2);
    // 4 t^{0.4} + t^{0.6} against 0.9 / (γ q + 1) of the memory term
    auto lhs = [](double t) { return 4.0 * std::pow(t, 0.4) + std::pow(t, 0.6); };
    EXPECT_LE(lhs(1e-3), 1.0 / 1.8);
    EXPECT_GT(lhs(1e-2), 1.0 / 1.8);
    EXPECT_NEAR(lhs(s.tgamma.tau_valid), 0.9 / 1.8, 1e-9);
}

TEST(TGamma, RegimeMismatch) {
    try {
        build_tgamma_subsolution({1, 1, 0.5, 0.6, 0.8, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RegimeMismatch);
    }
}

TEST(TGamma, ResidualMatchesArithmeticOracle) {
    const ModelParams prm{1, 1, 0.2, 0.2, 0.8, 1};
    const Problem pr = grid_problem(prm, 21, BoundaryKernel::zero(), [](double) { return 0.0; });
    const SubSuperSpec s = build_tgamma_subsolution(prm);
    const ResidualReport r = check_candidate(s, pr, CheckGrid::uniform(21, 0.0, 1e-3, 200));
    EXPECT_EQ(r.verdict, Verdict::subsolution);
    EXPECT_LE(r.interior.maxCoeff(), 0.0);

    const double t = 1e-3;
    const double oracle = 4.0 * t * t * t - std::pow(t, 2.6) / 1.8 + std::pow(t, 3.2);
    EXPECT_NEAR(oracle, -4.55e-9, 0.01e-9);
    const Eigen::Index last = r.interior.cols() - 1;
    EXPECT_NEAR(r.t.back(), t, 1e-15);
    EXPECT_NEAR(r.interior(5, last), oracle, 1e-3 * std::abs(oracle));
}

TEST(ExpSuper, AlphaExample) {
    const ModelParams prm{1, 1, 0.2, 0.2, 1, 1};
    EXPECT_NEAR(exp_super_alpha(prm, 1.5, 1.0, 1.0), 5.0, 1e-14);
    EXPECT_NEAR(std::numbers::e * std::pow(1.5, -0.6) + 2.0, 4.1313, 1e-4);

    const Problem pr = grid_problem(prm, 21, BoundaryKernel::zero(), [](double) { return 1.5; });
    ExpSuperOptions opt;
    opt.C = 1.5;
    opt.s_min = 1.0;
    const SubSuperSpec s = build_exp_supersolution(pr, pr.initial, opt);
    EXPECT_EQ(s.exp_super.s, 1.0);
    EXPECT_NEAR(s.exp_super.alpha, 5.0, 1e-14);
    EXPECT_NEAR(s.exp_super.T_valid, 0.2, 1e-14);
    EXPECT_NEAR(s(0.0, 0.0), 1.5 * 1.25, 1e-14);
}

TEST(ExpSuper, PassesItsOwnCheck) {
    const ModelParams prm{1, 1, 1, 1, 1, 1};
    const BoundaryKernel k = BoundaryKernel::constant(0.1);
    const Domain1D d(1.0, 41);
    const InitialData u0 = make_compatible_initial(1.0, k, prm, d);
    const Problem pr{prm, d, k, u0};
    const InitialData u0e = build_epsilon_initial(u0, 0.01, k, prm);
    const SubSuperSpec s = build_exp_supersolution(pr, u0e);
    EXPECT_GE(s(0.3, 0.0), u0e.sup());
    const ResidualReport r = check_candidate(
        s, pr.with_initial(u0e), CheckGrid::uniform(101, 0.0, s.window.end, 100), 1e-4, 0.01);
    EXPECT_TRUE(r.is_supersolution());
    EXPECT_GE(r.initial_stats.min, 0.0);
}

TEST(ExpSuper, LargeKernelWithSuperlinearFluxFails) {
    const ModelParams prm{1, 1, 1, 1, 1, 3};
    const Problem pr = grid_problem(prm, 11, BoundaryKernel::constant(50.0), [](double) { return 1.0; });
    try {
        build_exp_supersolution(pr, pr.initial);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoSupersolution);
    }
}

TEST(ExpSuper, MonotoneScaling) {
    const ModelParams prm{1, 1, 1, 0.5, 1, 1};  // p + q > 1
    double prev = 0.0;
    for (double C : {1.0, 2.0, 4.0, 8.0}) {
        const double alpha = exp_super_alpha(prm, C, 1.0, 1.0);
        EXPECT_GE(alpha, prev);
        prev = alpha;
    }
    auto T_valid = [&](double alpha) {
        return std::min(1.0 / ((prm.p + prm.q) * alpha), 1.0 / alpha);
    };
    for (double alpha : {1.0, 2.0, 5.0}) EXPECT_GE(T_valid(alpha), T_valid(alpha * 1.5));
}

TEST(BoundaryLayer, Exponents) {
    const auto [alpha, beta] = boundary_layer_exponents({1, 1, 1, 1, 1, 0.5});
    EXPECT_EQ(alpha, 3.0);
    EXPECT_EQ(beta, 3.0);
    const auto [a2, b2] = boundary_layer_exponents({1, 1, 1, 1, 0.8, 0.5});
    EXPECT_NEAR(a2, 0.5 * (2.0 + 5.0), 1e-12);
    EXPECT_NEAR(b2, 0.5 * (2.0 + 10.0), 1e-12);
}

TEST(BoundaryLayer, ZeroKernelIsRejected) {
    try {
        build_boundary_layer_subsolution({1, 1, 1, 1, 1, 0.5}, BoundaryKernel::zero(), Domain1D(1.0, 41),
                                         0.0, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RegimeMismatch);
    }
}

TEST(BoundaryLayer, SearchOutcomeIsConsistent) {
    const ModelParams prm{1, 1, 1, 1, 1, 0.5};
    const BoundaryKernel k = BoundaryKernel::constant(1.0);
    const Domain1D d(1.0, 41);
    BoundaryLayerOptions opt;
    try {
        const SubSuperSpec s = build_boundary_layer_subsolution(prm, k, d, 0.0, 0.5, opt);
        const BoundaryLayerData& b = s.boundary_layer;
        EXPECT_EQ(b.alpha, 3.0);
        EXPECT_LE(b.T0, 0.04 + 1e-15);
        const double h = b.xi0 * std::sqrt(b.T0 / 40.0) / 6.0;
        const auto nodes = static_cast<std::size_t>(std::clamp(std::ceil(1.0 / h) + 1.0, 101.0, 4001.0));
        const Problem zero{prm, d, k, InitialData(d, std::vector<double>(d.nodes(), 0.0))};
        const ResidualReport r = check_candidate(s, zero, CheckGrid::uniform(nodes, 0.0, b.T0, 40));
        EXPECT_TRUE(r.is_subsolution());
        EXPECT_EQ(s(0.5, b.T0 * 0.5), 0.0);  // the layer never reaches the centre
        EXPECT_GT(s(0.0, b.T0), 0.0);
    } catch (const SearchFailed& e) {
        EXPECT_GT(e.best().A, 0.0);
        EXPECT_GT(e.violation(), 0.0);
    }
}

TEST(ConstantSub, Examples) {
    const ModelParams prm{1, 1, 0.2, 1, 0.8, 1};
    const SubSuperSpec s = build_constant_subsolution(0.1, 0.5, prm);
    EXPECT_NEAR(s.constant.eps1, std::pow(0.05, 1.0 / 0.6), 1e-15);
    EXPECT_NEAR(s.constant.eps1, 0.006786, 1e-6);
    EXPECT_EQ(s.window.start, 0.5);

    ModelParams big = prm;
    big.a = 100;
    EXPECT_EQ(build_constant_subsolution(0.1, 0.5, big).constant.eps1, 0.1);
    EXPECT_LT(build_constant_subsolution(1e-6, 0.5, prm).constant.eps1, 1e-6 * 1.0000001);
    EXPECT_THROW(build_constant_subsolution(0.1, 0.5, {1, 1, 0.9, 1, 0.8, 1}), Error);
}

TEST(Compare, ZeroBelowTrajectory) {
    const Problem pr = grid_problem({1, 1, 1, 1, 1, 1}, 21, BoundaryKernel::zero(),
                                    [](double x) { return 0.5 + 0.2 * std::cos(M_PI * x); });
    const Trajectory t = solve(pr, run_config(1e-3, 0.5, 10));
    const OrderingReport r = compare(constant_spec(0.0, 0.5), numeric_spec(t), pr.params,
                                     pr.domain.node_positions(), t.times(), 1e-6);
    EXPECT_TRUE(r.ordered);
    EXPECT_EQ(r.violation_count, 0u);
    EXPECT_FALSE(r.proviso_required);
}

TEST(Compare, OrderedSolverRuns) {
    const ModelParams prm{1, 1, 1, 1, 1, 1};
    const Problem lo = grid_problem(prm, 41, BoundaryKernel::zero(), [](double) { return 0.5; });
    const Problem hi = grid_problem(prm, 41, BoundaryKernel::zero(), [](double) { return 1.0; });
    const Trajectory a = solve(lo, run_config(1e-4, 0.5, 100));
    const Trajectory b = solve(hi, run_config(1e-4, 0.5, 100));
    const std::vector<double> x = lo.domain.node_positions();
    const OrderingReport r = compare(numeric_spec(a), numeric_spec(b), prm, x, a.times(), 1e-6);
    EXPECT_TRUE(r.ordered);
    EXPECT_EQ(r.violation_count, 0u);
    EXPECT_GT(r.points_checked, 0u);
    const OrderingReport swapped = compare(numeric_spec(b), numeric_spec(a), prm, x, a.times(), 1e-6);
    EXPECT_FALSE(swapped.ordered);
    EXPECT_GT(swapped.violation_count, 0u);
    EXPECT_FALSE(swapped.violations.empty());
    // reflexive
    EXPECT_TRUE(compare(numeric_spec(a), numeric_spec(a), prm, x, a.times(), 0.0).ordered);
}

TEST(Compare, TGammaBelowRegularizedSolve) {
    const ModelParams prm{1, 1, 0.2, 0.2, 0.8, 1};
    const Problem pr = grid_problem(prm, 21, BoundaryKernel::zero(), [](double) { return 0.0; });
    const InitialData u0e = build_epsilon_initial(pr.initial, 1e-3, pr.kernel, prm);
    const Trajectory t = solve(pr.with_initial(u0e), run_config(1e-5, 5e-3, 10, 1e-3));
    const SubSuperSpec sub = build_tgamma_subsolution(prm);
    const OrderingReport r =
        compare(sub, numeric_spec(t), prm, pr.domain.node_positions(), t.times(), 1e-9);
    EXPECT_TRUE(r.proviso_required);
    EXPECT_TRUE(r.ordered);
}

TEST(Compare, ProvisoUnmet) {
    const ModelParams prm{1, 1, 0.5, 1, 1, 1};
    try {
        compare(constant_spec(0.0, 1.0), constant_spec(0.0, 1.0), prm, {0.0, 0.5, 1.0}, {0.0, 0.5}, 1e-6);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HypothesisUnmet);
    }
}

TEST(Gronwall, ZeroSeriesHolds) {
    const Domain1D d(1.0, 11);
    const GronwallReport r =
        gronwall_bound({0.0, 0.5, 1.0}, {0.0, 0.0, 0.0}, 1.0, {1, 1, 1, 1, 1, 1}, 0.0, 1.0, d);
    EXPECT_TRUE(r.holds);
    EXPECT_GE(r.min_margin, 0.0);
    // a(p+q)M^{p+q-1}T0 + l |∂Ω| M^l
    EXPECT_NEAR(r.constant, 2.0 + 2.0, 1e-14);
}

TEST(Gronwall, SyntheticViolationIsCaught) {
    const Domain1D d(1.0, 11);
    const ModelParams prm{1, 1, 1, 1, 1, 1};
    const std::vector<double> t{0.0, 0.5, 1.0};
    const std::vector<double> w{0.0, 1e-3, 2e-3};
    const GronwallReport ok = gronwall_bound(t, w, 1.0, prm, 1e-2, 1.0, d);
    EXPECT_TRUE(ok.holds);
    EXPECT_NEAR(ok.prefactor, 1e-2, 1e-15);
    std::vector<double> big = w;
    for (double& v : big) v *= 1e6;
    EXPECT_FALSE(gronwall_bound(t, big, 1.0, prm, 1e-2, 1.0, d).holds);
}

TEST(Gronwall, OrderedRunsHaveNoPositivePart) {
    const ModelParams prm{1, 1, 1, 1, 1, 1};
    const Problem lo = grid_problem(prm, 21, BoundaryKernel::zero(), [](double) { return 0.5; });
    const Problem hi = grid_problem(prm, 21, BoundaryKernel::zero(), [](double) { return 1.0; });
    const Trajectory a = solve(lo, run_config(1e-3, 0.5, 10));
    const Trajectory b = solve(hi, run_config(1e-3, 0.5, 10));
    const std::vector<double> w = positive_part_series(a, b);
    for (double v : w) EXPECT_EQ(v, 0.0);
    const std::vector<double> back = positive_part_series(b, a);
    EXPECT_NEAR(back.front(), 0.5, 1e-14);
}

TEST(Positivity, BumpBecomesStrictlyPositive) {
    const ModelParams prm{1, 1, 1, 1, 1, 1};
    const Problem pr = grid_problem(prm, 101, BoundaryKernel::zero(), bump);
    const Trajectory t = solve(pr, run_config(1e-4, 0.5, 100));
    const PositivityReport r = positivity_check(t, prm, pr.initial, 0.01);
    EXPECT_TRUE(r.positive);
    EXPECT_GT(r.min_positive_time, 0.0);
    EXPECT_FALSE(r.first_nonpositive.has_value());
    for (double tq : {0.01, 0.1, 0.5}) {
        const std::size_t j = t.index_of_time(tq);
        EXPECT_GT(*std::min_element(t.snapshot(j).u.begin(), t.snapshot(j).u.end()), 0.0);
    }
}

TEST(Positivity, ZeroDataFailsHypothesis) {
    const ModelParams prm{1, 1, 1, 1, 1, 1};
    const Problem pr = grid_problem(prm, 11, BoundaryKernel::zero(), [](double) { return 0.0; });
    const Trajectory t = solve(pr, run_config(1e-3, 0.1, 10));
    try {
        positivity_check(t, prm, pr.initial);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::HypothesisUnmet);
    }
    const PositivityReport scan = scan_positivity(t);
    EXPECT_FALSE(scan.positive);
    ASSERT_TRUE(scan.first_nonpositive.has_value());
}

TEST(Positivity, ConstantOneStaysPositive) {
    const ModelParams prm{2, 1, 1, 1, 1.5, 1};
    const Problem pr = grid_problem(prm, 11, BoundaryKernel::zero(), [](double) { return 1.0; });
    const Trajectory t = solve(pr, run_config(1e-3, 0.5, 10));
    EXPECT_TRUE(positivity_check(t, prm, pr.initial).positive);
}

TEST(GridFunction, InterpolatesTrajectory) {
    const Problem pr = grid_problem({0, 0, 1, 1, 1, 1}, 11, BoundaryKernel::zero(), [](double x) { return x; });
    const Trajectory t = solve(pr, run_config(0.01, 0.1, 5));
    const GridFunction g = to_grid_function(t);
    EXPECT_EQ(g.t.size(), t.size());
    EXPECT_NEAR(g.at(0.45, 0.0), 0.45, 1e-15);
    EXPECT_EQ(g.min(), 0.0);
}
