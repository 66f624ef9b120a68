#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "parvar/data/data_lab.hpp"
#include "parvar/error.hpp"
#include "parvar/pipeline.hpp"
#include "support/fixtures.hpp"

using namespace parvar;
using namespace parvar::testing;

namespace {

struct Subject {
    double a4, a5, a7, t0_hours, x3;
};

constexpr Subject k2D{0.16, 0.95, 5.6, 7, 1.0e6};

double sig_round(double v, int digits)
{
    if (v == 0) {
        return 0;
    }
    double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
    return std::round(v * scale) / scale;
}

} // namespace

TEST(ExactViral, InitialValue)
{
    auto j = exact_viral_solution(0.16, 0.95, 5.6, 0.3, 1.0e6, 0.3);
    EXPECT_DOUBLE_EQ(j[0], 1.0e6);
}

TEST(ExactViral, SubjectOneH)
{
    auto j = exact_viral_solution(0.0, 0.75, 6.9, 10.0 / 24, 4.1e6, 1.8594);
    EXPECT_EQ(sig_round(j[0], 5), 1.0251e6);
    EXPECT_NEAR(j[1], -1007.75, 0.5);
}

TEST(ExactViral, SubjectThreeD)
{
    auto j = exact_viral_solution(0.4, 0.99, 6.0, 5.0 / 24, 0.4e6, 6.1602);
    EXPECT_EQ(sig_round(j[0], 7), 434.9356);
    EXPECT_EQ(sig_round(j[1], 7), -172.1117);
    EXPECT_EQ(sig_round(j[2], 6), 68.1076);
}

TEST(ExactViral, DegenerateEigenvalues)
{
    // (a4 + a7)^2 = 4 a4 a5 a7 with a4 = a7 = 1, a5 = 1
    try {
        exact_viral_solution(1.0, 1.0, 1.0, 0.0, 1.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateEigenvalues);
    }
}

TEST(ExactViral, SatisfiesIOEquation)
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> T(0.5, 14.0);
    const auto& s = k2D;
    for (int i = 0; i < 20; ++i) {
        auto j = exact_viral_solution(s.a4, s.a5, s.a7, s.t0_hours / 24, s.x3, T(rng));
        double r = j[2] + (s.a4 + s.a7) * j[1] + s.a4 * s.a5 * s.a7 * j[0];
        EXPECT_LE(std::abs(r), 1e-8 * std::abs(j[0]));
    }
}

TEST(Integrate, MatchesExactViral)
{
    auto m = load_model(model_path("viral.model"));
    const auto& s = k2D;
    double a6 = 1.0;
    std::vector<double> params{s.a4, s.a5, a6, s.a7};
    double t0 = s.t0_hours / 24;
    std::vector<double> x0{s.a7 / a6 * s.x3, s.x3};
    std::vector<double> grid{t0, 1.8594, 6.1602, 14.0};
    auto tr = integrate_model(m, params, x0, grid);
    EXPECT_TRUE(tr.converged);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double want = exact_viral_solution(s.a4, s.a5, s.a7, t0, s.x3, grid[i])[0];
        EXPECT_NEAR(tr.outputs[i], want, 1e-6 * std::abs(want));
    }
}

TEST(Integrate, ConvergenceOrderIsFour)
{
    auto m = load_model(model_path("viral.model"));
    const auto& s = k2D;
    std::vector<double> params{s.a4, s.a5, 1.0, s.a7};
    double t0 = s.t0_hours / 24;
    std::vector<double> x0{s.a7 * s.x3, s.x3};
    std::vector<double> grid{t0, 3.0};
    double want = exact_viral_solution(s.a4, s.a5, s.a7, t0, s.x3, 3.0)[0];
    double e1 = std::abs(integrate_fixed_step(m, params, x0, grid, 20).outputs[1] - want);
    double e2 = std::abs(integrate_fixed_step(m, params, x0, grid, 40).outputs[1] - want);
    double order = std::log2(e1 / e2);
    EXPECT_GE(order, 3.5);
    EXPECT_LE(order, 4.5);
}

TEST(Integrate, ConstantTrajectory)
{
    auto m = parse_model("states: x\noutput: y\nparams: a\ndx/dt = 0*a\ny = x\n");
    std::vector<double> params{2.0};
    std::vector<double> x0{3.5};
    std::vector<double> grid{0.0, 1.0, 2.0};
    auto tr = integrate_model(m, params, x0, grid);
    for (double v : tr.outputs) {
        EXPECT_DOUBLE_EQ(v, 3.5);
    }
}

TEST(Integrate, BlowUp)
{
    auto m = parse_model("states: x\noutput: y\nparams: a\ndx/dt = a*x^2\ny = x\n");
    std::vector<double> params{1.0};
    std::vector<double> x0{1.0};
    std::vector<double> grid{0.0, 2.0};
    try {
        integrate_model(m, params, x0, grid);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BlowUp);
    }
}

TEST(Integrate, LotkaVolterraApproachesEquilibrium)
{
    auto m = load_model(model_path("lv.model"));
    std::vector<double> params{1, 0.5, 5, 1, 0.2, 2.4};
    std::vector<double> x0{1, 2};
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) {
        grid.push_back(0.25 * i);
    }
    auto tr = integrate_model(m, params, x0, grid);
    EXPECT_TRUE(tr.converged);
    for (double v : tr.outputs) {
        EXPECT_TRUE(std::isfinite(v) && v > 0);
    }
    EXPECT_LT(std::abs(tr.outputs[40] - tr.outputs[39]), std::abs(tr.outputs[1] - tr.outputs[0]));
}

TEST(JetMap, ViralTableTwo)
{
    auto m = load_model(model_path("viral.model"));
    const auto& s = k2D;
    std::vector<double> params{s.a4, s.a5, 1.0, s.a7};
    double t0 = s.t0_hours / 24;
    std::vector<double> x0{s.a7 * s.x3, s.x3};
    std::vector<double> grid{t0, 1.8594};
    auto tr = integrate_model(m, params, x0, grid);
    auto j = jet_at(m, params, tr.states[1], {}, 1.8594, 2);
    EXPECT_EQ(sig_round(j.y[0], 5), 4.1781e4);
    EXPECT_EQ(sig_round(j.y[1], 4), -7127);
    EXPECT_EQ(sig_round(j.y[2], 4), 5485);
}

TEST(JetMap, ConstantStateHasZeroJets)
{
    auto m = parse_model("states: x\noutput: y\nparams: a\ndx/dt = 0*a\ny = x\n");
    std::vector<double> params{1.0};
    std::vector<double> state{4.0};
    auto j = jet_at(m, params, state, {}, 0.0, 3);
    EXPECT_EQ(j.y, (std::vector<double>{4.0, 0.0, 0.0, 0.0}));
}

TEST(JetMap, InputOrderMismatch)
{
    auto m = load_model(model_path("competition_input.model"));
    std::vector<double> params{1.0, 2.0, 0.5};
    std::vector<double> state{0.3};
    std::vector<std::vector<double>> u{{1.0}};
    try {
        jet_at(m, params, state, u, 0.0, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::JetOrderMismatch);
    }
}

TEST(CentralDifference, Sine)
{
    std::vector<double> t;
    std::vector<double> v;
    for (int i = 0; i <= 2000; ++i) {
        t.push_back(1e-3 * i);
        v.push_back(std::sin(t.back()));
    }
    auto fd = central_difference(t, v, 2);
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        EXPECT_NEAR(fd.jets[i][1], std::cos(t[i]), 1e-6);
        EXPECT_FALSE(fd.one_sided[i]);
    }
    EXPECT_TRUE(fd.one_sided.front());
    EXPECT_TRUE(fd.one_sided.back());
}

TEST(CentralDifference, LinearSeries)
{
    std::vector<double> t;
    std::vector<double> v;
    for (int i = 0; i < 12; ++i) {
        t.push_back(0.5 * i);
        v.push_back(3.0 - 2.0 * t.back());
    }
    auto fd = central_difference(t, v, 2);
    for (const auto& j : fd.jets) {
        EXPECT_NEAR(j[1], -2.0, 1e-10);
        EXPECT_NEAR(j[2], 0.0, 1e-9);
    }
}

TEST(CentralDifference, TooFewPoints)
{
    std::vector<double> t{0.0, 1.0};
    std::vector<double> v{0.0, 1.0};
    try {
        central_difference(t, v, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
    }
}

TEST(CentralDifference, ViralSecondOrderAgreement)
{
    auto m = load_model(model_path("viral.model"));
    const auto& s = k2D;
    std::vector<double> params{s.a4, s.a5, 1.0, s.a7};
    std::vector<double> x0{s.a7 * s.x3, s.x3};
    auto error_at = [&](double h) {
        std::vector<double> grid;
        for (int i = -3; i <= 3; ++i) {
            grid.push_back(2.0 + h * i);
        }
        grid.insert(grid.begin(), 0.5);
        auto tr = integrate_model(m, params, x0, grid);
        std::vector<double> t(grid.begin() + 1, grid.end());
        std::vector<double> y(tr.outputs.begin() + 1, tr.outputs.end());
        auto fd = central_difference(t, y, 2);
        auto j = jet_at(m, params, tr.states[4], {}, 2.0, 2);
        return std::abs(fd.jets[3][1] - j.y[1]) / std::abs(j.y[1]);
    };
    double e1 = error_at(0.02);
    double e2 = error_at(0.01);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.3);
}

TEST(SteadyState, ReducedViralEquilibrium)
{
    // with a5 = 0 the infected-cell equation is at rest when x1 = a4 a7 / (a3 a6)
    auto m = parse_model("states: x1, x2, x3\noutput: y\nparams: a1, a2, a3, a4, a5, a6, a7\n"
                         "dx1/dt = a1 - a2*x1 - a3*x1*x3\n"
                         "dx2/dt = a3*x1*x3 - a4*x2\n"
                         "dx3/dt = (1 - a5)*a6*x2 - a7*x3\n"
                         "y = x3\n");
    std::vector<double> a{1.0, 0.0, 2.0, 0.5, 0.0, 3.0, 1.5};
    double x1 = a[3] * a[6] / (a[2] * a[5]);
    std::vector<double> state{x1, 1.0, a[5] / a[6]};
    JetMap jm(m, 1);
    auto sj = jm.state_jets(a, state, {});
    EXPECT_NEAR(sj[1][1], 0.0, 1e-12);
    EXPECT_NEAR(sj[2][1], 0.0, 1e-12);
}

TEST(PseudoData, MethodsAgree)
{
    auto m = load_model(model_path("viral.model"));
    const auto& s = k2D;
    GenerationSpec spec;
    spec.params = {s.a4, s.a5, 1.0, s.a7};
    spec.x0 = {s.a7 * s.x3, s.x3};
    spec.t0 = s.t0_hours / 24;
    std::vector<double> times{1.8594, 6.1602};
    auto exact = generate_pseudo_data(m, {spec.params, spec.x0, spec.t0, {}, JetMethod::Exact}, times, 2);
    auto sym = generate_pseudo_data(m, spec, times, 2);
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (int k = 0; k <= 2; ++k) {
            EXPECT_NEAR(sym.y_jet[i][k], exact.y_jet[i][k], 1e-6 * std::abs(exact.y_jet[i][0]));
        }
    }
    EXPECT_EQ(sym.source[0], "symbolic_pushforward");
    EXPECT_EQ(exact.source[0], "exact_solution");
}
