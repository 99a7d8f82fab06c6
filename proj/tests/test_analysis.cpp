#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "pcmc/analysis.hpp"
#include "pcmc/errors.hpp"
#include "pcmc/geometry.hpp"

using namespace pcmc;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> ringdown(double omega, double q, double amp, double phase,
                             double dt, int n) {
    const double alpha = omega / (2.0 * q);
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) {
        const double t = i * dt;
        s[i] = amp * std::exp(-alpha * t) * std::cos(omega * t + phase);
    }
    return s;
}

PermittivityGrid vacuum_grid(int nx, int ny, int nz) {
    PermittivityGrid g;
    g.eps = Array3<float>(nx, ny, nz);
    g.eps.fill(1.0f);
    g.eps_max = 1.0;
    g.z_mid = nz / 2.0;
    return g;
}

} // namespace

TEST_CASE("single synthetic resonance within 1%") {
    const double omega = 0.0933, q = 2078.0, dt = 0.29;
    const auto sig = ringdown(omega, q, 1.0, 0.3, dt, 14000);
    const auto modes = extract_resonances(sig, dt, 0.06, 0.13);
    REQUIRE(!modes.empty());
    CHECK(modes[0].omega == doctest::Approx(omega).epsilon(1e-3));
    CHECK(modes[0].q == doctest::Approx(q).epsilon(0.01));
}

TEST_CASE("high-Q synthetic resonance within 1%") {
    const double omega = 0.12, q = 30000.0, dt = 0.25;
    const auto sig = ringdown(omega, q, 1.0, -1.1, dt, 20000);
    const auto modes = extract_resonances(sig, dt, 0.09, 0.15);
    REQUIRE(!modes.empty());
    CHECK(modes[0].omega == doctest::Approx(omega).epsilon(1e-3));
    CHECK(modes[0].q == doctest::Approx(q).epsilon(0.01));
}

TEST_CASE("two close modes resolved within 5%") {
    const double w1 = 0.100, w2 = 0.103, dt = 0.3;
    auto sig = ringdown(w1, 3000.0, 1.0, 0.0, dt, 16000);
    const auto s2 = ringdown(w2, 1500.0, 0.5, 1.0, dt, 16000);
    for (std::size_t i = 0; i < sig.size(); ++i) sig[i] += s2[i];

    auto modes = extract_resonances(sig, dt, 0.08, 0.12);
    REQUIRE(modes.size() >= 2);
    // sorted by amplitude: strongest first
    CHECK(modes[0].omega == doctest::Approx(w1).epsilon(2e-3));
    CHECK(modes[0].q == doctest::Approx(3000.0).epsilon(0.05));
    CHECK(modes[1].omega == doctest::Approx(w2).epsilon(2e-3));
    CHECK(modes[1].q == doctest::Approx(1500.0).epsilon(0.05));
}

TEST_CASE("zero signal raises AnalysisError") {
    const std::vector<double> zeros(5000, 0.0);
    CHECK_THROWS_AS(extract_resonances(zeros, 0.3, 0.08, 0.12), AnalysisError);
}

TEST_CASE("energy-decay Q matches the synthetic slope") {
    const double omega = 0.1, q = 5000.0, dt = 0.3;
    std::vector<double> w(8000);
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = 2.5 * std::exp(-omega * (i * dt) / q);
    CHECK(q_from_energy_decay(w, dt, omega, 100, 7900) ==
          doctest::Approx(q).epsilon(1e-6));
}

TEST_CASE("Q splitting satisfies the parallel-sum identity") {
    const QSplit qs = split_q(0.1, 50.0, 2e-4, 5e-4);
    CHECK(qs.q_perp == doctest::Approx(0.1 * 50.0 / 2e-4));
    CHECK(qs.q_par == doctest::Approx(0.1 * 50.0 / 5e-4));
    CHECK(1.0 / qs.q_total ==
          doctest::Approx(1.0 / qs.q_perp + 1.0 / qs.q_par));
    CHECK(!qs.flagged);
    CHECK(split_q(0.1, 50.0, -1e-5, 5e-4).flagged);
}

TEST_CASE("mode volume of a uniform-field box equals the box volume") {
    const int n = 24;
    PermittivityGrid g = vacuum_grid(n, n, n);
    Array3<std::complex<double>> ex(n, n + 1, n + 1), ey(n + 1, n, n + 1),
        ez(n + 1, n + 1, n);
    // field filling the whole grid: V is the full volume, exactly
    ex.fill({2.0, -1.0});
    const ModeVolume full = mode_volume(ex, ey, ez, g, 2.0, false);
    CHECK(full.v_cells == doctest::Approx(double(n) * n * n).epsilon(1e-9));
    CHECK(full.v_norm == doctest::Approx(double(n) * n * n).epsilon(1e-9));

    // uniform Ex on a box of samples; the cell-center average adds a
    // half-weight rind where the samples end, so the support integrates to
    // 10 x 13 x 9 cells
    ex.fill({0.0, 0.0});
    for (int i = 4; i < 14; ++i)
        for (int j = 4; j <= 16; ++j)
            for (int k = 4; k <= 12; ++k) ex(i, j, k) = {1.0, 0.0};

    const ModeVolume mv = mode_volume(ex, ey, ez, g, 2.0, false);
    CHECK(mv.v_cells == doctest::Approx(10.0 * 13.0 * 9.0).epsilon(1e-6));
    CHECK(mv.v_norm == doctest::Approx(10.0 * 13.0 * 9.0).epsilon(1e-6));
    CHECK(mv.argmax[0] >= 4);
    CHECK(mv.argmax[0] < 14);
}

TEST_CASE("mode volume and critical numbers are scale invariant") {
    const int n = 16;
    PermittivityGrid g = vacuum_grid(n, n, n);
    Array3<std::complex<double>> ex(n, n + 1, n + 1), ey(n + 1, n, n + 1),
        ez(n + 1, n + 1, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k)
                ex(i, j, k) = {std::sin(0.3 * i) * std::cos(0.2 * j),
                               0.1 * k};

    const ModeVolume mv1 = mode_volume(ex, ey, ez, g, 5.0, false);
    const double ratio1 = field_ratio_at(ex, ey, ez, g, {8, 8, 8});

    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k) ex(i, j, k) *= 7.25;
    const ModeVolume mv2 = mode_volume(ex, ey, ez, g, 5.0, false);
    const double ratio2 = field_ratio_at(ex, ey, ez, g, {8, 8, 8});

    CHECK(mv1.v_norm == doctest::Approx(mv2.v_norm).epsilon(1e-12));
    CHECK(ratio1 == doctest::Approx(ratio2).epsilon(1e-12));

    const CqedFigures f1 = cqed_figures(5000.0, mv1.v_norm, ratio1,
                                        kTwoPi * 2.6e6, 852e-9);
    const CqedFigures f2 = cqed_figures(5000.0, mv2.v_norm, ratio2,
                                        kTwoPi * 2.6e6, 852e-9);
    CHECK(f1.n0 == doctest::Approx(f2.n0).epsilon(1e-12));
    CHECK(f1.m0 == doctest::Approx(f2.m0).epsilon(1e-12));
}

TEST_CASE("trivial-substitution cavity QED identities") {
    const double gamma = kTwoPi * 2.6e6;
    const double lambda = 852e-9;
    const double c0 = 299792458.0;
    const double omega0 = kTwoPi * c0 / lambda;

    // choose Q so that kappa = gamma, and V_mode = V0 with field ratio 1 so
    // that g = gamma
    const double q = omega0 / (4.0 * std::numbers::pi * gamma);
    const double v0 = c0 * lambda * lambda / (8.0 * std::numbers::pi * gamma);
    const double v_norm = v0 / std::pow(lambda / 2.0, 3);

    const CqedFigures f = cqed_figures(q, v_norm, 1.0, gamma, lambda);
    CHECK(f.kappa == doctest::Approx(gamma).epsilon(1e-12));
    CHECK(f.g0 == doctest::Approx(gamma).epsilon(1e-12));
    CHECK(f.n0 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.m0 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(!f.strong_coupling);

    // atom at a field null: flagged, no crash
    const CqedFigures z = cqed_figures(q, v_norm, 0.0, gamma, lambda);
    CHECK(z.zero_field);
    CHECK(!z.strong_coupling);
}

TEST_CASE("sqrt-eps weighting differs inside dielectric only") {
    const int n = 8;
    PermittivityGrid g = vacuum_grid(n, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) g.eps(i, j, k) = (i < 4) ? 11.56f : 1.0f;
    g.eps_max = 11.56;
    Array3<std::complex<double>> ex(n, n + 1, n + 1), ey(n + 1, n, n + 1),
        ez(n + 1, n + 1, n);
    ex.fill({1.0, 0.0});

    const double in_air_eps =
        field_ratio_at(ex, ey, ez, g, {6, 4, 4}, CouplingWeight::EpsAsPrinted);
    const double in_air_sqrt =
        field_ratio_at(ex, ey, ez, g, {6, 4, 4}, CouplingWeight::SqrtEps);
    // uniform |E|: eps weighting penalizes the air site harder
    CHECK(in_air_eps == doctest::Approx(1.0 / 11.56).epsilon(1e-6));
    CHECK(in_air_sqrt == doctest::Approx(1.0 / std::sqrt(11.56)).epsilon(1e-6));
}
