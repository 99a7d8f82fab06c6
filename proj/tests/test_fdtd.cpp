#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pcmc/analysis.hpp"
#include "pcmc/errors.hpp"
#include "pcmc/fdtd.hpp"
#include "pcmc/geometry.hpp"
#include "support.hpp"

using namespace pcmc;
using namespace pcmc::testing;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PermittivityGrid vacuum_grid(int nx, int ny, int nz) {
    PermittivityGrid g;
    g.eps = Array3<float>(nx, ny, nz);
    g.eps.fill(1.0f);
    g.eps_max = 1.0;
    g.z_mid = nz / 2.0;
    return g;
}

/// Long thin vacuum duct: PEC y faces and magnetic-mirror z faces support
/// a TEM wave (Ey, Hz) travelling along x with no transverse variation.
BoundarySpec duct_bounds(BcKind x_kind, int absorber = 10) {
    BoundarySpec bc;
    bc.set_face(Face::XLo, x_kind);
    bc.set_face(Face::XHi, x_kind);
    bc.set_face(Face::YLo, BcKind::Pec);
    bc.set_face(Face::YHi, BcKind::Pec);
    bc.set_face(Face::ZLo, BcKind::EvenMirror);
    bc.set_face(Face::ZHi, BcKind::EvenMirror);
    bc.absorber_thickness = absorber;
    return bc;
}

DipoleDrive sheet_drive(int i_plane, int ny, int nz, double omega,
                        double width) {
    DipoleDrive d;
    d.omega = omega;
    d.width = width;
    d.t_peak = 5.0 * width;
    for (int j = 0; j < ny; ++j)
        for (int k = 0; k <= nz; ++k)
            d.points.push_back({Component::Ey, i_plane, j, k, 1.0});
    return d;
}

} // namespace

TEST_CASE("empty grid stays identically zero") {
    const PermittivityGrid g = vacuum_grid(12, 10, 8);
    Simulation<float> sim(g, BoundarySpec::all_absorbing(4));
    auto f = sim.make_state();
    sim.run(f, 50);
    CHECK(f.max_abs_e() == 0.0);
    CHECK(f.step == 50);
}

TEST_CASE("vacuum pulse speed within 1% at 20 cells per wavelength") {
    // two-probe envelope delay at the full Courant step; at S = 0.5 the
    // axial group velocity is already 1.1% subluminal at this resolution
    const int nx = 460, ny = 4, nz = 4;
    const PermittivityGrid g = vacuum_grid(nx, ny, nz);
    Simulation<double> sim(g, duct_bounds(BcKind::Absorbing), 1.0);

    const double omega = kTwoPi / 20.0;
    sim.set_drive(sheet_drive(60, ny, nz, omega, 50.0));

    PointProbe<double> p1(Component::Ey, 160, 2, 2);
    PointProbe<double> p2(Component::Ey, 360, 2, 2);
    sim.add_monitor(&p1);
    sim.add_monitor(&p2);
    auto f = sim.make_state();
    sim.run(f, static_cast<long>(std::ceil(1000.0 / sim.dt())));

    std::vector<double> s1(p1.series.begin(), p1.series.end());
    std::vector<double> s2(p2.series.begin(), p2.series.end());
    const double dt_peaks = envelope_peak_time(s2, sim.dt(), omega) -
                            envelope_peak_time(s1, sim.dt(), omega);
    const double speed = 200.0 / dt_peaks;
    CHECK(std::abs(speed - 1.0) < 0.01);
}

TEST_CASE("graded absorber reflects below -40 dB in power") {
    const int nx = 800, ny = 4, nz = 4;
    const PermittivityGrid g = vacuum_grid(nx, ny, nz);
    Simulation<double> sim(g, duct_bounds(BcKind::Absorbing));

    const double omega = kTwoPi / 20.0;
    sim.set_drive(sheet_drive(100, ny, nz, omega, 30.0));
    PointProbe<double> probe(Component::Ey, 450, 2, 2);
    sim.add_monitor(&probe);
    auto f = sim.make_state();
    // long enough for the round trip 450 -> 800 -> 450
    sim.run(f, static_cast<long>(std::ceil(1500.0 / sim.dt())));

    std::vector<double> sig(probe.series.begin(), probe.series.end());
    // incident pass: t in [250, 550]; reflected: t in [950, 1350]
    const auto idx = [&](double t) {
        return static_cast<std::size_t>(t / sim.dt());
    };
    const double inc = envelope_max(sig, idx(250.0), idx(550.0));
    const double refl = envelope_max(sig, idx(950.0), idx(1350.0));
    REQUIRE(inc > 0.0);
    const double power_db = 20.0 * std::log10(refl / inc);
    CHECK(power_db < -40.0);
}

TEST_CASE("closed PEC box conserves the discrete energy to 1e-6 per 1000 steps") {
    const int n = 20;
    PermittivityGrid g = vacuum_grid(n, n, n);
    // a dielectric blob keeps the test honest about eps handling
    for (int i = 6; i < 12; ++i)
        for (int j = 5; j < 13; ++j)
            for (int k = 7; k < 11; ++k) g.eps(i, j, k) = 4.0f;
    g.eps_max = 4.0;

    Simulation<double> sim(g, BoundarySpec::closed_box());
    auto f = sim.make_state();
    SourceSpec src = excite_dipole_mode(Component::Ex, Parity::Even,
                                        Parity::Even);
    sim.apply_source(f, src);

    ConservedEnergyMonitor<double> energy;
    sim.add_monitor(&energy);
    sim.run(f, 1001);

    REQUIRE(energy.series.size() >= 1000);
    const double w0 = energy.series[2];
    REQUIRE(w0 > 0.0);
    double max_drift = 0.0;
    for (std::size_t i = 2; i < energy.series.size(); ++i)
        max_drift =
            std::max(max_drift, std::abs(energy.series[i] - w0) / w0);
    CHECK(max_drift < 1e-6);
}

TEST_CASE("even-parity drive leaks no energy into the odd sector") {
    const int n = 40, nz = 20;
    const PermittivityGrid g = vacuum_grid(n, n, nz);
    BoundarySpec bc = BoundarySpec::half_space_te(6);
    Simulation<double> sim(g, bc);

    DipoleDrive drive;
    drive.omega = kTwoPi / 15.0;
    drive.width = 20.0;
    drive.t_peak = 60.0;
    drive.points = dipole_injections(n, n, 0, Component::Ex, Parity::Even,
                                     Parity::Even);
    sim.set_drive(drive);
    auto f = sim.make_state();
    sim.run(f, 500);

    // Ex(i+1/2, j, k) must be even in both mirrors: x partner nx-1-i,
    // y partner ny-j
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k < nz; ++k) {
                const double v = f.ex(i, j, k);
                const double mx = f.ex(n - 1 - i, j, k);
                const double my = f.ex(i, n - j, k);
                num += (v - mx) * (v - mx) + (v - my) * (v - my);
                den += v * v;
            }
    REQUIRE(den > 0.0);
    CHECK(num / den < 1e-10);
}

TEST_CASE("half-space even mirror reproduces the full-space mode") {
    PhotonicCrystalSpec spec;
    spec.a = 10;
    spec.r_over_a = 0.3;
    spec.d_over_a = 0.6;
    spec.num_layers = 2;
    HoleSet holes = build_lattice(spec);
    holes = apply_defect(holes, RadiusChange{0.15}, spec);
    const PermittivityGrid full = rasterize(holes, spec, 8.0, 10.0);
    const PermittivityGrid half = upper_half(full);

    const double w_lo = kTwoPi * 0.20 / spec.a, w_hi = kTwoPi * 0.45 / spec.a;
    auto run_one = [&](const PermittivityGrid& g, bool mirrored) {
        BoundarySpec bc = mirrored ? BoundarySpec::half_space_te(8)
                                   : BoundarySpec::all_absorbing(8);
        Simulation<float> sim(g, bc);
        DipoleDrive drive;
        drive.omega = 0.5 * (w_lo + w_hi);
        drive.width = 2.0 / (w_hi - w_lo);
        drive.t_peak = 5.0 * drive.width;
        const int kz = mirrored ? 0 : static_cast<int>(g.z_mid);
        drive.points = dipole_injections(g.nx(), g.ny(), kz, Component::Ex,
                                         Parity::Even, Parity::Even);
        sim.set_drive(drive);
        PointProbe<float> probe(Component::Ex, g.nx() / 2, g.ny() / 2, kz);
        sim.add_monitor(&probe);
        auto f = sim.make_state();
        const double t_end = drive.t_peak + 6.0 * drive.width + 2600.0;
        sim.run(f, static_cast<long>(t_end / sim.dt()));
        const auto tail = static_cast<std::size_t>(
            (drive.t_peak + 6.0 * drive.width) / sim.dt());
        std::vector<double> sig(probe.series.begin() + tail,
                                probe.series.end());
        return extract_resonances(sig, sim.dt(), w_lo, w_hi, 6);
    };

    const auto m_full = run_one(full, false);
    const auto m_half = run_one(half, true);
    REQUIRE(!m_full.empty());
    REQUIRE(!m_half.empty());
    CHECK(m_half[0].omega == doctest::Approx(m_full[0].omega).epsilon(0.005));
    CHECK(m_half[0].q == doctest::Approx(m_full[0].q).epsilon(0.10));
}

TEST_CASE("instability detector trips when the medium breaks the CFL bound") {
    // eps < 1 raises the local phase velocity past the vacuum Courant limit
    PermittivityGrid g = vacuum_grid(16, 16, 16);
    g.eps.fill(0.2f);
    Simulation<float> sim(g, BoundarySpec::closed_box(), 1.0);
    auto f = sim.make_state();
    SourceSpec src = excite_dipole_mode(Component::Ex, Parity::Even,
                                        Parity::Even);
    sim.apply_source(f, src);
    CHECK_THROWS_AS(sim.run(f, 4000), InstabilityError);
}

TEST_CASE("boundary spec validation") {
    BoundarySpec bc;
    bc.set_face(Face::ZLo, BcKind::BlochPeriodic);
    CHECK_THROWS_AS(bc.validate(), ConfigError);
    BoundarySpec mismatched;
    mismatched.set_face(Face::XLo, BcKind::BlochPeriodic);
    CHECK_THROWS_AS(mismatched.validate(), ConfigError);
}

TEST_CASE("field dump round-trips") {
    const PermittivityGrid g = vacuum_grid(10, 8, 6);
    Simulation<float> sim(g, BoundarySpec::closed_box());
    auto f = sim.make_state();
    sim.apply_source(f, excite_dipole_mode(Component::Ey, Parity::Even,
                                           Parity::Odd));
    sim.run(f, 20);
    dump_fields(f, "test_fdtd_ckpt");
    auto f2 = sim.make_state();
    restore_fields(f2, "test_fdtd_ckpt");
    CHECK(f2.ex(5, 4, 3) == f.ex(5, 4, 3));
    CHECK(f2.hz(2, 3, 4) == f.hz(2, 3, 4));
    for (const char* comp : {"ex", "ey", "ez", "hx", "hy", "hz"})
        std::remove((std::string("test_fdtd_ckpt.") + comp).c_str());
}
