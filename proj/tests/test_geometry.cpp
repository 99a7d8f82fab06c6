#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pcmc/errors.hpp"
#include "pcmc/geometry.hpp"

using namespace pcmc;

namespace {

PhotonicCrystalSpec spec_a20() {
    PhotonicCrystalSpec s;
    s.a = 20;
    s.r_over_a = 0.275;
    s.d_over_a = 0.75;
    s.num_layers = 5;
    return s;
}

const Hole* hole_at(const HoleSet& set, double cx, double cy) {
    for (const auto& h : set.holes)
        if (std::abs(h.cx - cx) < 1e-6 && std::abs(h.cy - cy) < 1e-6) return &h;
    return nullptr;
}

double min_center_distance(const HoleSet& set) {
    double best = 1e300;
    for (std::size_t i = 0; i < set.holes.size(); ++i)
        for (std::size_t j = i + 1; j < set.holes.size(); ++j)
            best = std::min(best, std::hypot(set.holes[i].cx - set.holes[j].cx,
                                             set.holes[i].cy - set.holes[j].cy));
    return best;
}

} // namespace

TEST_CASE("lattice hole count follows the ring formula") {
    for (int layers : {1, 2, 3, 5}) {
        PhotonicCrystalSpec s = spec_a20();
        s.num_layers = layers;
        CHECK(static_cast<int>(build_lattice(s).holes.size()) ==
              1 + 3 * layers * (layers + 1));
    }
    // 5 layers: the published cavity size
    CHECK(build_lattice(spec_a20()).holes.size() == 91);
}

TEST_CASE("nearest neighbors sit at distance a") {
    const HoleSet set = build_lattice(spec_a20());
    CHECK(min_center_distance(set) == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(hole_at(set, 20.0, 0.0) != nullptr);
    CHECK(hole_at(set, 10.0, 10.0 * std::sqrt(3.0)) != nullptr);
}

TEST_CASE("stadium containment") {
    Hole h;
    h.radius = 3.0;
    h.elong_y = 2.0;
    CHECK(h.contains(0.0, 4.9));
    CHECK(!h.contains(0.0, 5.1));
    CHECK(h.contains(2.9, 0.0));
    CHECK(!h.contains(3.1, 0.0));
    CHECK(h.contains(2.0, 2.0 + 3.0 * std::sqrt(1 - 4.0 / 9.0) - 0.05));
    CHECK(!h.contains(2.0, 2.0 + 3.0 * std::sqrt(1 - 4.0 / 9.0) + 0.05));
}

TEST_CASE("apply_defect leaves its input untouched") {
    const HoleSet set = build_lattice(spec_a20());
    const HoleSet before = set;
    (void)apply_defect(set, RadiusChange{0.2}, spec_a20());
    REQUIRE(set.holes.size() == before.holes.size());
    for (std::size_t i = 0; i < set.holes.size(); ++i) {
        CHECK(set.holes[i].cx == before.holes[i].cx);
        CHECK(set.holes[i].radius == before.holes[i].radius);
    }
}

TEST_CASE("radius and index defects touch only the central hole") {
    const PhotonicCrystalSpec s = spec_a20();
    const HoleSet base = build_lattice(s);

    const HoleSet reduced = apply_defect(base, RadiusChange{0.2}, s);
    const Hole* center = hole_at(reduced, 0.0, 0.0);
    REQUIRE(center != nullptr);
    CHECK(center->radius == doctest::Approx(4.0));
    int touched = 0;
    for (const auto& h : reduced.holes)
        if (h.radius != doctest::Approx(s.hole_radius())) ++touched;
    CHECK(touched == 1);

    const HoleSet index = apply_defect(base, IndexChange{2.4}, s);
    CHECK(hole_at(index, 0.0, 0.0)->n_override == doctest::Approx(2.4));

    CHECK_THROWS_AS(apply_defect(base, RadiusChange{0.3}, s), GeometryError);
    CHECK_THROWS_AS(apply_defect(base, IndexChange{3.5}, s), GeometryError);
}

TEST_CASE("dislocation elongates the axis row and shifts the half-spaces") {
    const PhotonicCrystalSpec s = spec_a20();
    const double a = s.a, row = a * std::sqrt(3.0) / 2.0, p = 3.0;
    const HoleSet set =
        apply_defect(build_lattice(s), FractionalEdgeDislocation{Axis::X, p}, s);

    const Hole* on_axis = hole_at(set, a, 0.0);
    REQUIRE(on_axis != nullptr);
    CHECK(on_axis->elong_y == doctest::Approx(p / 2.0));
    CHECK(on_axis->elong_x == doctest::Approx(0.0));

    // first row off-axis: shifted away by p/2, not elongated
    const Hole* shifted = hole_at(set, a / 2.0, row + p / 2.0);
    REQUIRE(shifted != nullptr);
    CHECK(shifted->elong_y == doctest::Approx(0.0));
    const Hole* shifted_dn = hole_at(set, a / 2.0, -row - p / 2.0);
    REQUIRE(shifted_dn != nullptr);

    // in-row spacing is preserved
    const Hole* next_in_row = hole_at(set, a * 1.5, row + p / 2.0);
    REQUIRE(next_in_row != nullptr);
    CHECK(std::hypot(next_in_row->cx - shifted->cx,
                     next_in_row->cy - shifted->cy) == doctest::Approx(a));
}

TEST_CASE("four-hole tuning moves the Gamma-J neighbors radially") {
    const PhotonicCrystalSpec s = spec_a20();
    const double a = s.a, r = s.hole_radius();
    const double r1 = 0.225 * a, r2 = 0.2 * a;
    const HoleSet set =
        apply_defect(build_lattice(s), FourHoleTuning{0.2, 0.225}, s);

    CHECK(hole_at(set, 0.0, 0.0)->radius == doctest::Approx(r2));

    const double shift = r - r1;
    int moved = 0;
    for (const auto& h : set.holes) {
        if (h.radius == doctest::Approx(r1).epsilon(1e-9)) {
            ++moved;
            const double dist = std::hypot(h.cx, h.cy);
            CHECK(dist == doctest::Approx(a + shift));
            // edge-to-edge distance to the next lattice site out along the
            // same direction is preserved: 2a - (a + shift) - r1 = a - r - ...
            CHECK((2.0 * a - dist - r1) == doctest::Approx(a - r));
        }
    }
    CHECK(moved == 4);
}

TEST_CASE("coupled defects select the published sites") {
    const PhotonicCrystalSpec s = spec_a20();
    const double a = s.a, row = a * std::sqrt(3.0) / 2.0;

    const HoleSet x_pair =
        apply_defect(build_lattice(s), CoupledDefects{Axis::X, 0.2, 0.0}, s);
    CHECK(hole_at(x_pair, a, 0.0)->radius == doctest::Approx(0.2 * a));
    CHECK(hole_at(x_pair, -a, 0.0)->radius == doctest::Approx(0.2 * a));
    CHECK(hole_at(x_pair, 0.0, 0.0)->radius == doctest::Approx(s.hole_radius()));

    const HoleSet y_pair =
        apply_defect(build_lattice(s), CoupledDefects{Axis::Y, 0.2, 2.0}, s);
    const Hole* up = hole_at(y_pair, a / 2.0, row);
    const Hole* dn = hole_at(y_pair, a / 2.0, -row);
    REQUIRE(up != nullptr);
    REQUIRE(dn != nullptr);
    CHECK(up->radius == doctest::Approx(0.2 * a));
    CHECK(dn->radius == doctest::Approx(0.2 * a));
    CHECK(up->elong_y == doctest::Approx(1.0));
    // the two central holes between the defects stay unperturbed
    CHECK(hole_at(y_pair, 0.0, 0.0)->radius == doctest::Approx(s.hole_radius()));
    CHECK(hole_at(y_pair, a, 0.0)->radius == doctest::Approx(s.hole_radius()));
    CHECK(hole_at(y_pair, 0.0, 0.0)->elong_y == doctest::Approx(0.0));
    // rows beyond the defect rows are pushed outward
    CHECK(hole_at(y_pair, 0.0, a * std::sqrt(3.0) + 1.0) != nullptr);
}

TEST_CASE("overlapping defects are rejected") {
    PhotonicCrystalSpec s = spec_a20();
    s.r_over_a = 0.45;
    // heavy elongation of the defect columns collides with the central hole
    CHECK_THROWS_AS(apply_defect(build_lattice(s),
                                 CoupledDefects{Axis::X, 0.44, 6.0}, s),
                    GeometryError);
}

TEST_CASE("rasterized hole area matches the stadium area") {
    PhotonicCrystalSpec s = spec_a20();
    s.num_layers = 1;
    const HoleSet set = build_lattice(s);
    const PermittivityGrid g = rasterize(set, s, 6.0, 4.0);

    // integrate the air fraction over the grid column footprint of the
    // central hole at the slab midplane
    const int k = static_cast<int>(g.z_mid);
    const double eps_slab = s.n_slab * s.n_slab;
    const double r = s.hole_radius();
    double area = 0.0;
    const int cx = g.nx() / 2, cy = g.ny() / 2, w = static_cast<int>(r) + 3;
    for (int i = cx - w; i < cx + w; ++i)
        for (int j = cy - w; j < cy + w; ++j)
            area += (eps_slab - g.eps(i, j, k)) / (eps_slab - 1.0);
    CHECK(area ==
          doctest::Approx(std::numbers::pi * r * r).epsilon(0.02));
}

TEST_CASE("rasterized grid is z-symmetric and halves cleanly") {
    PhotonicCrystalSpec s = spec_a20();
    s.a = 10;
    s.num_layers = 2;
    const PermittivityGrid g = rasterize(build_lattice(s), s, 5.0, 6.0);
    for (int i = 0; i < g.nx(); i += 3)
        for (int j = 0; j < g.ny(); j += 3)
            for (int k = 0; k < g.nz() / 2; ++k)
                CHECK(g.eps(i, j, k) == g.eps(i, j, g.nz() - 1 - k));

    const PermittivityGrid h = upper_half(g);
    CHECK(h.nz() == g.nz() / 2);
    CHECK(h.eps(3, 4, 0) == g.eps(3, 4, g.nz() / 2));
    CHECK(h.z_mid == doctest::Approx(0.0));
}

TEST_CASE("grid export round-trips") {
    Array3<float> a(4, 3, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 2; ++k) a(i, j, k) = float(i * 100 + j * 10 + k);
    const std::string path = "test_grid_roundtrip.tmp";
    export_grid(a, path);
    const Array3<float> b = import_grid(path);
    std::remove(path.c_str());
    REQUIRE(b.nx() == 4);
    REQUIRE(b.ny() == 3);
    REQUIRE(b.nz() == 2);
    CHECK(b(3, 2, 1) == a(3, 2, 1));
    CHECK(b(1, 0, 1) == a(1, 0, 1));
}

TEST_CASE("spec validation rejects bad parameters") {
    PhotonicCrystalSpec s = spec_a20();
    s.r_over_a = 0.55;
    CHECK_THROWS_AS(s.validate(), GeometryError);
    s = spec_a20();
    s.a = 0;
    CHECK_THROWS_AS(s.validate(), GeometryError);
    s = spec_a20();
    s.a = 100;
    s.num_layers = 8; // exceeds the grid-extent cap
    CHECK_THROWS_AS(build_lattice(s), GeometryError);
}
