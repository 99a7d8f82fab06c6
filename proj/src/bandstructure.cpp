#include "pcmc/bandstructure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pcmc/analysis.hpp"
#include "pcmc/errors.hpp"
#include "pcmc/fdtd.hpp"
#include "pcmc/geometry.hpp"

namespace pcmc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Half-slab supercell permittivity: two lattice points in an a x Ly x nz box,
/// holes replicated periodically, mirror plane at z = 0, absorber space above.
PermittivityGrid supercell_eps(const BandRunParams& p) {
    const int nx = static_cast<int>(std::lround(p.a));
    const int ny = static_cast<int>(std::lround(std::sqrt(3.0) * p.a));
    const double half_d = 0.5 * p.d_over_a * p.a;
    const int nz = static_cast<int>(std::ceil(half_d)) + p.air_cells + p.absorber;

    const double r = p.r_over_a * p.a;
    const double eps_slab = p.n_slab * p.n_slab;
    // hole centers in the supercell plus periodic images
    std::vector<std::pair<double, double>> centers;
    for (int ix = -1; ix <= 1; ++ix)
        for (int iy = -1; iy <= 1; ++iy) {
            centers.emplace_back(ix * nx, iy * ny);
            centers.emplace_back((ix + 0.5) * nx, (iy + 0.5) * ny);
        }
    auto in_hole = [&](double x, double y) {
        for (auto& [cx, cy] : centers) {
            const double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy < r * r) return true;
        }
        return false;
    };

    PermittivityGrid grid;
    grid.eps = Array3<float>(nx, ny, nz);
    grid.z_mid = 0.0;
    grid.slab_thickness = p.d_over_a * p.a;
    grid.eps_max = eps_slab;

    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                double acc = 0.0;
                for (double sx : {0.25, 0.75})
                    for (double sy : {0.25, 0.75})
                        for (double sz : {0.25, 0.75}) {
                            const double z = k + sz;
                            double e = 1.0;
                            if (z < half_d && !in_hole(i + sx, j + sy))
                                e = eps_slab;
                            acc += e;
                        }
                grid.eps(i, j, k) = static_cast<float>(acc / 8.0);
            }
    return grid;
}

/// Detected a/lambda values from one run at one Bloch point with one random
/// source/probe placement. Empty when nothing rings.
std::vector<double> single_run(const BandRunParams& p,
                               const PermittivityGrid& grid, double kx,
                               double ky, unsigned seed) {
    const int nx = grid.nx(), ny = grid.ny();

    BoundarySpec bc;
    bc.set_face(Face::XLo, BcKind::BlochPeriodic);
    bc.set_face(Face::XHi, BcKind::BlochPeriodic);
    bc.set_face(Face::YLo, BcKind::BlochPeriodic);
    bc.set_face(Face::YHi, BcKind::BlochPeriodic);
    bc.set_face(Face::ZLo, BcKind::EvenMirror);
    bc.set_face(Face::ZHi, BcKind::Absorbing);
    bc.absorber_thickness = p.absorber;
    bc.bloch_phase_x = std::polar(1.0, kx * nx);
    bc.bloch_phase_y = std::polar(1.0, ky * ny);

    Simulation<std::complex<double>> sim(grid, bc, p.courant);
    auto f = sim.make_state();

    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> px(1, nx - 2), py(1, ny - 2);

    const double w_lo = kTwoPi * p.window_lo / p.a;
    const double w_hi = kTwoPi * p.window_hi / p.a;
    DipoleDrive drive;
    drive.omega = 0.5 * (w_lo + w_hi);
    drive.width = 2.0 / (w_hi - w_lo);
    drive.t_peak = 5.0 * drive.width;
    drive.amplitude = 1.0;
    // two in-plane E components at z = 0 (mirror plane, TE antinode)
    drive.points.push_back({Component::Ex, px(rng), py(rng), 0, 1.0});
    drive.points.push_back({Component::Ey, px(rng), py(rng), 0, 0.8});
    sim.set_drive(drive);

    PointProbe<std::complex<double>> probe(Component::Ex, px(rng), py(rng), 0);
    PointProbe<std::complex<double>> probe2(Component::Ey, px(rng), py(rng), 0);
    sim.add_monitor(&probe);
    sim.add_monitor(&probe2);
    sim.run(f, p.steps);

    const auto tail_start =
        static_cast<std::size_t>((drive.t_peak + 6.0 * drive.width) / sim.dt());
    std::vector<double> freqs;
    for (const auto* pr : {&probe, &probe2}) {
        if (pr->series.size() <= tail_start + 200) continue;
        std::vector<double> sig;
        sig.reserve(pr->series.size() - tail_start);
        for (std::size_t n = tail_start; n < pr->series.size(); ++n)
            sig.push_back(pr->series[n].real());
        std::vector<Resonance> modes;
        try {
            modes = extract_resonances(sig, sim.dt(), w_lo, w_hi, p.max_modes);
        } catch (const AnalysisError&) {
            continue;
        }
        for (const auto& m : modes) {
            if (m.q < p.q_min || m.near_edge) continue;
            freqs.push_back(m.omega * p.a / kTwoPi);
        }
    }
    return freqs;
}

std::vector<double> merge_freqs(std::vector<double> freqs, double rel_tol) {
    std::sort(freqs.begin(), freqs.end());
    std::vector<double> out;
    for (double f : freqs) {
        if (!out.empty() && f - out.back() < rel_tol * f) {
            out.back() = 0.5 * (out.back() + f);
        } else {
            out.push_back(f);
        }
    }
    return out;
}

} // namespace

void BandRunParams::validate() const {
    if (a < 6.0) throw ConfigError("band run: lattice constant below 6 cells");
    if (r_over_a <= 0.0 || r_over_a >= 0.5)
        throw ConfigError("band run: r/a outside (0, 0.5)");
    if (d_over_a <= 0.0 || n_slab <= 1.0)
        throw ConfigError("band run: invalid slab");
    if (window_lo >= window_hi || window_lo <= 0.0)
        throw ConfigError("band run: invalid frequency window");
    if (steps < 1000) throw ConfigError("band run: too few steps");
}

std::vector<std::pair<double, double>> bz_edge_path(double a, int n_segments) {
    // X = (0, 2 pi / (sqrt(3) a)), J = (4 pi / (3 a), 0)
    const double xj_x = 4.0 * kPi / (3.0 * a);
    const double x_y = kTwoPi / (std::sqrt(3.0) * a);
    std::vector<std::pair<double, double>> path;
    for (int s = 0; s <= n_segments; ++s) {
        const double t = static_cast<double>(s) / n_segments;
        path.emplace_back(t * xj_x, (1.0 - t) * x_y);
    }
    // interior points toward Gamma for band-edge context
    path.emplace_back(0.0, 0.75 * x_y);
    path.emplace_back(0.75 * xj_x, 0.0);
    return path;
}

BandDiagram compute_bands(const BandRunParams& params,
                          const std::vector<std::pair<double, double>>& kpath) {
    params.validate();
    const PermittivityGrid grid = supercell_eps(params);

    BandDiagram diagram;
    diagram.params = params;
    unsigned seed = params.seed0;
    for (const auto& [kx, ky] : kpath) {
        std::vector<double> freqs;
        for (int s = 0; s < params.seeds; ++s) {
            auto part = single_run(params, grid, kx, ky, seed++);
            freqs.insert(freqs.end(), part.begin(), part.end());
        }
        BandPoint pt;
        pt.kx = kx;
        pt.ky = ky;
        pt.a_over_lambda = merge_freqs(std::move(freqs), 0.005);
        diagram.points.push_back(std::move(pt));
    }
    return diagram;
}

GapResult find_gap(const BandDiagram& diagram, double min_width) {
    std::vector<double> all;
    for (const auto& pt : diagram.points)
        all.insert(all.end(), pt.a_over_lambda.begin(),
                   pt.a_over_lambda.end());
    std::sort(all.begin(), all.end());

    GapResult gap;
    for (std::size_t i = 1; i < all.size(); ++i) {
        const double w = all[i] - all[i - 1];
        if (w > gap.width()) {
            gap.lo = all[i - 1];
            gap.hi = all[i];
        }
    }
    gap.found = all.size() >= 2 && gap.width() >= min_width;
    return gap;
}

double slab_te0_frequency(double beta, double d, double n) {
    if (beta <= 0.0 || d <= 0.0 || n <= 1.0)
        throw AnalysisError("slab_te0_frequency: invalid arguments");
    // guided window: beta/n < omega < beta. Root of
    //   f(w) = kappa tan(kappa d/2) - gamma,   kappa = sqrt(n^2 w^2 - beta^2),
    //   gamma = sqrt(beta^2 - w^2)
    // f < 0 at w -> beta/n (+), f -> +inf before kappa d/2 hits pi/2.
    auto f = [&](double w) {
        const double kap = std::sqrt(std::max(0.0, n * n * w * w - beta * beta));
        const double gam = std::sqrt(std::max(0.0, beta * beta - w * w));
        return kap * std::tan(std::min(kap * d / 2.0, kPi / 2.0 - 1e-12)) - gam;
    };
    double lo = beta / n * (1.0 + 1e-12);
    // first branch only: cap where kappa d/2 = pi/2
    double hi = std::min(beta * (1.0 - 1e-12),
                         std::sqrt(beta * beta + std::pow(kPi / d, 2)) / n);
    if (f(lo) > 0.0) return lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace pcmc
