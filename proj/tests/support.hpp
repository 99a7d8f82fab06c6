#ifndef PCMC_TESTS_SUPPORT_HPP
#define PCMC_TESTS_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "pcmc/farfield.hpp"

namespace pcmc::testing {

/// Envelope peak time of a narrowband signal sampled at dt: demodulate at
/// omega, boxcar over one period, parabolic refinement around the maximum.
inline double envelope_peak_time(const std::vector<double>& s, double dt,
                                 double omega) {
    const int period = std::max(1, static_cast<int>(std::lround(
                                       2.0 * std::numbers::pi / omega / dt)));
    std::vector<double> env;
    env.reserve(s.size());
    std::complex<double> acc = 0.0;
    std::vector<std::complex<double>> demod(s.size());
    for (std::size_t n = 0; n < s.size(); ++n)
        demod[n] = s[n] * std::polar(1.0, -omega * (n * dt));
    for (std::size_t n = 0; n < s.size(); ++n) {
        acc += demod[n];
        if (n >= static_cast<std::size_t>(period))
            acc -= demod[n - period];
        env.push_back(std::abs(acc));
    }
    std::size_t peak = 0;
    for (std::size_t n = 1; n < env.size(); ++n)
        if (env[n] > env[peak]) peak = n;
    double frac = 0.0;
    if (peak > 0 && peak + 1 < env.size()) {
        const double a = env[peak - 1], b = env[peak], c = env[peak + 1];
        const double denom = a - 2.0 * b + c;
        if (denom != 0.0) frac = 0.5 * (a - c) / denom;
    }
    // boxcar delays the envelope by half a period
    return (static_cast<double>(peak) + frac - 0.5 * period) * dt;
}

inline double envelope_max(const std::vector<double>& s, std::size_t from,
                           std::size_t to) {
    double m = 0.0;
    for (std::size_t n = from; n < std::min(to, s.size()); ++n)
        m = std::max(m, std::abs(s[n]));
    return m;
}

/// Closed-form fields of a Hertzian dipole (moment I*l along x) at the
/// origin, e^{+j omega t} time convention, outgoing e^{-jkr}, eta = 1.
/// Fills a staggered near-field plane at height z.
inline void fill_hertzian_plane(NearFieldPlane& plane, double z, double k,
                                double il) {
    using cplx = std::complex<double>;
    const cplx j(0.0, 1.0);
    const double pi = std::numbers::pi;

    auto grad_g = [&](double x, double y, double zz, cplx out[3]) {
        const double r = std::sqrt(x * x + y * y + zz * zz);
        const cplx g = std::exp(-j * k * r) / (4.0 * pi * r);
        const cplx f = -(1.0 + j * k * r) * g / (r * r); // (dg/dr)/r
        out[0] = f * x;
        out[1] = f * y;
        out[2] = f * zz;
    };
    auto g_of = [&](double x, double y, double zz) {
        const double r = std::sqrt(x * x + y * y + zz * zz);
        return std::exp(-j * k * r) / (4.0 * pi * r);
    };
    // H = Il grad(g) x x_hat = Il (0, gz, -gy)
    auto h_field = [&](double x, double y, double zz, cplx& hx, cplx& hy) {
        cplx gg[3];
        grad_g(x, y, zz, gg);
        hx = 0.0;
        hy = il * gg[2];
        (void)x;
    };
    // E = (Il / (j omega)) [k^2 g x_hat + d(grad g)/dx], omega = k (c = 1)
    auto e_field = [&](double x, double y, double zz, cplx& ex, cplx& ey) {
        const double h = 1e-4;
        cplx gp[3], gm[3];
        grad_g(x + h, y, zz, gp);
        grad_g(x - h, y, zz, gm);
        const cplx ddx_gx = (gp[0] - gm[0]) / (2.0 * h);
        const cplx ddx_gy = (gp[1] - gm[1]) / (2.0 * h);
        const cplx pref = il / (j * k);
        ex = pref * (k * k * g_of(x, y, zz) + ddx_gx);
        ey = pref * ddx_gy;
    };

    plane.allocate();
    for (int i = 0; i < plane.nx; ++i)
        for (int jj = 0; jj <= plane.ny; ++jj) {
            const double x = plane.x0 + i + 0.5, y = plane.y0 + jj;
            cplx ex, ey, hx, hy;
            e_field(x, y, z, ex, ey);
            h_field(x, y, z, hx, hy);
            plane.at_ex(i, jj) = ex;
            plane.at_hy(i, jj) = hy;
        }
    for (int i = 0; i <= plane.nx; ++i)
        for (int jj = 0; jj < plane.ny; ++jj) {
            const double x = plane.x0 + i, y = plane.y0 + jj + 0.5;
            cplx ex, ey, hx, hy;
            e_field(x, y, z, ex, ey);
            h_field(x, y, z, hx, hy);
            plane.at_ey(i, jj) = ey;
            plane.at_hx(i, jj) = hx;
        }
}

/// Total radiated power of that dipole, both hemispheres.
inline double hertzian_total_power(double k, double il) {
    return k * k * il * il / (12.0 * std::numbers::pi);
}

} // namespace pcmc::testing

#endif
