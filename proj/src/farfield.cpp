#include "pcmc/farfield.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pcmc {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Direct FT2 of one staggered component: sum f(i,j) exp(+i k.r), samples at
// (x0 + i + ox, y0 + j + oy). Phase factors are built by recurrence.
cplx ft2(const std::vector<cplx>& f, int ni, int nj, double x0, double y0,
         double ox, double oy, double kx, double ky) {
    const cplx stepy = std::polar(1.0, ky);
    cplx total = 0.0;
    const cplx stepx = std::polar(1.0, kx);
    cplx px = 1.0;
    for (int i = 0; i < ni; ++i) {
        const cplx* row = f.data() + static_cast<std::size_t>(i) * nj;
        cplx acc = 0.0;
        cplx py = 1.0;
        for (int j = 0; j < nj; ++j) {
            acc += row[j] * py;
            py *= stepy;
        }
        total += acc * px;
        px *= stepx;
    }
    return total * std::polar(1.0, kx * (x0 + ox) + ky * (y0 + oy));
}

struct TangentialSpectra {
    cplx fex, fey, fhx, fhy;
};

TangentialSpectra spectra_at(const NearFieldPlane& p, double kx, double ky) {
    TangentialSpectra s;
    s.fex = ft2(p.ex, p.nx, p.ny + 1, p.x0, p.y0, 0.5, 0.0, kx, ky);
    s.fey = ft2(p.ey, p.nx + 1, p.ny, p.x0, p.y0, 0.0, 0.5, kx, ky);
    s.fhx = ft2(p.hx, p.nx + 1, p.ny, p.x0, p.y0, 0.0, 0.5, kx, ky);
    s.fhy = ft2(p.hy, p.nx, p.ny + 1, p.x0, p.y0, 0.5, 0.0, kx, ky);
    return s;
}

} // namespace

void NearFieldPlane::allocate() {
    ex.assign(static_cast<std::size_t>(nx) * (ny + 1), 0.0);
    ey.assign(static_cast<std::size_t>(nx + 1) * ny, 0.0);
    hx.assign(static_cast<std::size_t>(nx + 1) * ny, 0.0);
    hy.assign(static_cast<std::size_t>(nx) * (ny + 1), 0.0);
}

RadiationPattern radiation_vectors(const NearFieldPlane& plane, double lambda,
                                   int n_theta, int n_phi) {
    if (lambda <= 0.0)
        throw std::invalid_argument("radiation_vectors: lambda must be positive");
    if (plane.nx <= 0 || plane.ny <= 0)
        throw std::invalid_argument("radiation_vectors: empty near-field plane");

    RadiationPattern pat;
    pat.n_theta = n_theta;
    pat.n_phi = n_phi;
    pat.lambda = lambda;
    pat.k_integrand.assign(static_cast<std::size_t>(n_theta + 1) * n_phi, 0.0);

    const double k0 = 2.0 * kPi / lambda;
    const double dtheta = 0.5 * kPi / n_theta;
    const double dphi = 2.0 * kPi / n_phi;

    for (int t = 0; t <= n_theta; ++t) {
        const double theta = t * dtheta;
        const double st = std::sin(theta), ct = std::cos(theta);
        for (int p = 0; p < n_phi; ++p) {
            const double phi = p * dphi;
            const double cp = std::cos(phi), sp = std::sin(phi);
            const double kx = k0 * st * cp;
            const double ky = k0 * st * sp;

            const TangentialSpectra s = spectra_at(plane, kx, ky);
            const cplx nx = -s.fhy, ny = s.fhx;
            const cplx lx = s.fey, ly = -s.fex;

            const cplx n_th = (nx * cp + ny * sp) * ct;
            const cplx n_ph = -nx * sp + ny * cp;
            const cplx l_th = (lx * cp + ly * sp) * ct;
            const cplx l_ph = -lx * sp + ly * cp;

            const cplx a = n_th + l_ph / pat.eta;
            const cplx b = n_ph - l_th / pat.eta;
            pat.K(t, p) = std::norm(a) + std::norm(b);
        }
    }
    return pat;
}

double radiated_power(const RadiationPattern& pattern) {
    const double dtheta = 0.5 * kPi / pattern.n_theta;
    const double dphi = 2.0 * kPi / pattern.n_phi;
    double sum = 0.0;
    for (int t = 0; t <= pattern.n_theta; ++t) {
        const double w = (t == 0 || t == pattern.n_theta) ? 0.5 : 1.0;
        const double st = std::sin(t * dtheta);
        double row = 0.0;
        for (int p = 0; p < pattern.n_phi; ++p) row += pattern.K(t, p);
        sum += w * st * row;
    }
    sum *= dtheta * dphi;
    return pattern.eta / (8.0 * pattern.lambda * pattern.lambda) * sum;
}

double radiated_power(const NearFieldPlane& plane, double lambda,
                      double rel_tol) {
    int nt = 32, np = 64;
    double prev = radiated_power(radiation_vectors(plane, lambda, nt, np));
    for (int iter = 0; iter < 3; ++iter) {
        nt *= 2;
        np *= 2;
        const double cur =
            radiated_power(radiation_vectors(plane, lambda, nt, np));
        if (prev == 0.0 && cur == 0.0) return 0.0;
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
        prev = cur;
    }
    return prev;
}

FarFieldQ q_from_radiated_power(double energy_half_space, double power,
                                double omega) {
    FarFieldQ out;
    if (power <= 0.0) {
        out.unbounded = true;
        out.q = std::numeric_limits<double>::infinity();
        return out;
    }
    out.q = omega * energy_half_space / power;
    return out;
}

double light_cone_fraction(const NearFieldPlane& plane, double lambda) {
    const double k0 = 2.0 * kPi / lambda;

    double total = 0.0;
    for (const cplx& v : plane.ex) total += std::norm(v);
    for (const cplx& v : plane.hy) total += std::norm(v);
    if (total == 0.0) return 0.0;
    // Parseval: integral |F|^2 dk = (2 pi)^2 sum |f|^2 (unit cell area)
    total *= 4.0 * kPi * kPi;

    const int n_r = 40, n_phi = 80;
    const double dr = k0 / n_r;
    const double dphi = 2.0 * kPi / n_phi;
    double inside = 0.0;
    for (int ir = 0; ir < n_r; ++ir) {
        const double kr = (ir + 0.5) * dr;
        for (int ip = 0; ip < n_phi; ++ip) {
            const double phi = ip * dphi;
            const double kx = kr * std::cos(phi);
            const double ky = kr * std::sin(phi);
            const cplx fex =
                ft2(plane.ex, plane.nx, plane.ny + 1, plane.x0, plane.y0, 0.5,
                    0.0, kx, ky);
            const cplx fhy =
                ft2(plane.hy, plane.nx, plane.ny + 1, plane.x0, plane.y0, 0.5,
                    0.0, kx, ky);
            inside += (std::norm(fex) + std::norm(fhy)) * kr;
        }
    }
    inside *= dr * dphi;
    return std::min(1.0, inside / total);
}

} // namespace pcmc
