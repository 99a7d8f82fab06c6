#ifndef PCMC_FARFIELD_HPP
#define PCMC_FARFIELD_HPP

#include <complex>
#include <vector>

namespace pcmc {

/// Tangential field phasors sampled on a z-normal plane in the air region.
/// Samples follow the staggered layout: ex at (x0 + i + 1/2, y0 + j),
/// ey at (x0 + i, y0 + j + 1/2), hx like ey, hy like ex, with (x0, y0) the
/// plane corner relative to the phase center.
struct NearFieldPlane {
    int nx = 0, ny = 0; // cells
    double x0 = 0.0, y0 = 0.0;
    double z_height = 0.0; // above the slab surface, informational
    std::vector<std::complex<double>> ex, ey, hx, hy;

    std::complex<double>& at_ex(int i, int j) { return ex[i * (ny + 1) + j]; }
    std::complex<double>& at_ey(int i, int j) { return ey[i * ny + j]; }
    std::complex<double>& at_hx(int i, int j) { return hx[i * ny + j]; }
    std::complex<double>& at_hy(int i, int j) { return hy[i * (ny + 1) + j]; }

    void allocate();
};

/// Power-per-solid-angle integrand K on the upper-hemisphere angular grid
/// theta in [0, pi/2] (n_theta+1 samples incl. endpoints), phi in [0, 2pi)
/// (n_phi samples).
struct RadiationPattern {
    int n_theta = 64, n_phi = 128;
    double lambda = 0.0;    // free-space wavelength, grid cells
    double eta = 1.0;       // free-space impedance (natural units)
    std::vector<double> k_integrand; // (n_theta+1) x n_phi

    double& K(int t, int p) { return k_integrand[t * n_phi + p]; }
    double K(int t, int p) const { return k_integrand[t * n_phi + p]; }
};

/// Radiation vectors from direct (non-uniform) 2D Fourier transforms of the
/// tangential fields, assembled into K(theta, phi). Only in-plane wavevectors
/// inside the light cone |k_par| <= 2 pi / lambda are evaluated.
RadiationPattern radiation_vectors(const NearFieldPlane& plane, double lambda,
                                   int n_theta = 64, int n_phi = 128);

/// P = eta/(8 lambda^2) integral sin(theta) K dtheta dphi over the upper
/// hemisphere, trapezoid quadrature.
double radiated_power(const RadiationPattern& pattern);

/// Refines the angular grid (doubling) until P changes by < rel_tol.
double radiated_power(const NearFieldPlane& plane, double lambda,
                      double rel_tol = 0.01);

struct FarFieldQ {
    double q = 0.0;
    bool unbounded = false; // P = 0
};
/// Q = omega W / P with W the stored energy in the half-space z >= 0.
FarFieldQ q_from_radiated_power(double energy_half_space, double power,
                                double omega);

/// Fraction of the FT2 spectral weight of Ex and Hy lying inside the light
/// cone |k_par| <= 2 pi/lambda (total weight via Parseval).
double light_cone_fraction(const NearFieldPlane& plane, double lambda);

} // namespace pcmc

#endif
