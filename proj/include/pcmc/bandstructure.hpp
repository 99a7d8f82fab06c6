#ifndef PCMC_BANDSTRUCTURE_HPP
#define PCMC_BANDSTRUCTURE_HPP

#include <utility>
#include <vector>

namespace pcmc {

/// Guided-mode spectrum of the unpatterned or patterned slab on a rectangular
/// supercell (one lattice constant along x, round(sqrt(3) a) along y, two
/// lattice points) with Bloch boundaries in-plane, an even mirror at the slab
/// midplane, and an absorber above.
struct BandRunParams {
    double a = 12.0; // lattice constant, cells
    double r_over_a = 0.3;
    double d_over_a = 0.6;
    double n_slab = 3.4;
    int air_cells = 12;  // air between slab surface and absorber
    int absorber = 10;
    int steps = 9000;
    double courant = 0.5;
    double window_lo = 0.16; // a / lambda
    double window_hi = 0.46;
    double q_min = 500.0;   // discard leaky resonances below this Q
    int seeds = 2;          // independent source/probe placements per k
    unsigned seed0 = 1;
    int max_modes = 10;

    void validate() const;
};

struct BandPoint {
    double kx = 0.0, ky = 0.0;              // rad per cell
    std::vector<double> a_over_lambda;      // detected bands, ascending
};

struct BandDiagram {
    BandRunParams params;
    std::vector<BandPoint> points;
};

/// Wavevector path along the irreducible Brillouin-zone edge X -> J
/// (n_segments + 1 points), plus the X and J corners of adjacent segments
/// toward Gamma for band-edge context.
std::vector<std::pair<double, double>> bz_edge_path(double a, int n_segments);

BandDiagram compute_bands(const BandRunParams& params,
                          const std::vector<std::pair<double, double>>& kpath);

struct GapResult {
    double lo = 0.0, hi = 0.0; // a / lambda
    bool found = false;
    double width() const { return hi - lo; }
};

/// Largest interval inside the analysis window free of detected modes,
/// bounded by modes on both sides.
GapResult find_gap(const BandDiagram& diagram, double min_width = 0.01);

/// Analytic TE0 dispersion of a symmetric dielectric slab: returns the
/// angular frequency (c = 1) for in-plane propagation constant beta,
/// thickness d and slab index n. Bisection on the transcendental equation
/// kappa tan(kappa d / 2) = gamma.
double slab_te0_frequency(double beta, double d, double n);

} // namespace pcmc

#endif
