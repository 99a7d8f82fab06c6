#ifndef PCMC_ANALYSIS_HPP
#define PCMC_ANALYSIS_HPP

#include <array>
#include <complex>
#include <vector>

#include "pcmc/array3.hpp"
#include "pcmc/geometry.hpp"

namespace pcmc {

/// One damped sinusoid recovered from a ringdown record.
struct Resonance {
    double omega = 0.0;     // rad per time unit (c = cell = 1)
    double q = 0.0;         // omega / (2 alpha)
    double amplitude = 0.0; // |complex amplitude|
    std::complex<double> amp{};
    bool near_edge = false; // within 2% of the analysis window edge
};

/// Harmonic inversion of a real ringdown signal restricted to
/// [omega_lo, omega_hi]: complex demodulation to baseband, decimation, and a
/// matrix-pencil fit. Throws AnalysisError when no mode is found.
std::vector<Resonance> extract_resonances(const std::vector<double>& signal,
                                          double dt, double omega_lo,
                                          double omega_hi, int max_modes = 8);

/// Q from the slope of log(stored energy): Q = -omega / d(ln W)/dt,
/// least-squares over samples [first, last) of the per-step series.
double q_from_energy_decay(const std::vector<double>& energy, double dt,
                           double omega, std::size_t first, std::size_t last);

struct ResonantMode {
    double a_over_lambda = 0.0;
    double q_perp = 0.0, q_par = 0.0, q_total = 0.0;
    double energy = 0.0;         // stored energy W at the measurement window
    double v_mode_norm = 0.0;    // V_mode in (lambda/2)^3
    double field_ratio_atom = 0.0; // eps|E| at the atom / max(eps|E|)
    double q_pencil = 0.0;       // discovery-pass Q for the cross-check
    bool q_consistent = true;    // |Q_flux - Q_pencil| within 10%
    bool flux_flagged = false;   // negative mean flux on some face
};

/// Loss-channel split: Q_i = omega W / P_i.
struct QSplit {
    double q_perp = 0.0, q_par = 0.0, q_total = 0.0;
    bool flagged = false;
};
QSplit split_q(double omega, double energy, double p_vert, double p_lat);

struct ModeVolume {
    double v_cells = 0.0; // raw integral ratio, cells^3
    double v_norm = 0.0;  // in (lambda/2)^3
    double u_max = 0.0;   // peak eps|E|^2
    std::array<int, 3> argmax{0, 0, 0};
};

/// V_mode = integral(eps |E|^2) / max(eps |E|^2) from phasor snapshots on the
/// E-sample grids. mirror_z doubles the integral for half-space runs.
ModeVolume mode_volume(const Array3<std::complex<double>>& ex,
                       const Array3<std::complex<double>>& ey,
                       const Array3<std::complex<double>>& ez,
                       const PermittivityGrid& grid, double lambda_cells,
                       bool mirror_z);

/// eps(r)|E(r)|^2 on cell centers, for intensity-map export.
Array3<float> intensity_field(const Array3<std::complex<double>>& ex,
                              const Array3<std::complex<double>>& ey,
                              const Array3<std::complex<double>>& ez,
                              const PermittivityGrid& grid);

/// eps(r)|E(r)| at a cell, normalized by the global max of eps|E|: the
/// relative coupling weight g(r)/g0. SqrtEps swaps in the energy-density
/// weighting sqrt(eps)|E| instead.
enum class CouplingWeight { EpsAsPrinted, SqrtEps };
double field_ratio_at(const Array3<std::complex<double>>& ex,
                      const Array3<std::complex<double>>& ey,
                      const Array3<std::complex<double>>& ez,
                      const PermittivityGrid& grid, std::array<int, 3> cell,
                      CouplingWeight w = CouplingWeight::EpsAsPrinted);

struct CqedFigures {
    double kappa = 0.0;    // cavity field decay rate, rad/s
    double v_mode_m3 = 0.0;
    double v_mode_norm = 0.0;
    double v0_m3 = 0.0;    // reference volume
    double g0 = 0.0;       // vacuum Rabi frequency, rad/s
    double g_atom = 0.0;   // coupling at the atom location, rad/s
    double n0 = 0.0;       // critical atom number
    double m0 = 0.0;       // critical photon number
    double gamma_perp = 0.0;
    double lambda_m = 0.0;
    bool strong_coupling = false; // both critical numbers below 1
    bool zero_field = false;      // atom sits at a field null
};

/// kappa = omega0/(4 pi Q); V0 = c lambda^2 / (8 pi gamma_perp);
/// g0 = gamma_perp sqrt(V0/V_mode); g = g0 * field_ratio;
/// N0 = 2 kappa gamma_perp / g^2; m0 = (gamma_perp / 2g)^2.
CqedFigures cqed_figures(double q, double v_mode_norm, double field_ratio,
                         double gamma_perp, double lambda_m);

} // namespace pcmc

#endif
