#include "pcmc/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pcmc/errors.hpp"

namespace pcmc {

namespace {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Boxcar-filter (length w, applied twice) and decimate a complex series.
std::vector<Cplx> filter_decimate(const std::vector<Cplx>& x, int w) {
    if (w <= 1)
        return x;
    auto boxcar = [&](const std::vector<Cplx>& in) {
        std::vector<Cplx> cum(in.size() + 1, Cplx{});
        for (std::size_t n = 0; n < in.size(); ++n)
            cum[n + 1] = cum[n] + in[n];
        std::vector<Cplx> out(in.size(), Cplx{});
        for (std::size_t n = 0; n + w <= in.size(); ++n)
            out[n] = (cum[n + w] - cum[n]) / static_cast<double>(w);
        out.resize(in.size() - w + 1);
        return out;
    };
    auto y = boxcar(boxcar(x));
    std::vector<Cplx> dec;
    for (std::size_t n = 0; n < y.size(); n += w)
        dec.push_back(y[n]);
    return dec;
}

} // namespace

std::vector<Resonance> extract_resonances(const std::vector<double>& signal,
                                          double dt, double omega_lo,
                                          double omega_hi, int max_modes) {
    if (omega_hi <= omega_lo)
        throw AnalysisError("empty analysis window");
    if (signal.size() < 32)
        throw AnalysisError("signal too short for resonance extraction");
    double peak = 0.0;
    for (double v : signal)
        peak = std::max(peak, std::abs(v));
    if (peak < 1e-280)
        throw AnalysisError("no peak found: signal is zero");

    // Demodulate to the window center and low-pass + decimate so the window
    // maps well inside the baseband Nyquist range.
    const double omega_c = 0.5 * (omega_lo + omega_hi);
    const double half_bw = 0.5 * (omega_hi - omega_lo);
    std::vector<Cplx> base(signal.size());
    for (std::size_t n = 0; n < signal.size(); ++n)
        base[n] = signal[n] * std::polar(1.0, -omega_c * dt * static_cast<double>(n));

    int dec = static_cast<int>(signal.size()) / 600;
    if (dec > 1) {
        // keep the window inside half the decimated Nyquist band
        const int dec_max = static_cast<int>(std::floor(0.5 * M_PI / (half_bw * dt)));
        dec = std::clamp(dec, 1, std::max(1, dec_max));
        base = filter_decimate(base, dec);
    } else {
        dec = 1;
    }
    const double dts = dt * dec;
    const int n = static_cast<int>(base.size());
    if (n < 24)
        throw AnalysisError("signal too short after decimation");

    // Matrix pencil on the baseband record.
    const int L = n / 2;
    const int rows = n - L;
    CMat y1(rows, L), y2(rows, L);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < L; ++c) {
            y1(r, c) = base[r + c];
            y2(r, c) = base[r + c + 1];
        }
    Eigen::JacobiSVD<CMat> svd(y1, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-5 * sv(0) && rank < 2 * max_modes)
            ++rank;
    if (rank == 0)
        throw AnalysisError("no peak found: record has no significant content");

    const CMat uk = svd.matrixU().leftCols(rank);
    const CMat vk = svd.matrixV().leftCols(rank);
    Eigen::VectorXd sk = sv.head(rank);
    CMat core = uk.adjoint() * y2 * vk; // rank x rank
    for (int i = 0; i < rank; ++i)
        core.row(i) /= sk(i);
    Eigen::ComplexEigenSolver<CMat> eig(core);
    const CVec z = eig.eigenvalues();

    // Amplitudes by least squares against the Vandermonde basis.
    CMat vand(n, rank);
    for (int c = 0; c < rank; ++c) {
        Cplx p = 1.0;
        for (int r = 0; r < n; ++r) {
            vand(r, c) = p;
            p *= z(c);
        }
    }
    CVec rhs(n);
    for (int r = 0; r < n; ++r)
        rhs(r) = base[r];
    const CVec amp = vand.colPivHouseholderQr().solve(rhs);

    std::vector<Resonance> out;
    double amax = 0.0;
    for (int i = 0; i < rank; ++i)
        amax = std::max(amax, std::abs(amp(i)));
    for (int i = 0; i < rank; ++i) {
        const double zabs = std::abs(z(i));
        if (zabs <= 0.0 || zabs > 1.0 + 1e-9)
            continue; // growing or degenerate
        const double omega = omega_c + std::arg(z(i)) / dts;
        if (omega < omega_lo || omega > omega_hi)
            continue;
        const double alpha = -std::log(std::min(zabs, 1.0 - 1e-12)) / dts;
        if (!(alpha > 0.0))
            continue;
        const double a = std::abs(amp(i));
        if (a < 5e-3 * amax)
            continue;
        Resonance r;
        r.omega = omega;
        r.q = omega / (2.0 * alpha);
        r.amplitude = a;
        r.amp = amp(i);
        const double margin = 0.02 * (omega_hi - omega_lo);
        r.near_edge = (omega - omega_lo < margin) || (omega_hi - omega < margin);
        out.push_back(r);
    }
    if (out.empty())
        throw AnalysisError("no peak found in the analysis window");
    std::sort(out.begin(), out.end(),
              [](const Resonance& a, const Resonance& b) {
                  return a.amplitude > b.amplitude;
              });
    if (static_cast<int>(out.size()) > max_modes)
        out.resize(max_modes);
    return out;
}

double q_from_energy_decay(const std::vector<double>& energy, double dt,
                           double omega, std::size_t first, std::size_t last) {
    last = std::min(last, energy.size());
    if (last <= first + 2)
        throw AnalysisError("energy-decay fit needs more samples");
    // least-squares line through (t, ln W)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (std::size_t i = first; i < last; ++i) {
        if (!(energy[i] > 0.0))
            throw AnalysisError("non-positive energy in decay fit");
        const double t = dt * static_cast<double>(i);
        const double y = std::log(energy[i]);
        sx += t; sy += y; sxx += t * t; sxy += t * y;
        ++m;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (!(slope < 0.0))
        throw AnalysisError("energy is not decaying");
    return -omega / slope;
}

QSplit split_q(double omega, double energy, double p_vert, double p_lat) {
    QSplit s;
    s.flagged = (p_vert <= 0.0) || (p_lat <= 0.0);
    s.q_perp = p_vert > 0.0 ? omega * energy / p_vert : 0.0;
    s.q_par = p_lat > 0.0 ? omega * energy / p_lat : 0.0;
    const double p_tot = p_vert + p_lat;
    s.q_total = p_tot > 0.0 ? omega * energy / p_tot : 0.0;
    return s;
}

namespace {

/// eps |E|^2 at a cell center from the staggered phasor arrays.
double cell_intensity(const Array3<Cplx>& ex, const Array3<Cplx>& ey,
                      const Array3<Cplx>& ez, const PermittivityGrid& grid,
                      int i, int j, int k) {
    auto n2 = [](const Cplx& v) { return std::norm(v); };
    const double ex2 = 0.25 * (n2(ex(i, j, k)) + n2(ex(i, j + 1, k)) +
                               n2(ex(i, j, k + 1)) + n2(ex(i, j + 1, k + 1)));
    const double ey2 = 0.25 * (n2(ey(i, j, k)) + n2(ey(i + 1, j, k)) +
                               n2(ey(i, j, k + 1)) + n2(ey(i + 1, j, k + 1)));
    const double ez2 = 0.25 * (n2(ez(i, j, k)) + n2(ez(i + 1, j, k)) +
                               n2(ez(i, j + 1, k)) + n2(ez(i + 1, j + 1, k)));
    return grid.eps(i, j, k) * (ex2 + ey2 + ez2);
}

} // namespace

ModeVolume mode_volume(const Array3<Cplx>& ex, const Array3<Cplx>& ey,
                       const Array3<Cplx>& ez, const PermittivityGrid& grid,
                       double lambda_cells, bool mirror_z) {
    ModeVolume mv;
    double sum = 0.0;
    for (int i = 0; i < grid.nx(); ++i)
        for (int j = 0; j < grid.ny(); ++j)
            for (int k = 0; k < grid.nz(); ++k) {
                const double u = cell_intensity(ex, ey, ez, grid, i, j, k);
                sum += u;
                if (u > mv.u_max) {
                    mv.u_max = u;
                    mv.argmax = {i, j, k};
                }
            }
    if (mirror_z)
        sum *= 2.0;
    if (mv.u_max <= 0.0)
        throw AnalysisError("mode volume of an identically zero snapshot");
    mv.v_cells = sum / mv.u_max;
    const double half_lambda = lambda_cells / 2.0;
    mv.v_norm = mv.v_cells / (half_lambda * half_lambda * half_lambda);
    return mv;
}

Array3<float> intensity_field(const Array3<Cplx>& ex, const Array3<Cplx>& ey,
                              const Array3<Cplx>& ez,
                              const PermittivityGrid& grid) {
    Array3<float> u(grid.nx(), grid.ny(), grid.nz());
    for (int i = 0; i < grid.nx(); ++i)
        for (int j = 0; j < grid.ny(); ++j)
            for (int k = 0; k < grid.nz(); ++k)
                u(i, j, k) = static_cast<float>(
                    cell_intensity(ex, ey, ez, grid, i, j, k));
    return u;
}

double field_ratio_at(const Array3<Cplx>& ex, const Array3<Cplx>& ey,
                      const Array3<Cplx>& ez, const PermittivityGrid& grid,
                      std::array<int, 3> cell, CouplingWeight w) {
    double smax = 0.0;
    double satom = 0.0;
    for (int i = 0; i < grid.nx(); ++i)
        for (int j = 0; j < grid.ny(); ++j)
            for (int k = 0; k < grid.nz(); ++k) {
                const double u = cell_intensity(ex, ey, ez, grid, i, j, k);
                const double e_mag = std::sqrt(u / grid.eps(i, j, k));
                const double weight = w == CouplingWeight::EpsAsPrinted
                                          ? grid.eps(i, j, k)
                                          : std::sqrt(double(grid.eps(i, j, k)));
                const double s = weight * e_mag;
                smax = std::max(smax, s);
                if (i == cell[0] && j == cell[1] && k == cell[2])
                    satom = s;
            }
    if (smax <= 0.0)
        throw AnalysisError("field ratio of an identically zero snapshot");
    return satom / smax;
}

CqedFigures cqed_figures(double q, double v_mode_norm, double field_ratio,
                         double gamma_perp, double lambda_m) {
    constexpr double c0 = 299792458.0;
    if (q <= 0.0 || v_mode_norm <= 0.0 || gamma_perp <= 0.0 || lambda_m <= 0.0)
        throw AnalysisError("cqed figures need positive Q, V_mode, gamma, lambda");
    CqedFigures f;
    f.gamma_perp = gamma_perp;
    f.lambda_m = lambda_m;
    f.v_mode_norm = v_mode_norm;
    const double omega0 = 2.0 * M_PI * c0 / lambda_m;
    f.kappa = omega0 / (4.0 * M_PI * q);
    f.v0_m3 = c0 * lambda_m * lambda_m / (8.0 * M_PI * gamma_perp);
    const double half_lambda = lambda_m / 2.0;
    f.v_mode_m3 = v_mode_norm * half_lambda * half_lambda * half_lambda;
    f.g0 = gamma_perp * std::sqrt(f.v0_m3 / f.v_mode_m3);
    if (field_ratio <= 0.0) {
        f.zero_field = true;
        f.g_atom = 0.0;
        f.n0 = std::numeric_limits<double>::infinity();
        f.m0 = std::numeric_limits<double>::infinity();
        f.strong_coupling = false;
        return f;
    }
    f.g_atom = f.g0 * field_ratio;
    f.n0 = 2.0 * f.kappa * gamma_perp / (f.g_atom * f.g_atom);
    f.m0 = std::pow(gamma_perp / (2.0 * f.g_atom), 2);
    f.strong_coupling = f.n0 < 1.0 && f.m0 < 1.0;
    return f;
}

} // namespace pcmc
