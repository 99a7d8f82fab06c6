#ifndef PCMC_FDTD_HPP
#define PCMC_FDTD_HPP

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pcmc/array3.hpp"
#include "pcmc/errors.hpp"
#include "pcmc/geometry.hpp"

namespace pcmc {

enum class Component { Ex, Ey, Ez, Hx, Hy, Hz };
enum class Face { XLo, XHi, YLo, YHi, ZLo, ZHi };

enum class BcKind {
    Absorbing,     // graded-conductivity layer backed by PEC
    Pec,           // tangential E clamped to zero (odd mirror)
    EvenMirror,    // tangential E even (PMC); on the lower z face selects TE-like modes
    BlochPeriodic, // periodic with phase factor across the span
};

struct BoundarySpec {
    std::array<BcKind, 6> faces{BcKind::Absorbing, BcKind::Absorbing,
                                BcKind::Absorbing, BcKind::Absorbing,
                                BcKind::Absorbing, BcKind::Absorbing};
    int absorber_thickness = 10;
    double sigma_max = 2.0; // peak conductivity, natural units (c = cell = 1)
    int grading = 4;        // polynomial grading exponent
    // Phase advance across the full grid span on Bloch axes.
    std::complex<double> bloch_phase_x{1.0, 0.0};
    std::complex<double> bloch_phase_y{1.0, 0.0};

    BcKind face(Face f) const { return faces[static_cast<int>(f)]; }
    void set_face(Face f, BcKind k) { faces[static_cast<int>(f)] = k; }

    /// Bloch faces must come in matched opposing x/y pairs.
    void validate() const;

    static BoundarySpec all_absorbing(int thickness = 10);
    /// Absorbing everywhere except an even mirror on the lower z face.
    static BoundarySpec half_space_te(int thickness = 10);
    static BoundarySpec closed_box();
};

/// 3D array with a one-cell ghost margin on every side.
template <typename S>
struct Field3 {
    Field3() = default;
    Field3(int nx, int ny, int nz)
        : nx(nx), ny(ny), nz(nz), a(nx + 2, ny + 2, nz + 2) {}

    S& operator()(int i, int j, int k) { return a(i + 1, j + 1, k + 1); }
    const S& operator()(int i, int j, int k) const {
        return a(i + 1, j + 1, k + 1);
    }

    int nx = 0, ny = 0, nz = 0;
    Array3<S> a;
};

/// Staggered-grid field arrays. With Nc = (nx, ny, nz) grid cells:
///   Ex(i,j,k) at (i+1/2, j, k),  Hx at (i, j+1/2, k+1/2), and cyclic.
template <typename S>
struct FieldState {
    FieldState() = default;
    FieldState(int nx, int ny, int nz, double dt)
        : ex(nx, ny + 1, nz + 1), ey(nx + 1, ny, nz + 1), ez(nx + 1, ny + 1, nz),
          hx(nx + 1, ny, nz), hy(nx, ny + 1, nz), hz(nx, ny, nz + 1),
          nx(nx), ny(ny), nz(nz), dt(dt) {}

    Field3<S> ex, ey, ez, hx, hy, hz;
    int nx = 0, ny = 0, nz = 0;
    long step = 0;
    double dt = 0.0;

    double time() const { return step * dt; }
    double max_abs_e() const;
};

/// Drive current added to one field sample.
struct Injection {
    Component comp = Component::Ex;
    int i = 0, j = 0, k = 0;
    double weight = 1.0;
};

/// Gaussian-envelope dipole drive: amp * exp(-(t-t0)^2/2w^2) * cos(omega (t-t0)).
struct DipoleDrive {
    std::vector<Injection> points;
    double omega = 0.0;
    double amplitude = 1.0;
    double t_peak = 0.0;
    double width = 0.0;

    double value(double t) const {
        const double u = (t - t_peak) / width;
        return amplitude * std::exp(-0.5 * u * u) * std::cos(omega * (t - t_peak));
    }
    bool finished(double t) const { return t > t_peak + 6.0 * width; }
};

enum class Parity { Even, Odd };

struct SourceSpec {
    // InitialField: symmetry-adapted seed, applied once at t=0.
    // PointDipole: soft Gaussian drive.
    enum class Kind { InitialField, PointDipole } kind = Kind::PointDipole;
    Component comp = Component::Ex;
    Parity parity_x = Parity::Even, parity_y = Parity::Even;
    double omega = 0.0, amplitude = 1.0, t_peak = 0.0, width = 0.0;
    double seed_sigma = 2.0; // Gaussian footprint of the initial-field pattern
};

/// Initial-field pattern with the requested mirror parities so only modes of
/// matching symmetry receive energy. Drives the given E component.
SourceSpec excite_dipole_mode(Component comp, Parity parity_x, Parity parity_y);

/// Symmetrized injection set centered on (nx/2, ny/2) at z-plane kz, with the
/// requested in-plane mirror parities. comp must be Ex or Ey.
std::vector<Injection> dipole_injections(int nx, int ny, int kz, Component comp,
                                         Parity parity_x, Parity parity_y);

template <typename S>
class Simulation;

/// Per-step observer, invoked after both half-updates.
template <typename S>
class Monitor {
public:
    virtual ~Monitor() = default;
    virtual void on_step(const Simulation<S>& sim, const FieldState<S>& f) = 0;
};

template <typename S>
class PointProbe : public Monitor<S> {
public:
    PointProbe(Component c, int i, int j, int k) : comp(c), i(i), j(j), k(k) {}
    void on_step(const Simulation<S>&, const FieldState<S>& f) override;

    Component comp;
    int i, j, k;
    std::vector<S> series;
};

/// Instantaneous Poynting flux through an axis-normal plane, positive along
/// +axis. Plane sits on integer (E-sample) coordinates; H is interpolated and
/// averaged over two half-steps so the sample is time-centered.
template <typename S>
class FluxMonitor : public Monitor<S> {
public:
    /// axis: 0,1,2 for x,y,z; plane: integer coordinate; lo/hi: in-plane cell
    /// bounds (cells [lo, hi) in the two in-plane axes).
    FluxMonitor(int axis, int plane, std::array<int, 2> lo, std::array<int, 2> hi)
        : axis(axis), plane(plane), lo(lo), hi(hi) {}
    void on_step(const Simulation<S>& sim, const FieldState<S>& f) override;

    double mean(long from_step, long to_step) const;

    int axis, plane;
    std::array<int, 2> lo, hi;
    std::vector<double> series; // one entry per step, starting at step 1

private:
    std::vector<double> h1_prev_, h2_prev_;
    bool primed_ = false;
};

/// Total EM energy in a box of cells, 0.5 * sum(eps |E|^2 + |H|^2).
template <typename S>
class EnergyMonitor : public Monitor<S> {
public:
    EnergyMonitor(std::array<int, 3> lo, std::array<int, 3> hi)
        : lo(lo), hi(hi) {}
    void on_step(const Simulation<S>& sim, const FieldState<S>& f) override;

    double mean(long from_step, long to_step) const;

    std::array<int, 3> lo, hi;
    std::vector<double> series;
};

/// Exactly-conserved discrete energy for lossless closed boxes:
/// 0.5 [ sum eps E(n)^2 + sum H(n-1/2) . H(n+1/2) ].
template <typename S>
class ConservedEnergyMonitor : public Monitor<S> {
public:
    void on_step(const Simulation<S>& sim, const FieldState<S>& f) override;
    std::vector<double> series;

private:
    FieldState<S> prev_;
    bool primed_ = false;
};

/// Accumulates complex E-field phasors over an integer number of cycles:
/// F = (2/N) sum E(t_n) exp(-i w t_n).
template <typename S>
class VolumePhasor : public Monitor<S> {
public:
    VolumePhasor(double omega, long start_step, long num_steps)
        : omega(omega), start(start_step), count(num_steps) {}
    void on_step(const Simulation<S>& sim, const FieldState<S>& f) override;
    bool done(long step) const { return step >= start + count; }

    double omega;
    long start, count;
    Array3<std::complex<double>> ex, ey, ez; // E-sample layouts
};

/// Tangential E and H phasors on a z = plane surface (E-sample heights),
/// H interpolated in z and time-shifted by dt/2.
template <typename S>
class PlanePhasor : public Monitor<S> {
public:
    PlanePhasor(int plane, double omega, long start_step, long num_steps)
        : plane(plane), omega(omega), start(start_step), count(num_steps) {}
    void on_step(const Simulation<S>& sim, const FieldState<S>& f) override;

    int plane;
    double omega;
    long start, count;
    // ex: (nx, ny+1), ey: (nx+1, ny), hx: (nx+1, ny), hy: (nx, ny+1)
    std::vector<std::complex<double>> ex, ey, hx, hy;
    int nx = 0, ny = 0;
};

template <typename S>
class Simulation {
public:
    /// Keeps a reference to `grid`; the caller owns it for the simulation's
    /// lifetime.
    Simulation(const PermittivityGrid& grid, BoundarySpec bounds,
               double courant = 0.5);

    /// One leapfrog step: E half-update, boundary rules, H half-update,
    /// then monitors.
    void step(FieldState<S>& f);

    /// Advances `steps` steps with the instability detector armed.
    void run(FieldState<S>& f, long steps);

    FieldState<S> make_state() const;
    void set_drive(DipoleDrive drive) { drive_ = std::move(drive); }
    void apply_source(FieldState<S>& f, const SourceSpec& src) const;
    void add_monitor(Monitor<S>* m) { monitors_.push_back(m); }

    const PermittivityGrid& grid() const { return *grid_; }
    const BoundarySpec& bounds() const { return bounds_; }
    double dt() const { return dt_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }

    /// eps averaged onto an E-sample location.
    double eps_at(Component c, int i, int j, int k) const;

    double instability_reference = 1.0; // abort when max|E| exceeds 1e6 x this

private:
    using Real = std::conditional_t<std::is_same_v<S, float>, float, double>;

    void build_coefficients(double courant);
    void fill_h_ghosts(FieldState<S>& f) const;
    void clamp_tangential_e(FieldState<S>& f) const;
    void update_e(FieldState<S>& f) const;
    void update_h(FieldState<S>& f) const;
    void inject(FieldState<S>& f) const;

    const PermittivityGrid* grid_;
    BoundarySpec bounds_;
    int nx_, ny_, nz_;
    double dt_;

    // Update coefficients, one pair per field component (ghost-padded to
    // match the field layouts). For E: ca damping, cb = dt/eps scaled.
    Field3<Real> ca_[6], cb_[6];
    DipoleDrive drive_;
    std::vector<Monitor<S>*> monitors_;
};

/// Checkpoint: one raw-grid file per component, float32 (see export_grid).
template <typename S>
void dump_fields(const FieldState<S>& f, const std::string& prefix);
template <typename S>
void restore_fields(FieldState<S>& f, const std::string& prefix);

extern template class Simulation<float>;
extern template class Simulation<double>;
extern template class Simulation<std::complex<double>>;

} // namespace pcmc

#endif
