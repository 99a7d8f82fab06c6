#include "pcmc/fdtd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcmc {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

template <typename S>
double abs_val(const S& v) {
    if constexpr (std::is_same_v<S, std::complex<double>>)
        return std::abs(v);
    else
        return std::abs(static_cast<double>(v));
}

template <typename S>
std::complex<double> to_complex(const S& v) {
    if constexpr (std::is_same_v<S, std::complex<double>>)
        return v;
    else
        return {static_cast<double>(v), 0.0};
}

/// real(a * conj(b)) for flux/energy bookkeeping.
template <typename S>
double re_prod(const S& a, const S& b) {
    if constexpr (std::is_same_v<S, std::complex<double>>)
        return (a * std::conj(b)).real();
    else
        return static_cast<double>(a) * static_cast<double>(b);
}

template <typename S>
S with_phase(const S& v, const std::complex<double>& ph) {
    if constexpr (std::is_same_v<S, std::complex<double>>)
        return v * ph;
    else
        return static_cast<S>(v * ph.real());
}

} // namespace

void BoundarySpec::validate() const {
    auto is_bloch = [&](Face f) { return face(f) == BcKind::BlochPeriodic; };
    if (is_bloch(Face::XLo) != is_bloch(Face::XHi))
        throw ConfigError("Bloch boundaries must pair on opposing x faces");
    if (is_bloch(Face::YLo) != is_bloch(Face::YHi))
        throw ConfigError("Bloch boundaries must pair on opposing y faces");
    if (is_bloch(Face::ZLo) || is_bloch(Face::ZHi))
        throw ConfigError("Bloch boundaries are not supported on z faces");
    if (std::abs(std::abs(bloch_phase_x) - 1.0) > 1e-9 ||
        std::abs(std::abs(bloch_phase_y) - 1.0) > 1e-9)
        throw ConfigError("Bloch phase must be a complex unit");
    if (absorber_thickness < 0)
        throw ConfigError("absorber thickness must be non-negative");
}

BoundarySpec BoundarySpec::all_absorbing(int thickness) {
    BoundarySpec b;
    b.absorber_thickness = thickness;
    return b;
}

BoundarySpec BoundarySpec::half_space_te(int thickness) {
    BoundarySpec b = all_absorbing(thickness);
    b.set_face(Face::ZLo, BcKind::EvenMirror);
    return b;
}

BoundarySpec BoundarySpec::closed_box() {
    BoundarySpec b;
    b.faces.fill(BcKind::Pec);
    b.absorber_thickness = 0;
    return b;
}

template <typename S>
double FieldState<S>::max_abs_e() const {
    double m = 0.0;
    for (const auto* f : {&ex, &ey, &ez})
        for (const auto& v : f->a.raw()) {
            const double av = abs_val(v);
            if (std::isnan(av))
                return av; // propagate so overflow trips the blow-up check
            m = std::max(m, av);
        }
    return m;
}

std::vector<Injection> dipole_injections(int nx, int ny, int kz, Component comp,
                                         Parity parity_x, Parity parity_y) {
    if (comp != Component::Ex && comp != Component::Ey)
        throw ConfigError("dipole injections drive Ex or Ey");
    // Along the component's own axis samples sit at half-integers: use the
    // centered pair. Along the other axis they sit on integers: the center
    // sample for even parity, an antisymmetric pair for odd.
    const bool is_ex = comp == Component::Ex;
    const int nu = is_ex ? nx : ny; // half-sample axis
    const int nv = is_ex ? ny : nx; // integer-sample axis
    const Parity pu = is_ex ? parity_x : parity_y;
    const Parity pv = is_ex ? parity_y : parity_x;

    std::vector<std::pair<int, double>> us, vs;
    if (pu == Parity::Even)
        us = {{nu / 2 - 1, 1.0}, {nu / 2, 1.0}};
    else
        us = {{nu / 2 - 1, -1.0}, {nu / 2, 1.0}};
    if (pv == Parity::Even)
        vs = {{nv / 2, 1.0}};
    else
        vs = {{nv / 2 - 1, -1.0}, {nv / 2 + 1, 1.0}};

    std::vector<Injection> pts;
    for (auto [u, wu] : us)
        for (auto [v, wv] : vs) {
            Injection p;
            p.comp = comp;
            p.i = is_ex ? u : v;
            p.j = is_ex ? v : u;
            p.k = kz;
            p.weight = wu * wv;
            pts.push_back(p);
        }
    return pts;
}

SourceSpec excite_dipole_mode(Component comp, Parity parity_x, Parity parity_y) {
    SourceSpec s;
    s.kind = SourceSpec::Kind::InitialField;
    s.comp = comp;
    s.parity_x = parity_x;
    s.parity_y = parity_y;
    return s;
}

template <typename S>
Simulation<S>::Simulation(const PermittivityGrid& grid, BoundarySpec bounds,
                          double courant)
    : grid_(&grid), bounds_(bounds),
      nx_(grid.nx()), ny_(grid.ny()), nz_(grid.nz()) {
    bounds_.validate();
    if (courant <= 0.0 || courant > 1.0)
        throw ConfigError("Courant factor must lie in (0, 1]");
    if constexpr (!std::is_same_v<S, std::complex<double>>) {
        if (std::abs(bounds_.bloch_phase_x.imag()) > 1e-12 ||
            std::abs(bounds_.bloch_phase_y.imag()) > 1e-12)
            throw ConfigError("complex Bloch phases require a complex-field simulation");
    }
    dt_ = courant / kSqrt3;
    build_coefficients(courant);
}

template <typename S>
double Simulation<S>::eps_at(Component c, int i, int j, int k) const {
    const auto& eps = grid_->eps;
    const bool wrap_x = bounds_.face(Face::XLo) == BcKind::BlochPeriodic;
    const bool wrap_y = bounds_.face(Face::YLo) == BcKind::BlochPeriodic;
    auto cell = [&](int v, int n, bool wrap) {
        if (wrap)
            return ((v % n) + n) % n;
        return std::clamp(v, 0, n - 1);
    };
    auto cx = [&](int v) { return cell(v, nx_, wrap_x); };
    auto cy = [&](int v) { return cell(v, ny_, wrap_y); };
    auto cz = [&](int v) { return std::clamp(v, 0, nz_ - 1); };

    double s = 0.0;
    switch (c) {
    case Component::Ex:
        for (int dj : {-1, 0})
            for (int dk : {-1, 0})
                s += eps(cx(i), cy(j + dj), cz(k + dk));
        break;
    case Component::Ey:
        for (int di : {-1, 0})
            for (int dk : {-1, 0})
                s += eps(cx(i + di), cy(j), cz(k + dk));
        break;
    case Component::Ez:
        for (int di : {-1, 0})
            for (int dj : {-1, 0})
                s += eps(cx(i + di), cy(j + dj), cz(k));
        break;
    default:
        return 1.0; // H samples see vacuum permeability
    }
    return s / 4.0;
}

template <typename S>
void Simulation<S>::build_coefficients(double) {
    const int T = bounds_.absorber_thickness;
    const int m = bounds_.grading;
    const double smax = bounds_.sigma_max;

    auto absorbing = [&](Face f) { return bounds_.face(f) == BcKind::Absorbing; };
    // sigma at continuous coordinate u along an axis of n cells
    auto sigma_axis = [&](double u, int n, Face lo, Face hi) {
        double s = 0.0;
        if (T > 0) {
            if (absorbing(lo) && u < T)
                s += smax * std::pow((T - u) / T, m);
            if (absorbing(hi) && u > n - T)
                s += smax * std::pow((u - (n - T)) / T, m);
        }
        return s;
    };
    auto sig = [&](double x, double y, double z) {
        return sigma_axis(x, nx_, Face::XLo, Face::XHi) +
               sigma_axis(y, ny_, Face::YLo, Face::YHi) +
               sigma_axis(z, nz_, Face::ZLo, Face::ZHi);
    };

    struct Layout {
        Component c;
        int nx, ny, nz;
        double ox, oy, oz; // sample offsets
    };
    const Layout layouts[6] = {
        {Component::Ex, nx_, ny_ + 1, nz_ + 1, 0.5, 0.0, 0.0},
        {Component::Ey, nx_ + 1, ny_, nz_ + 1, 0.0, 0.5, 0.0},
        {Component::Ez, nx_ + 1, ny_ + 1, nz_, 0.0, 0.0, 0.5},
        {Component::Hx, nx_ + 1, ny_, nz_, 0.0, 0.5, 0.5},
        {Component::Hy, nx_, ny_ + 1, nz_, 0.5, 0.0, 0.5},
        {Component::Hz, nx_, ny_, nz_ + 1, 0.5, 0.5, 0.0},
    };

    for (int c = 0; c < 6; ++c) {
        const auto& L = layouts[c];
        ca_[c] = Field3<Real>(L.nx, L.ny, L.nz);
        cb_[c] = Field3<Real>(L.nx, L.ny, L.nz);
        const bool is_e = c < 3;
        for (int i = 0; i < L.nx; ++i)
            for (int j = 0; j < L.ny; ++j)
                for (int k = 0; k < L.nz; ++k) {
                    const double s = sig(i + L.ox, j + L.oy, k + L.oz);
                    const double denom = 1.0 + s * dt_ / 2.0;
                    const double eps =
                        is_e ? eps_at(L.c, i, j, k) : 1.0;
                    ca_[c](i, j, k) = static_cast<Real>((1.0 - s * dt_ / 2.0) / denom);
                    cb_[c](i, j, k) = static_cast<Real>(dt_ / eps / denom);
                }
    }
}

template <typename S>
FieldState<S> Simulation<S>::make_state() const {
    return FieldState<S>(nx_, ny_, nz_, dt_);
}

template <typename S>
void Simulation<S>::fill_h_ghosts(FieldState<S>& f) const {
    const auto phx = bounds_.bloch_phase_x;
    const auto phy = bounds_.bloch_phase_y;

    // x faces: ghosts for Hy, Hz at i = -1 and i = nx
    switch (bounds_.face(Face::XLo)) {
    case BcKind::EvenMirror:
        for (int j = 0; j <= ny_; ++j)
            for (int k = 0; k < nz_; ++k)
                f.hy(-1, j, k) = -f.hy(0, j, k);
        for (int j = 0; j < ny_; ++j)
            for (int k = 0; k <= nz_; ++k)
                f.hz(-1, j, k) = -f.hz(0, j, k);
        break;
    case BcKind::BlochPeriodic:
        for (int j = 0; j <= ny_; ++j)
            for (int k = 0; k < nz_; ++k) {
                f.hy(-1, j, k) = with_phase(f.hy(nx_ - 1, j, k), std::conj(phx));
                f.hy(nx_, j, k) = with_phase(f.hy(0, j, k), phx);
            }
        for (int j = 0; j < ny_; ++j)
            for (int k = 0; k <= nz_; ++k) {
                f.hz(-1, j, k) = with_phase(f.hz(nx_ - 1, j, k), std::conj(phx));
                f.hz(nx_, j, k) = with_phase(f.hz(0, j, k), phx);
            }
        break;
    default:
        break;
    }
    if (bounds_.face(Face::XHi) == BcKind::EvenMirror) {
        for (int j = 0; j <= ny_; ++j)
            for (int k = 0; k < nz_; ++k)
                f.hy(nx_, j, k) = -f.hy(nx_ - 1, j, k);
        for (int j = 0; j < ny_; ++j)
            for (int k = 0; k <= nz_; ++k)
                f.hz(nx_, j, k) = -f.hz(nx_ - 1, j, k);
    }

    // y faces: ghosts for Hx, Hz at j = -1 and j = ny
    switch (bounds_.face(Face::YLo)) {
    case BcKind::EvenMirror:
        for (int i = 0; i <= nx_; ++i)
            for (int k = 0; k < nz_; ++k)
                f.hx(i, -1, k) = -f.hx(i, 0, k);
        for (int i = 0; i < nx_; ++i)
            for (int k = 0; k <= nz_; ++k)
                f.hz(i, -1, k) = -f.hz(i, 0, k);
        break;
    case BcKind::BlochPeriodic:
        for (int i = 0; i <= nx_; ++i)
            for (int k = 0; k < nz_; ++k) {
                f.hx(i, -1, k) = with_phase(f.hx(i, ny_ - 1, k), std::conj(phy));
                f.hx(i, ny_, k) = with_phase(f.hx(i, 0, k), phy);
            }
        for (int i = 0; i < nx_; ++i)
            for (int k = 0; k <= nz_; ++k) {
                f.hz(i, -1, k) = with_phase(f.hz(i, ny_ - 1, k), std::conj(phy));
                f.hz(i, ny_, k) = with_phase(f.hz(i, 0, k), phy);
            }
        break;
    default:
        break;
    }
    if (bounds_.face(Face::YHi) == BcKind::EvenMirror) {
        for (int i = 0; i <= nx_; ++i)
            for (int k = 0; k < nz_; ++k)
                f.hx(i, ny_, k) = -f.hx(i, ny_ - 1, k);
        for (int i = 0; i < nx_; ++i)
            for (int k = 0; k <= nz_; ++k)
                f.hz(i, ny_, k) = -f.hz(i, ny_ - 1, k);
    }

    // z faces: ghosts for Hx, Hy at k = -1 and k = nz
    if (bounds_.face(Face::ZLo) == BcKind::EvenMirror) {
        for (int i = 0; i <= nx_; ++i)
            for (int j = 0; j < ny_; ++j)
                f.hx(i, j, -1) = -f.hx(i, j, 0);
        for (int i = 0; i < nx_; ++i)
            for (int j = 0; j <= ny_; ++j)
                f.hy(i, j, -1) = -f.hy(i, j, 0);
    }
    if (bounds_.face(Face::ZHi) == BcKind::EvenMirror) {
        for (int i = 0; i <= nx_; ++i)
            for (int j = 0; j < ny_; ++j)
                f.hx(i, j, nz_) = -f.hx(i, j, nz_ - 1);
        for (int i = 0; i < nx_; ++i)
            for (int j = 0; j <= ny_; ++j)
                f.hy(i, j, nz_) = -f.hy(i, j, nz_ - 1);
    }
}

template <typename S>
void Simulation<S>::clamp_tangential_e(FieldState<S>& f) const {
    auto clamped = [&](Face face) {
        const BcKind k = bounds_.face(face);
        return k == BcKind::Pec || k == BcKind::Absorbing;
    };
    if (clamped(Face::XLo) || clamped(Face::XHi)) {
        for (int pass = 0; pass < 2; ++pass) {
            const Face face = pass == 0 ? Face::XLo : Face::XHi;
            if (!clamped(face))
                continue;
            const int i = pass == 0 ? 0 : nx_;
            for (int j = 0; j < ny_; ++j)
                for (int k = 0; k <= nz_; ++k)
                    f.ey(i, j, k) = S{};
            for (int j = 0; j <= ny_; ++j)
                for (int k = 0; k < nz_; ++k)
                    f.ez(i, j, k) = S{};
        }
    }
    if (clamped(Face::YLo) || clamped(Face::YHi)) {
        for (int pass = 0; pass < 2; ++pass) {
            const Face face = pass == 0 ? Face::YLo : Face::YHi;
            if (!clamped(face))
                continue;
            const int j = pass == 0 ? 0 : ny_;
            for (int i = 0; i < nx_; ++i)
                for (int k = 0; k <= nz_; ++k)
                    f.ex(i, j, k) = S{};
            for (int i = 0; i <= nx_; ++i)
                for (int k = 0; k < nz_; ++k)
                    f.ez(i, j, k) = S{};
        }
    }
    if (clamped(Face::ZLo) || clamped(Face::ZHi)) {
        for (int pass = 0; pass < 2; ++pass) {
            const Face face = pass == 0 ? Face::ZLo : Face::ZHi;
            if (!clamped(face))
                continue;
            const int k = pass == 0 ? 0 : nz_;
            for (int i = 0; i < nx_; ++i)
                for (int j = 0; j <= ny_; ++j)
                    f.ex(i, j, k) = S{};
            for (int i = 0; i <= nx_; ++i)
                for (int j = 0; j < ny_; ++j)
                    f.ey(i, j, k) = S{};
        }
    }
}

template <typename S>
void Simulation<S>::update_e(FieldState<S>& f) const {
    const int nx = nx_, ny = ny_, nz = nz_;

    // Ex(i,j,k) += cb [ dHz/dy - dHy/dz ]
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j <= ny; ++j) {
            S* ex = &f.ex(i, j, 0);
            const S* hz0 = &f.hz(i, j, 0);
            const S* hzm = &f.hz(i, j - 1, 0);
            const S* hy0 = &f.hy(i, j, 0);
            const Real* ca = &ca_[0](i, j, 0);
            const Real* cb = &cb_[0](i, j, 0);
            for (int k = 0; k <= nz; ++k)
                ex[k] = ca[k] * ex[k] +
                        cb[k] * ((hz0[k] - hzm[k]) - (hy0[k] - hy0[k - 1]));
        }
    // Ey(i,j,k) += cb [ dHx/dz - dHz/dx ]
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j < ny; ++j) {
            S* ey = &f.ey(i, j, 0);
            const S* hx0 = &f.hx(i, j, 0);
            const S* hz0 = &f.hz(i, j, 0);
            const S* hzm = &f.hz(i - 1, j, 0);
            const Real* ca = &ca_[1](i, j, 0);
            const Real* cb = &cb_[1](i, j, 0);
            for (int k = 0; k <= nz; ++k)
                ey[k] = ca[k] * ey[k] +
                        cb[k] * ((hx0[k] - hx0[k - 1]) - (hz0[k] - hzm[k]));
        }
    // Ez(i,j,k) += cb [ dHy/dx - dHx/dy ]
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j) {
            S* ez = &f.ez(i, j, 0);
            const S* hy0 = &f.hy(i, j, 0);
            const S* hym = &f.hy(i - 1, j, 0);
            const S* hx0 = &f.hx(i, j, 0);
            const S* hxm = &f.hx(i, j - 1, 0);
            const Real* ca = &ca_[2](i, j, 0);
            const Real* cb = &cb_[2](i, j, 0);
            for (int k = 0; k < nz; ++k)
                ez[k] = ca[k] * ez[k] +
                        cb[k] * ((hy0[k] - hym[k]) - (hx0[k] - hxm[k]));
        }
}

template <typename S>
void Simulation<S>::update_h(FieldState<S>& f) const {
    const int nx = nx_, ny = ny_, nz = nz_;

    // Hx(i,j,k) += cb [ dEy/dz - dEz/dy ]
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j < ny; ++j) {
            S* hx = &f.hx(i, j, 0);
            const S* ey = &f.ey(i, j, 0);
            const S* ez0 = &f.ez(i, j, 0);
            const S* ezp = &f.ez(i, j + 1, 0);
            const Real* ca = &ca_[3](i, j, 0);
            const Real* cb = &cb_[3](i, j, 0);
            for (int k = 0; k < nz; ++k)
                hx[k] = ca[k] * hx[k] +
                        cb[k] * ((ey[k + 1] - ey[k]) - (ezp[k] - ez0[k]));
        }
    // Hy(i,j,k) += cb [ dEz/dx - dEx/dz ]
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j <= ny; ++j) {
            S* hy = &f.hy(i, j, 0);
            const S* ez0 = &f.ez(i, j, 0);
            const S* ezp = &f.ez(i + 1, j, 0);
            const S* ex = &f.ex(i, j, 0);
            const Real* ca = &ca_[4](i, j, 0);
            const Real* cb = &cb_[4](i, j, 0);
            for (int k = 0; k < nz; ++k)
                hy[k] = ca[k] * hy[k] +
                        cb[k] * ((ezp[k] - ez0[k]) - (ex[k + 1] - ex[k]));
        }
    // Hz(i,j,k) += cb [ dEx/dy - dEy/dx ]
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            S* hz = &f.hz(i, j, 0);
            const S* ex0 = &f.ex(i, j, 0);
            const S* exp_ = &f.ex(i, j + 1, 0);
            const S* ey0 = &f.ey(i, j, 0);
            const S* eyp = &f.ey(i + 1, j, 0);
            const Real* ca = &ca_[5](i, j, 0);
            const Real* cb = &cb_[5](i, j, 0);
            for (int k = 0; k <= nz; ++k)
                hz[k] = ca[k] * hz[k] +
                        cb[k] * ((exp_[k] - ex0[k]) - (eyp[k] - ey0[k]));
        }
}

template <typename S>
void Simulation<S>::inject(FieldState<S>& f) const {
    if (drive_.points.empty())
        return;
    const double t = f.step * dt_ + dt_;
    if (drive_.finished(t))
        return;
    const double g = drive_.value(t);
    for (const auto& p : drive_.points) {
        Field3<S>* arr = nullptr;
        switch (p.comp) {
        case Component::Ex: arr = &f.ex; break;
        case Component::Ey: arr = &f.ey; break;
        case Component::Ez: arr = &f.ez; break;
        case Component::Hx: arr = &f.hx; break;
        case Component::Hy: arr = &f.hy; break;
        case Component::Hz: arr = &f.hz; break;
        }
        (*arr)(p.i, p.j, p.k) += static_cast<Real>(p.weight * g * dt_);
    }
}

template <typename S>
void Simulation<S>::step(FieldState<S>& f) {
    fill_h_ghosts(f);
    update_e(f);
    clamp_tangential_e(f);
    inject(f);
    update_h(f);
    ++f.step;
    for (auto* m : monitors_)
        m->on_step(*this, f);
}

template <typename S>
void Simulation<S>::run(FieldState<S>& f, long steps) {
    const long check_every = 128;
    for (long n = 0; n < steps; ++n) {
        step(f);
        if (f.step % check_every == 0) {
            const double m = f.max_abs_e();
            if (!(m < 1e6 * instability_reference))
                throw InstabilityError("field amplitude blew past 1e6 x reference",
                                       f.step);
        }
    }
}

template <typename S>
void Simulation<S>::apply_source(FieldState<S>& f, const SourceSpec& src) const {
    const double xc = nx_ / 2.0, yc = ny_ / 2.0;
    const double zc = (bounds_.face(Face::ZLo) == BcKind::EvenMirror)
                          ? 0.0
                          : grid_->z_mid;
    auto par = [](Parity p, double u) {
        return p == Parity::Even ? 1.0 : u;
    };

    if (src.kind == SourceSpec::Kind::InitialField) {
        const double s2 = 2.0 * src.seed_sigma * src.seed_sigma;
        auto seed = [&](Field3<S>& arr, double ox, double oy, double oz,
                        int mx, int my, int mz) {
            for (int i = 0; i < mx; ++i)
                for (int j = 0; j < my; ++j)
                    for (int k = 0; k < mz; ++k) {
                        const double x = i + ox - xc;
                        const double y = j + oy - yc;
                        const double z = k + oz - zc;
                        const double g = std::exp(-(x * x + y * y + z * z) / s2);
                        arr(i, j, k) += static_cast<Real>(
                            src.amplitude * g * par(src.parity_x, x) *
                            par(src.parity_y, y));
                    }
        };
        switch (src.comp) {
        case Component::Ex: seed(f.ex, 0.5, 0.0, 0.0, nx_, ny_ + 1, nz_ + 1); break;
        case Component::Ey: seed(f.ey, 0.0, 0.5, 0.0, nx_ + 1, ny_, nz_ + 1); break;
        case Component::Ez: seed(f.ez, 0.0, 0.0, 0.5, nx_ + 1, ny_ + 1, nz_); break;
        default:
            throw ConfigError("initial-field source must drive an E component");
        }
        return;
    }
    throw ConfigError("use make_dipole_drive + set_drive for point dipoles");
}

template <typename S>
void PointProbe<S>::on_step(const Simulation<S>&, const FieldState<S>& f) {
    const Field3<S>* arr = nullptr;
    switch (comp) {
    case Component::Ex: arr = &f.ex; break;
    case Component::Ey: arr = &f.ey; break;
    case Component::Ez: arr = &f.ez; break;
    case Component::Hx: arr = &f.hx; break;
    case Component::Hy: arr = &f.hy; break;
    case Component::Hz: arr = &f.hz; break;
    }
    series.push_back((*arr)(i, j, k));
}

template <typename S>
void FluxMonitor<S>::on_step(const Simulation<S>&, const FieldState<S>& f) {
    // Gather the two tangential E and interpolated H fields on the plane.
    const int n0 = hi[0] - lo[0], n1 = hi[1] - lo[1];
    std::vector<double> e1(n0 * n1), e2(n0 * n1), h1(n0 * n1), h2(n0 * n1);
    // S_axis = E1 * H2' - E2 * H1' where (axis, 1, 2) cyclic.
    for (int u = 0; u < n0; ++u)
        for (int v = 0; v < n1; ++v) {
            const int a = lo[0] + u, b = lo[1] + v, idx = u * n1 + v;
            if (axis == 2) { // z plane: Sz = Ex Hy - Ey Hx
                e1[idx] = re_prod(f.ex(a, b, plane), S{1});
                e2[idx] = re_prod(f.ey(a, b, plane), S{1});
                h2[idx] = 0.5 * (re_prod(f.hy(a, b, plane), S{1}) +
                                 re_prod(f.hy(a, b, plane - 1), S{1}));
                h1[idx] = 0.5 * (re_prod(f.hx(a, b, plane), S{1}) +
                                 re_prod(f.hx(a, b, plane - 1), S{1}));
            } else if (axis == 0) { // x plane: Sx = Ey Hz - Ez Hy
                e1[idx] = re_prod(f.ey(plane, a, b), S{1});
                e2[idx] = re_prod(f.ez(plane, a, b), S{1});
                h2[idx] = 0.5 * (re_prod(f.hz(plane, a, b), S{1}) +
                                 re_prod(f.hz(plane - 1, a, b), S{1}));
                h1[idx] = 0.5 * (re_prod(f.hy(plane, a, b), S{1}) +
                                 re_prod(f.hy(plane - 1, a, b), S{1}));
            } else { // y plane: Sy = Ez Hx - Ex Hz
                e1[idx] = re_prod(f.ez(a, plane, b), S{1});
                e2[idx] = re_prod(f.ex(a, plane, b), S{1});
                h2[idx] = 0.5 * (re_prod(f.hx(a, plane, b), S{1}) +
                                 re_prod(f.hx(a, plane - 1, b), S{1}));
                h1[idx] = 0.5 * (re_prod(f.hz(a, plane, b), S{1}) +
                                 re_prod(f.hz(a, plane - 1, b), S{1}));
            }
        }
    if (primed_) {
        double s = 0.0;
        for (int idx = 0; idx < n0 * n1; ++idx)
            s += e1[idx] * 0.5 * (h2[idx] + h2_prev_[idx]) -
                 e2[idx] * 0.5 * (h1[idx] + h1_prev_[idx]);
        series.push_back(s);
    }
    h1_prev_ = std::move(h1);
    h2_prev_ = std::move(h2);
    primed_ = true;
}

template <typename S>
double FluxMonitor<S>::mean(long from_step, long to_step) const {
    // series[n] corresponds to step n+2 (first recorded after priming)
    double s = 0.0;
    long count = 0;
    for (long step = from_step; step < to_step; ++step) {
        const long idx = step - 2;
        if (idx >= 0 && idx < static_cast<long>(series.size())) {
            s += series[idx];
            ++count;
        }
    }
    return count > 0 ? s / count : 0.0;
}

template <typename S>
void EnergyMonitor<S>::on_step(const Simulation<S>& sim, const FieldState<S>& f) {
    double we = 0.0, wh = 0.0;
    for (int i = lo[0]; i < hi[0]; ++i)
        for (int j = lo[1]; j < hi[1]; ++j)
            for (int k = lo[2]; k < hi[2]; ++k) {
                we += sim.eps_at(Component::Ex, i, j, k) * re_prod(f.ex(i, j, k), f.ex(i, j, k));
                we += sim.eps_at(Component::Ey, i, j, k) * re_prod(f.ey(i, j, k), f.ey(i, j, k));
                we += sim.eps_at(Component::Ez, i, j, k) * re_prod(f.ez(i, j, k), f.ez(i, j, k));
                wh += re_prod(f.hx(i, j, k), f.hx(i, j, k));
                wh += re_prod(f.hy(i, j, k), f.hy(i, j, k));
                wh += re_prod(f.hz(i, j, k), f.hz(i, j, k));
            }
    series.push_back(0.5 * (we + wh));
}

template <typename S>
double EnergyMonitor<S>::mean(long from_step, long to_step) const {
    double s = 0.0;
    long count = 0;
    for (long step = from_step; step < to_step; ++step) {
        const long idx = step - 1;
        if (idx >= 0 && idx < static_cast<long>(series.size())) {
            s += series[idx];
            ++count;
        }
    }
    return count > 0 ? s / count : 0.0;
}

template <typename S>
void ConservedEnergyMonitor<S>::on_step(const Simulation<S>& sim,
                                        const FieldState<S>& f) {
    if (!primed_) {
        prev_ = f;
        primed_ = true;
        return;
    }
    double we = 0.0, wh = 0.0;
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j < f.ny; ++j)
            for (int k = 0; k < f.nz; ++k) {
                we += sim.eps_at(Component::Ex, i, j, k) * re_prod(f.ex(i, j, k), f.ex(i, j, k));
                we += sim.eps_at(Component::Ey, i, j, k) * re_prod(f.ey(i, j, k), f.ey(i, j, k));
                we += sim.eps_at(Component::Ez, i, j, k) * re_prod(f.ez(i, j, k), f.ez(i, j, k));
                wh += re_prod(f.hx(i, j, k), prev_.hx(i, j, k));
                wh += re_prod(f.hy(i, j, k), prev_.hy(i, j, k));
                wh += re_prod(f.hz(i, j, k), prev_.hz(i, j, k));
            }
    series.push_back(0.5 * (we + wh));
    prev_ = f;
}

template <typename S>
void VolumePhasor<S>::on_step(const Simulation<S>&, const FieldState<S>& f) {
    if (f.step < start || f.step >= start + count)
        return;
    if (ex.size() == 0) {
        ex = Array3<std::complex<double>>(f.nx, f.ny + 1, f.nz + 1);
        ey = Array3<std::complex<double>>(f.nx + 1, f.ny, f.nz + 1);
        ez = Array3<std::complex<double>>(f.nx + 1, f.ny + 1, f.nz);
    }
    const double t = f.step * f.dt;
    const std::complex<double> w =
        std::polar(2.0 / static_cast<double>(count), -omega * t);
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j <= f.ny; ++j)
            for (int k = 0; k <= f.nz; ++k)
                ex(i, j, k) += w * to_complex(f.ex(i, j, k));
    for (int i = 0; i <= f.nx; ++i)
        for (int j = 0; j < f.ny; ++j)
            for (int k = 0; k <= f.nz; ++k)
                ey(i, j, k) += w * to_complex(f.ey(i, j, k));
    for (int i = 0; i <= f.nx; ++i)
        for (int j = 0; j <= f.ny; ++j)
            for (int k = 0; k < f.nz; ++k)
                ez(i, j, k) += w * to_complex(f.ez(i, j, k));
}

template <typename S>
void PlanePhasor<S>::on_step(const Simulation<S>&, const FieldState<S>& f) {
    if (f.step < start || f.step >= start + count)
        return;
    if (ex.empty()) {
        nx = f.nx;
        ny = f.ny;
        ex.assign(static_cast<std::size_t>(nx) * (ny + 1), {});
        ey.assign(static_cast<std::size_t>(nx + 1) * ny, {});
        hx.assign(static_cast<std::size_t>(nx + 1) * ny, {});
        hy.assign(static_cast<std::size_t>(nx) * (ny + 1), {});
    }
    const double t = f.step * f.dt;
    const double norm = 2.0 / static_cast<double>(count);
    const std::complex<double> we = std::polar(norm, -omega * t);
    const std::complex<double> wh = std::polar(norm, -omega * (t + f.dt / 2.0));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j <= ny; ++j) {
            ex[i * (ny + 1) + j] += we * to_complex(f.ex(i, j, plane));
            hy[i * (ny + 1) + j] +=
                wh * 0.5 *
                (to_complex(f.hy(i, j, plane)) + to_complex(f.hy(i, j, plane - 1)));
        }
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j < ny; ++j) {
            ey[i * ny + j] += we * to_complex(f.ey(i, j, plane));
            hx[i * ny + j] +=
                wh * 0.5 *
                (to_complex(f.hx(i, j, plane)) + to_complex(f.hx(i, j, plane - 1)));
        }
}

namespace {

template <typename S>
Array3<float> field_to_grid(const Field3<S>& f, int nx, int ny, int nz) {
    Array3<float> g(nx, ny, nz);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                if constexpr (std::is_same_v<S, std::complex<double>>)
                    g(i, j, k) = static_cast<float>(f(i, j, k).real());
                else
                    g(i, j, k) = static_cast<float>(f(i, j, k));
            }
    return g;
}

template <typename S>
void grid_to_field(const Array3<float>& g, Field3<S>& f) {
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j)
            for (int k = 0; k < g.nz(); ++k)
                f(i, j, k) = static_cast<S>(g(i, j, k));
}

} // namespace

template <typename S>
void dump_fields(const FieldState<S>& f, const std::string& prefix) {
    export_grid(field_to_grid(f.ex, f.nx, f.ny + 1, f.nz + 1), prefix + "_ex.bin");
    export_grid(field_to_grid(f.ey, f.nx + 1, f.ny, f.nz + 1), prefix + "_ey.bin");
    export_grid(field_to_grid(f.ez, f.nx + 1, f.ny + 1, f.nz), prefix + "_ez.bin");
    export_grid(field_to_grid(f.hx, f.nx + 1, f.ny, f.nz), prefix + "_hx.bin");
    export_grid(field_to_grid(f.hy, f.nx, f.ny + 1, f.nz), prefix + "_hy.bin");
    export_grid(field_to_grid(f.hz, f.nx, f.ny, f.nz + 1), prefix + "_hz.bin");
}

template <typename S>
void restore_fields(FieldState<S>& f, const std::string& prefix) {
    grid_to_field(import_grid(prefix + "_ex.bin"), f.ex);
    grid_to_field(import_grid(prefix + "_ey.bin"), f.ey);
    grid_to_field(import_grid(prefix + "_ez.bin"), f.ez);
    grid_to_field(import_grid(prefix + "_hx.bin"), f.hx);
    grid_to_field(import_grid(prefix + "_hy.bin"), f.hy);
    grid_to_field(import_grid(prefix + "_hz.bin"), f.hz);
}

template struct FieldState<float>;
template struct FieldState<double>;
template struct FieldState<std::complex<double>>;
template class Simulation<float>;
template class Simulation<double>;
template class Simulation<std::complex<double>>;
template class PointProbe<float>;
template class PointProbe<double>;
template class PointProbe<std::complex<double>>;
template class FluxMonitor<float>;
template class FluxMonitor<double>;
template class EnergyMonitor<float>;
template class EnergyMonitor<double>;
template class EnergyMonitor<std::complex<double>>;
template class ConservedEnergyMonitor<float>;
template class ConservedEnergyMonitor<double>;
template class VolumePhasor<float>;
template class VolumePhasor<double>;
template class PlanePhasor<float>;
template class PlanePhasor<double>;
template void dump_fields<float>(const FieldState<float>&, const std::string&);
template void dump_fields<double>(const FieldState<double>&, const std::string&);
template void restore_fields<float>(FieldState<float>&, const std::string&);
template void restore_fields<double>(FieldState<double>&, const std::string&);

} // namespace pcmc
