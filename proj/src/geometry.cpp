#include "pcmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "pcmc/errors.hpp"

namespace pcmc {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kPosTol = 1e-6; // lattice positions are exact multiples

double clamp(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

} // namespace

void PhotonicCrystalSpec::validate() const {
    if (!(r_over_a > 0.0 && r_over_a < 0.5))
        throw GeometryError("r_over_a must be in (0, 0.5): holes must not overlap");
    if (!(n_slab > 1.0))
        throw GeometryError("n_slab must exceed 1");
    if (num_layers < 1)
        throw GeometryError("num_layers must be >= 1");
    if (a < 10)
        throw GeometryError("lattice constant below the 10-cell resolution floor");
    if (!(d_over_a > 0.0))
        throw GeometryError("d_over_a must be positive");
}

bool Hole::contains(double x, double y) const {
    // Distance to the cap segment (at most one of elong_x/elong_y nonzero).
    double dx = x - cx, dy = y - cy;
    if (elong_x > 0.0)
        dx = dx - clamp(dx, -elong_x, elong_x);
    if (elong_y > 0.0)
        dy = dy - clamp(dy, -elong_y, elong_y);
    return dx * dx + dy * dy <= radius * radius;
}

HoleSet build_lattice(const PhotonicCrystalSpec& spec) {
    spec.validate();
    const double a = spec.a;
    const double r = spec.hole_radius();
    const int L = spec.num_layers;

    const double extent = (L + 1.5) * a;
    if (2.0 * extent > kMaxGridExtent)
        throw GeometryError("lattice extent exceeds the maximum grid size");

    HoleSet set;
    for (int i = -L; i <= L; ++i) {
        for (int j = -L; j <= L; ++j) {
            const int ring = (std::abs(i) + std::abs(j) + std::abs(i + j)) / 2;
            if (ring > L)
                continue;
            Hole h;
            h.cx = (i + 0.5 * j) * a;
            h.cy = j * (kSqrt3 / 2.0) * a;
            h.radius = r;
            h.is_defect = (ring == 0);
            set.holes.push_back(h);
        }
    }
    return set;
}

namespace {

Hole* central_hole(HoleSet& set) {
    for (auto& h : set.holes)
        if (std::abs(h.cx) < kPosTol && std::abs(h.cy) < kPosTol)
            return &h;
    throw GeometryError("lattice has no central hole");
}

/// Elongate holes whose perpendicular coordinate is ~level by p/2 each way
/// and translate everything farther out by p/2. `axis` names the line the
/// affected holes sit on; elongation is perpendicular to it.
void dislocate_line(HoleSet& set, Axis axis, double level, double p) {
    for (auto& h : set.holes) {
        double& perp = (axis == Axis::X) ? h.cy : h.cx;
        double& elong = (axis == Axis::X) ? h.elong_y : h.elong_x;
        const double rel = perp - level;
        if (std::abs(rel) < kPosTol)
            elong += p / 2.0;
        else if (rel > 0.0)
            perp += p / 2.0;
        else
            perp -= p / 2.0;
    }
}

void check_overlaps(const HoleSet& set) {
    const auto& hs = set.holes;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        for (std::size_t j = i + 1; j < hs.size(); ++j) {
            const double dx = hs[i].cx - hs[j].cx;
            const double dy = hs[i].cy - hs[j].cy;
            const double sx = hs[i].semi_x() + hs[j].semi_x();
            const double sy = hs[i].semi_y() + hs[j].semi_y();
            const double q = (dx / sx) * (dx / sx) + (dy / sy) * (dy / sy);
            if (q < 1.0 - 1e-12)
                throw GeometryError("holes overlap after defect transformation");
        }
    }
}

} // namespace

HoleSet apply_defect(const HoleSet& holes, const DefectSpec& defect,
                     const PhotonicCrystalSpec& spec) {
    const double a = spec.a;
    const double r = spec.hole_radius();
    HoleSet out = holes;

    if (const auto* d = std::get_if<IndexChange>(&defect)) {
        if (d->n_defect < 1.0 || d->n_defect > spec.n_slab)
            throw GeometryError("n_defect outside [1, n_slab] (donor regime)");
        central_hole(out)->n_override = d->n_defect;
    } else if (const auto* d = std::get_if<RadiusChange>(&defect)) {
        if (d->r_def_over_a < 0.0 || d->r_def_over_a >= spec.r_over_a)
            throw GeometryError("r_def_over_a outside [0, r_over_a) (donor regime)");
        central_hole(out)->radius = d->r_def_over_a * a;
    } else if (const auto* d = std::get_if<FractionalEdgeDislocation>(&defect)) {
        if (d->p < 0.0)
            throw GeometryError("dislocation order p must be >= 0");
        dislocate_line(out, d->axis, 0.0, d->p);
    } else if (const auto* d = std::get_if<FourHoleTuning>(&defect)) {
        if (d->r2_over_a >= spec.r_over_a || d->r1_over_a > spec.r_over_a)
            throw GeometryError("four-hole tuning radii must not exceed r");
        central_hole(out)->radius = d->r2_over_a * a;
        const double r1 = d->r1_over_a * a;
        const double shift = r - r1;
        for (auto& h : out.holes) {
            // The four Gamma-J nearest neighbors sit at (+-a/2, +-sqrt(3)a/2).
            if (std::abs(std::abs(h.cx) - 0.5 * a) < kPosTol &&
                std::abs(std::abs(h.cy) - (kSqrt3 / 2.0) * a) < kPosTol) {
                const double norm = std::hypot(h.cx, h.cy);
                h.radius = r1;
                h.cx += shift * h.cx / norm;
                h.cy += shift * h.cy / norm;
            }
        }
    } else if (const auto* d = std::get_if<CoupledDefects>(&defect)) {
        if (d->r_def_over_a < 0.0 || d->r_def_over_a >= spec.r_over_a)
            throw GeometryError("r_def_over_a outside [0, r_over_a) (donor regime)");
        if (d->p < 0.0)
            throw GeometryError("elongation p must be >= 0");
        // X pair: sites (+-a, 0) around the unperturbed central hole.
        // Y pair: sites (a/2, +-sqrt(3)a/2) on adjacent rows, leaving the two
        // row-0 holes (0,0) and (a,0) between them unperturbed.
        const bool along_x = d->orientation == Axis::X;
        const double line = along_x ? a : kSqrt3 / 2.0 * a;
        auto is_site = [&](const Hole& h) {
            if (along_x)
                return std::abs(h.cy) < kPosTol &&
                       std::abs(std::abs(h.cx) - a) < kPosTol;
            return std::abs(h.cx - 0.5 * a) < kPosTol &&
                   std::abs(std::abs(h.cy) - line) < kPosTol;
        };
        central_hole(out)->is_defect = false;
        int found = 0;
        for (auto& h : out.holes) {
            if (is_site(h)) {
                h.radius = d->r_def_over_a * a;
                h.is_defect = true;
                ++found;
            }
        }
        if (found != 2)
            throw GeometryError("coupled-defect sites not found; lattice too small?");
        if (d->p > 0.0) {
            // Elongate the two lattice lines containing the defects along the
            // orientation axis and keep the region between them rigid.
            for (auto& h : out.holes) {
                const double along = along_x ? h.cx : h.cy;
                double& coord = along_x ? h.cx : h.cy;
                double& elong = along_x ? h.elong_x : h.elong_y;
                if (std::abs(std::abs(along) - line) < kPosTol)
                    elong += d->p / 2.0;
                else if (along > line)
                    coord += d->p / 2.0;
                else if (along < -line)
                    coord -= d->p / 2.0;
            }
        }
    }

    check_overlaps(out);
    return out;
}

namespace {

/// In-plane material permittivity at a point (inside the slab).
double material_eps(const HoleSet& holes, const PhotonicCrystalSpec& spec,
                    double x, double y) {
    for (const auto& h : holes.holes) {
        if (std::abs(x - h.cx) > h.semi_x() || std::abs(y - h.cy) > h.semi_y())
            continue;
        if (h.contains(x, y)) {
            const double n = h.n_override > 0.0 ? h.n_override : 1.0;
            return n * n;
        }
    }
    return spec.n_slab * spec.n_slab;
}

} // namespace

PermittivityGrid rasterize(const HoleSet& holes, const PhotonicCrystalSpec& spec,
                           double pad_xy, double air_z) {
    spec.validate();
    double ext_x = 0.0, ext_y = 0.0;
    for (const auto& h : holes.holes) {
        ext_x = std::max(ext_x, std::abs(h.cx) + h.semi_x());
        ext_y = std::max(ext_y, std::abs(h.cy) + h.semi_y());
    }
    const double d = spec.slab_thickness();
    const int nx = 2 * static_cast<int>(std::ceil(ext_x + pad_xy));
    const int ny = 2 * static_cast<int>(std::ceil(ext_y + pad_xy));
    const int nz = 2 * static_cast<int>(std::ceil(d / 2.0 + air_z));
    if (nx > kMaxGridExtent || ny > kMaxGridExtent || nz > kMaxGridExtent)
        throw GeometryError("rasterized grid exceeds the maximum extent");

    PermittivityGrid grid;
    grid.eps = Array3<float>(nx, ny, nz, 1.0f);
    grid.z_mid = nz / 2.0;
    grid.slab_thickness = d;
    grid.eps_max = spec.n_slab * spec.n_slab;

    const double xc = nx / 2.0, yc = ny / 2.0, zc = nz / 2.0;

    // Hole walls are vertical, so the 2x2x2 subsample average factorizes into
    // an in-plane material average times a slab-overlap fraction per z cell.
    std::vector<double> fz(nz);
    for (int k = 0; k < nz; ++k) {
        double f = 0.0;
        for (double off : {0.25, 0.75}) {
            const double z = k + off - zc;
            if (std::abs(z) < d / 2.0)
                f += 0.5;
        }
        fz[k] = f;
    }

    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            double m = 0.0;
            for (double ox : {0.25, 0.75})
                for (double oy : {0.25, 0.75})
                    m += material_eps(holes, spec, i + ox - xc, j + oy - yc);
            m *= 0.25;
            for (int k = 0; k < nz; ++k)
                grid.eps(i, j, k) = static_cast<float>(fz[k] * m + (1.0 - fz[k]));
        }
    }
    return grid;
}

PermittivityGrid upper_half(const PermittivityGrid& grid) {
    const int nz2 = grid.nz() / 2;
    PermittivityGrid half;
    half.eps = Array3<float>(grid.nx(), grid.ny(), grid.nz() - nz2);
    half.z_mid = 0.0;
    half.slab_thickness = grid.slab_thickness;
    half.eps_max = grid.eps_max;
    for (int i = 0; i < grid.nx(); ++i)
        for (int j = 0; j < grid.ny(); ++j)
            for (int k = nz2; k < grid.nz(); ++k)
                half.eps(i, j, k - nz2) = grid.eps(i, j, k);
    return half;
}

void export_holes(const HoleSet& holes, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw GeometryError("cannot open " + path + " for writing");
    out << "# center_x center_y rx ry index_override\n";
    for (const auto& h : holes.holes)
        out << h.cx << " " << h.cy << " " << h.semi_x() << " " << h.semi_y()
            << " " << h.n_override << "\n";
}

void export_grid(const Array3<float>& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw GeometryError("cannot open " + path + " for writing");
    out << grid.nx() << " " << grid.ny() << " " << grid.nz() << " 1\n";
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(grid.data()),
              static_cast<std::streamsize>(grid.size() * sizeof(float)));
}

Array3<float> import_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw GeometryError("cannot open " + path);
    int nx, ny, nz;
    double cell;
    in >> nx >> ny >> nz >> cell;
    in.ignore(1); // newline
    Array3<float> grid(nx, ny, nz);
    in.read(reinterpret_cast<char*>(grid.data()),
            static_cast<std::streamsize>(grid.size() * sizeof(float)));
    if (!in)
        throw GeometryError("truncated grid file: " + path);
    return grid;
}

} // namespace pcmc
