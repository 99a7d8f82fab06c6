#ifndef PCMC_GEOMETRY_HPP
#define PCMC_GEOMETRY_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pcmc/array3.hpp"

namespace pcmc {

enum class Axis { X, Y };

/// Hexagonal-lattice perforated-slab parameters. Lengths are in grid cells;
/// the lattice constant `a` doubles as the resolution knob.
struct PhotonicCrystalSpec {
    int a = 20;              // lattice constant, grid cells
    double r_over_a = 0.275; // hole radius / a
    double d_over_a = 0.75;  // slab thickness / a
    double n_slab = 3.4;     // slab refractive index
    int num_layers = 5;      // rings of holes around the center

    double hole_radius() const { return r_over_a * a; }
    double slab_thickness() const { return d_over_a * a; }

    /// Throws GeometryError on invariant violation.
    void validate() const;

    bool operator==(const PhotonicCrystalSpec&) const = default;
};

struct IndexChange {
    double n_defect = 2.4;
    bool operator==(const IndexChange&) const = default;
};
struct RadiusChange {
    double r_def_over_a = 0.2;
    bool operator==(const RadiusChange&) const = default;
};
/// Elongate holes on the given symmetry axis perpendicular to it by p/2 each
/// way and translate the two half-spaces apart so hole-to-hole distances are
/// preserved.
struct FractionalEdgeDislocation {
    Axis axis = Axis::X;
    double p = 0.0; // grid points
    bool operator==(const FractionalEdgeDislocation&) const = default;
};
/// Shrink the central hole to r2 and the four nearest neighbors in the
/// Gamma-J directions to r1, pushing those four radially outward by r - r1.
struct FourHoleTuning {
    double r2_over_a = 0.2;
    double r1_over_a = 0.225;
    bool operator==(const FourHoleTuning&) const = default;
};
/// Two reduced-radius holes separated by one unperturbed lattice site along
/// the chosen axis, with elongation p applied to the lines containing them.
struct CoupledDefects {
    Axis orientation = Axis::X;
    double r_def_over_a = 0.2;
    double p = 0.0;
    bool operator==(const CoupledDefects&) const = default;
};

using DefectSpec = std::variant<IndexChange, RadiusChange,
                                FractionalEdgeDislocation, FourHoleTuning,
                                CoupledDefects>;

/// Stadium-shaped hole: all points within distance `radius` of the segment
/// of half-length `elong_x`/`elong_y` through (cx, cy). A circle when both
/// elongations are zero. Continuous grid coordinates, cavity center at (0,0).
struct Hole {
    double cx = 0.0, cy = 0.0;
    double radius = 0.0;
    double elong_x = 0.0, elong_y = 0.0; // cap half-offsets, at most one nonzero
    double n_override = 0.0;             // 0 = air hole, >0 = filled with this index
    bool is_defect = false;

    double semi_x() const { return radius + elong_x; }
    double semi_y() const { return radius + elong_y; }
    bool contains(double x, double y) const;
};

struct HoleSet {
    std::vector<Hole> holes;
};

/// Rasterized relative permittivity. Cell (i,j,k) spans
/// [i,i+1]x[j,j+1]x[k,k+1]; the cavity axis is at x = nx/2, y = ny/2 and the
/// slab midplane at z = z_mid (continuous coordinates).
struct PermittivityGrid {
    Array3<float> eps;
    double z_mid = 0.0;
    double slab_thickness = 0.0;
    double eps_max = 1.0;

    int nx() const { return eps.nx(); }
    int ny() const { return eps.ny(); }
    int nz() const { return eps.nz(); }
    double x_center() const { return eps.nx() / 2.0; }
    double y_center() const { return eps.ny() / 2.0; }
};

inline constexpr int kMaxGridExtent = 1200; // per-axis cap on rasterized grids

/// num_layers hexagonal rings around the origin; the central hole is marked.
HoleSet build_lattice(const PhotonicCrystalSpec& spec);

/// Applies one defect transformation; rejects overlapping results.
HoleSet apply_defect(const HoleSet& holes, const DefectSpec& defect,
                     const PhotonicCrystalSpec& spec);

/// Rasterize to a full (z-symmetric) grid. pad_xy is vacuum beyond the hole
/// bounding box, air_z the air thickness above and below the slab surfaces;
/// both should already include the absorber thickness.
PermittivityGrid rasterize(const HoleSet& holes, const PhotonicCrystalSpec& spec,
                           double pad_xy, double air_z);

/// Upper half (z >= midplane) of a full grid, for even-mirror runs. The
/// mirror plane coincides with the z=0 field-sample plane of the result.
PermittivityGrid upper_half(const PermittivityGrid& grid);

/// Plain-text hole list: center_x center_y rx ry index_override per line.
void export_holes(const HoleSet& holes, const std::string& path);

/// Raw grid dump: one text header line "nx ny nz cell_size", then row-major
/// (z fastest) little-endian float32 body.
void export_grid(const Array3<float>& grid, const std::string& path);
Array3<float> import_grid(const std::string& path);

} // namespace pcmc

#endif
