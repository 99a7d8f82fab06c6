#ifndef PCMC_CONFIG_HPP
#define PCMC_CONFIG_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "pcmc/geometry.hpp"

namespace pcmc {

enum class DipoleOrientation { X, Y };
enum class CouplingWeightKind { EpsAsPrinted, SqrtEps };

/// One complete cavity experiment. All lengths in grid cells unless the key
/// name carries a unit. Round-trips losslessly through the text format.
struct RunConfig {
    std::string name = "run";

    PhotonicCrystalSpec structure;
    // Applied in order; e.g. a radius defect followed by a dislocation.
    std::vector<DefectSpec> defects;

    // solver
    double courant = 0.5;
    int absorber = 10;
    double sigma_max = 2.0;
    int discovery_steps = 0; // 0 = auto
    int ringdown_steps = 0;  // 0 = auto
    double pad_xy = 0.0;     // vacuum margin beyond holes, 0 = auto
    double air_z = 0.0;      // air above slab surface, 0 = auto

    // analysis
    double window_lo = 0.20, window_hi = 0.42; // a / lambda
    DipoleOrientation dipole = DipoleOrientation::X;
    double atom_x = 0.0, atom_y = 0.0; // atom site in units of a from center
    // dipole drive site in units of a from center; offset from the atom site
    // when the mode maximum is not at the atom's hole (coupled defects)
    double drive_x = 0.0, drive_y = 0.0;
    // mirror the drive into an in-phase pair across the given axis: selects
    // the even (constructive) member of a coupled-defect doublet
    std::optional<Axis> drive_mirror;
    double gamma_perp_hz = 2.6e6;      // gamma_perp / (2 pi)
    double lambda_nm = 852.0;
    CouplingWeightKind coupling_weight = CouplingWeightKind::EpsAsPrinted;

    // band runs
    int bands_k_segments = 4;
    int bands_steps = 9000;
    int bands_seeds = 2;
    double bands_window_lo = 0.16, bands_window_hi = 0.46;

    // outputs
    bool dump_slices = false;
    bool dump_checkpoint = false;
    unsigned seed = 1;

    void validate() const; // throws ConfigError naming the violated invariant

    bool operator==(const RunConfig&) const = default;
};

/// Flat `section.key = value` text, `#` comments. Unknown keys and malformed
/// lines raise ConfigError with the line number.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
std::string write_config(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

} // namespace pcmc

#endif
