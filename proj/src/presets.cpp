#include "pcmc/presets.hpp"

#include "pcmc/errors.hpp"

#include <numbers>

namespace pcmc {

namespace {

RunConfig base(std::string name, int a, double r_over_a, double d_over_a,
               int layers) {
    RunConfig cfg;
    cfg.name = std::move(name);
    cfg.structure.a = a;
    cfg.structure.r_over_a = r_over_a;
    cfg.structure.d_over_a = d_over_a;
    cfg.structure.n_slab = 3.4;
    cfg.structure.num_layers = layers;
    return cfg;
}

std::vector<Preset> make_presets() {
    std::vector<Preset> out;

    // single reduced-radius defects, x dipole, a = 20, 5 layers
    const struct {
        const char* name;
        double r_over_a, r_def;
    } rows[] = {
        {"table1-row1", 0.275, 0.15},
        {"table1-row2", 0.275, 0.20},
        {"table1-row3", 0.250, 0.15},
        {"table1-row4", 0.250, 0.20},
    };
    for (const auto& row : rows) {
        RunConfig cfg = base(row.name, 20, row.r_over_a, 0.75, 5);
        cfg.defects.push_back(RadiusChange{row.r_def});
        out.push_back({row.name,
                       "single hole reduced to r_def/a = " +
                           std::to_string(row.r_def),
                       cfg});
    }

    {
        // high-index central hole plus x-axis dislocation; sweep p for the
        // frequency/Q tuning curves
        RunConfig cfg = base("dislocation-sweep", 15, 0.3, 0.6, 5);
        cfg.defects.push_back(IndexChange{2.4});
        cfg.defects.push_back(FractionalEdgeDislocation{Axis::X, 0.0});
        out.push_back({cfg.name,
                       "index defect n = 2.4 with x-axis elongation, p sweep",
                       cfg});

        cfg.name = "dislocation-layers";
        cfg.defects.back() = FractionalEdgeDislocation{Axis::X, 3.0};
        out.push_back({cfg.name,
                       "index defect at p = 3, sweep the number of layers",
                       cfg});
    }

    {
        // reduced hole + x-axis dislocation, strong-coupling candidate
        RunConfig cfg = base("small-defect-elongated", 20, 0.275, 0.75, 5);
        cfg.defects.push_back(RadiusChange{0.2});
        cfg.defects.push_back(FractionalEdgeDislocation{Axis::X, 2.0});
        out.push_back({cfg.name,
                       "r_def/a = 0.2 single defect with x-axis elongation",
                       cfg});
    }

    {
        RunConfig cfg = base("four-hole-tuned", 20, 0.275, 0.75, 5);
        cfg.defects.push_back(FourHoleTuning{0.2, 0.225});
        cfg.dipole = DipoleOrientation::Y;
        out.push_back({cfg.name,
                       "central hole r2/a = 0.2, four nearest holes tuned, "
                       "y dipole",
                       cfg});

        cfg.name = "four-hole-elongated";
        cfg.defects.push_back(FractionalEdgeDislocation{Axis::Y, 2.0});
        out.push_back({cfg.name,
                       "four-hole tuning plus y-axis elongation, p sweep",
                       cfg});
    }

    {
        RunConfig cfg = base("coupled-x", 20, 0.275, 0.75, 5);
        cfg.defects.push_back(CoupledDefects{Axis::X, 0.2, 2.0});
        cfg.dipole = DipoleOrientation::X;
        cfg.drive_x = 1.0;          // drive at a defect hole
        cfg.drive_mirror = Axis::X; // in-phase twin at the other defect
        out.push_back({cfg.name,
                       "two coupled defects along x, atom in the central hole",
                       cfg});
    }
    {
        RunConfig cfg = base("coupled-y", 20, 0.275, 0.75, 5);
        cfg.defects.push_back(CoupledDefects{Axis::Y, 0.2, 2.0});
        cfg.dipole = DipoleOrientation::Y;
        cfg.drive_x = 0.5; // drive at one of the defect holes
        cfg.drive_y = std::numbers::sqrt3 / 2.0;
        cfg.drive_mirror = Axis::Y; // in-phase twin at the other defect
        out.push_back({cfg.name,
                       "two coupled defects on adjacent rows, atom in a "
                       "central unperturbed hole",
                       cfg});
    }

    {
        // band-structure setups (cmd_bands ignores defect/analysis settings)
        RunConfig cfg = base("bands-bulk", 14, 0.275, 0.75, 5);
        out.push_back({cfg.name, "TE-like band diagram of the bulk crystal",
                       cfg});

        cfg.name = "bands-unpatterned";
        cfg.structure.r_over_a = 1e-6; // effectively no holes
        out.push_back({cfg.name, "uniform slab control, no gap expected", cfg});
    }

    {
        // near-to-far cross-check: the dislocation sweep re-analyzed through
        // the radiated-power Q
        RunConfig cfg = base("farfield-sweep", 15, 0.3, 0.6, 5);
        cfg.defects.push_back(IndexChange{2.4});
        cfg.defects.push_back(FractionalEdgeDislocation{Axis::X, 0.0});
        cfg.dump_checkpoint = true;
        out.push_back({cfg.name,
                       "dislocation sweep with far-field Q cross-validation",
                       cfg});
    }

    return out;
}

} // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = make_presets();
    return all;
}

const RunConfig& preset_config(const std::string& name) {
    // legacy alias kept for compatibility with earlier run scripts
    const std::string& wanted = (name == "fig6") ? std::string("bands-bulk")
                                                 : name;
    for (const auto& p : presets())
        if (p.name == wanted) return p.config;
    throw ConfigError("unknown preset: " + name);
}

} // namespace pcmc
