#ifndef PCMC_PIPELINE_HPP
#define PCMC_PIPELINE_HPP

#include <string>
#include <vector>

#include "pcmc/analysis.hpp"
#include "pcmc/config.hpp"
#include "pcmc/farfield.hpp"

namespace pcmc {

/// Near-field checkpoint for offline re-analysis: plane phasors plus the
/// resonance context they were captured with.
struct FarFieldCheckpoint {
    NearFieldPlane plane;
    double omega = 0.0;
    double energy = 0.0; // half-space stored energy
    double lambda_cells = 0.0;
};
void save_checkpoint(const FarFieldCheckpoint& ckpt, const std::string& path);
FarFieldCheckpoint load_checkpoint(const std::string& path);

/// Everything one cavity run produces: the broadband discovery spectrum, the
/// narrowband ringdown mode characterization, and the far-field cross-check.
struct PipelineResult {
    RunConfig config;
    std::vector<Resonance> discovered;
    ResonantMode mode;
    CqedFigures cqed;
    double q_farfield = 0.0;
    double light_cone_frac = 0.0;
    bool multimode_warning = false; // second mode inside the re-excitation band
    int nx = 0, ny = 0, nz = 0;     // half-space grid
    long steps_total = 0;

    FarFieldCheckpoint checkpoint;  // near-field plane of the ringdown pass
    Array3<float> intensity;        // eps|E|^2, filled when output.slices set
};

/// Geometry -> broadband discovery -> narrowband ringdown -> figures of
/// merit. Throws GeometryError/ConfigError on bad input, InstabilityError if
/// the solver blows up, AnalysisError when no mode is found.
PipelineResult run_pipeline(const RunConfig& cfg);

/// One CSV row per result (shared column set, see docs/formats.md).
std::string mode_report_header();
std::string mode_report_row(const PipelineResult& r);

/// Re-run only the far-field step of a finished simulation.
struct FarFieldReport {
    double q_farfield = 0.0;
    double power = 0.0;
    double light_cone_frac = 0.0;
};
FarFieldReport analyze_checkpoint(const FarFieldCheckpoint& ckpt);

/// Sweepable parameters: p, r_def_over_a, r_over_a, d_over_a, num_layers,
/// n_defect. Throws ConfigError when the config has no matching defect.
void set_sweep_parameter(RunConfig& cfg, const std::string& name, double value);

} // namespace pcmc

#endif
