// Batch front-end: named presets, declarative configs, parameter sweeps and
// band runs, with reproducible CSV artifacts.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pcmc/bandstructure.hpp"
#include "pcmc/config.hpp"
#include "pcmc/errors.hpp"
#include "pcmc/pipeline.hpp"
#include "pcmc/presets.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInstability = 3;
constexpr int kExitAnalysis = 4;

namespace fs = std::filesystem;
using namespace pcmc;

std::string default_out_dir() {
    if (const char* env = std::getenv("PCMC_OUT_DIR")) return env;
    return ".";
}

RunConfig resolve_config(const std::string& config_path,
                         const std::string& preset, unsigned seed_override,
                         bool seed_set) {
    RunConfig cfg;
    if (!preset.empty() && !config_path.empty())
        throw ConfigError("pass either --config or --preset, not both");
    if (!preset.empty()) cfg = preset_config(preset);
    else if (!config_path.empty()) cfg = load_config(config_path);
    else throw ConfigError("one of --config or --preset is required");
    if (seed_set) cfg.seed = seed_override;
    cfg.validate();
    return cfg;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << body;
}

std::string summary_text(const PipelineResult& r) {
    std::ostringstream os;
    os.precision(6);
    os << "run: " << r.config.name << "\n"
       << "grid (half space): " << r.nx << " x " << r.ny << " x " << r.nz
       << ", steps: " << r.steps_total << "\n"
       << "a/lambda: " << r.mode.a_over_lambda << "\n"
       << "Q_perp: " << r.mode.q_perp << "  Q_par: " << r.mode.q_par
       << "  Q_total: " << r.mode.q_total << "  Q_pencil: " << r.mode.q_pencil
       << "  Q_farfield: " << r.q_farfield << "\n"
       << "V_mode: " << r.mode.v_mode_norm << " (lambda/2)^3\n"
       << "field ratio at atom: " << r.mode.field_ratio_atom << "\n"
       << "g0/2pi: " << r.cqed.g0 / (2 * 3.14159265358979) << " Hz"
       << "  N0: " << r.cqed.n0 << "  m0: " << r.cqed.m0
       << (r.cqed.strong_coupling ? "  [strong coupling]" : "") << "\n";
    if (r.multimode_warning)
        os << "warning: second resonance inside the re-excitation band\n";
    if (r.mode.flux_flagged) os << "warning: negative mean boundary flux\n";
    if (!r.mode.q_consistent)
        os << "warning: flux Q and ringdown-fit Q differ by more than 30%\n";
    os << "discovered modes (a/lambda, Q, amplitude):\n";
    for (const auto& d : r.discovered) {
        os << "  " << d.omega * r.config.structure.a / (2 * 3.14159265358979)
           << "  " << d.q << "  " << d.amplitude
           << (d.near_edge ? "  (window edge)" : "") << "\n";
    }
    return os.str();
}

void write_artifacts(const PipelineResult& r, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const std::string stem = r.config.name;
    write_file(out_dir / (stem + "-modes.csv"),
               mode_report_header() + "\n" + mode_report_row(r) + "\n");
    write_file(out_dir / (stem + "-summary.txt"), summary_text(r));
    write_file(out_dir / (stem + "-config.txt"), write_config(r.config));
    if (r.config.dump_checkpoint)
        save_checkpoint(r.checkpoint, (out_dir / (stem + ".ckpt")).string());
    if (r.config.dump_slices)
        export_grid(r.intensity, (out_dir / (stem + "-intensity.grid")).string());
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir) {
    const PipelineResult r = run_pipeline(cfg);
    write_artifacts(r, out_dir);
    std::cout << summary_text(r);
    return 0;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::logic_error&) {
            throw ConfigError("bad sweep value '" + tok + "'");
        }
    }
    return out;
}

int cmd_sweep(const RunConfig& cfg, const std::string& param,
              const std::string& values_csv, int workers,
              const fs::path& out_dir) {
    const std::vector<double> values = parse_values(values_csv);

    struct Point {
        double value;
        std::string row;   // CSV row or empty on failure
        std::string error; // failure report
    };
    std::vector<Point> points(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        points[i].value = values[i];

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) break;
            RunConfig point_cfg = cfg;
            try {
                set_sweep_parameter(point_cfg, param, points[i].value);
                point_cfg.name =
                    cfg.name + "-" + param + "-" + std::to_string(points[i].value);
                const PipelineResult r = run_pipeline(point_cfg);
                points[i].row = mode_report_row(r);
            } catch (const std::exception& e) {
                points[i].error = e.what();
            }
        }
    };
    const int n_threads =
        std::max(1, std::min<int>(workers, static_cast<int>(points.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ostringstream os;
    os << "sweep_value," << mode_report_header() << ",error\n";
    for (const auto& p : points) {
        os.precision(10);
        os << p.value << ",";
        if (p.error.empty()) {
            os << p.row << ",";
        } else {
            std::string esc = p.error;
            for (auto& c : esc)
                if (c == ',' || c == '\n') c = ';';
            // keep the column count stable on failures
            const auto n_cols =
                std::count(mode_report_header().begin(),
                           mode_report_header().end(), ',');
            for (long k = 0; k <= n_cols; ++k) os << ",";
            os << esc;
        }
        os << "\n";
    }
    fs::create_directories(out_dir);
    const fs::path path = out_dir / (cfg.name + "-sweep-" + param + ".csv");
    write_file(path, os.str());
    std::cout << "wrote " << path.string() << "\n";
    for (const auto& p : points)
        if (!p.error.empty())
            std::cerr << "point " << p.value << " failed: " << p.error << "\n";
    return 0;
}

int cmd_bands(const RunConfig& cfg, const fs::path& out_dir) {
    BandRunParams bp;
    bp.a = cfg.structure.a;
    bp.r_over_a = cfg.structure.r_over_a;
    bp.d_over_a = cfg.structure.d_over_a;
    bp.n_slab = cfg.structure.n_slab;
    bp.steps = cfg.bands_steps;
    bp.seeds = cfg.bands_seeds;
    bp.window_lo = cfg.bands_window_lo;
    bp.window_hi = cfg.bands_window_hi;
    bp.seed0 = cfg.seed;
    bp.absorber = cfg.absorber;
    bp.courant = cfg.courant;

    const auto kpath = bz_edge_path(bp.a, cfg.bands_k_segments);
    const BandDiagram diagram = compute_bands(bp, kpath);
    const GapResult gap = find_gap(diagram);

    std::ostringstream os;
    os << "kx,ky,a_over_lambda\n";
    os.precision(10);
    for (const auto& pt : diagram.points)
        for (double f : pt.a_over_lambda)
            os << pt.kx << "," << pt.ky << "," << f << "\n";
    fs::create_directories(out_dir);
    write_file(out_dir / (cfg.name + "-bands.csv"), os.str());

    std::ostringstream gs;
    gs.precision(6);
    if (gap.found)
        gs << "gap: " << gap.lo << " to " << gap.hi << " (width "
           << gap.width() << ")\n";
    else
        gs << "gap: none found\n";
    write_file(out_dir / (cfg.name + "-gap.txt"), gs.str());
    std::cout << gs.str();
    return 0;
}

int cmd_farfield(const std::string& ckpt_path, const fs::path& out_dir) {
    const FarFieldCheckpoint ck = load_checkpoint(ckpt_path);
    const FarFieldReport rep = analyze_checkpoint(ck);
    std::ostringstream os;
    os.precision(6);
    os << "omega: " << ck.omega << "\n"
       << "radiated power (upper hemisphere): " << rep.power << "\n"
       << "Q_farfield: " << rep.q_farfield << "\n"
       << "light-cone fraction: " << rep.light_cone_frac << "\n";
    fs::create_directories(out_dir);
    write_file(out_dir /
                   (fs::path(ckpt_path).stem().string() + "-farfield.txt"),
               os.str());
    std::cout << os.str();
    return 0;
}

int cmd_presets_list() {
    for (const auto& p : presets())
        std::cout << p.name << "\t" << p.description << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"photonic-crystal microcavity design toolkit"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir = default_out_dir();
    unsigned seed = 0;
    bool seed_set = false;
    int workers = 1;

    auto add_common = [&](CLI::App* sub, bool needs_structure) {
        if (needs_structure) {
            sub->add_option("--config", config_path, "config file path");
            sub->add_option("--preset", preset, "named preset");
        }
        sub->add_option("--out", out_dir,
                        "output directory (default: $PCMC_OUT_DIR or .)");
        sub->add_option("--seed", seed, "override the config seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--workers", workers, "worker threads for sweeps");
    };

    auto* simulate = app.add_subcommand("simulate", "run one cavity pipeline");
    add_common(simulate, true);

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(sweep, true);
    std::string param, values;
    sweep->add_option("--param", param, "parameter name")->required();
    sweep->add_option("--values", values, "comma-separated values")->required();

    auto* bands = app.add_subcommand("bands", "band diagram and gap summary");
    add_common(bands, true);

    auto* farfield =
        app.add_subcommand("farfield", "re-analyze a near-field checkpoint");
    add_common(farfield, false);
    std::string ckpt;
    farfield->add_option("--checkpoint", ckpt, "checkpoint path")->required();

    auto* presets_cmd = app.add_subcommand("presets", "preset utilities");
    presets_cmd->add_subcommand("list", "list available presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return cmd_simulate(resolve_config(config_path, preset, seed, seed_set),
                                out_dir);
        if (sweep->parsed())
            return cmd_sweep(resolve_config(config_path, preset, seed, seed_set),
                             param, values, workers, out_dir);
        if (bands->parsed())
            return cmd_bands(resolve_config(config_path, preset, seed, seed_set),
                             out_dir);
        if (farfield->parsed()) return cmd_farfield(ckpt, out_dir);
        if (presets_cmd->parsed()) return cmd_presets_list();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const GeometryError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InstabilityError& e) {
        std::cerr << "solver instability: " << e.what() << "\n";
        return kExitInstability;
    } catch (const AnalysisError& e) {
        std::cerr << "analysis failure: " << e.what() << "\n";
        return kExitAnalysis;
    }
    return 0;
}
