#include "pcmc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pcmc/errors.hpp"

namespace pcmc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
        return d;
    } catch (const std::logic_error&) {
        fail(line, "expected a number, got '" + v + "'");
    }
}

long to_long(const std::string& v, int line) {
    const double d = to_double(v, line);
    const long l = static_cast<long>(d);
    if (static_cast<double>(l) != d) fail(line, "expected an integer, got '" + v + "'");
    return l;
}

bool to_bool(const std::string& v, int line) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    fail(line, "expected a boolean (0/1/true/false), got '" + v + "'");
}

Axis to_axis(const std::string& v, int line) {
    if (v == "x") return Axis::X;
    if (v == "y") return Axis::Y;
    fail(line, "expected axis x or y, got '" + v + "'");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Defect parameters arrive key by key; the kind line selects the variant and
// later parameter lines fill it in.
struct DefectDraft {
    std::string kind = "none";
    double n_defect = 2.4;
    double r_def_over_a = 0.2;
    Axis axis = Axis::X;
    double p = 0.0;
    double r1_over_a = 0.225;
    double r2_over_a = 0.2;

    std::vector<DefectSpec> build(int line) const {
        std::vector<DefectSpec> out;
        std::stringstream ss(kind);
        std::string one;
        while (std::getline(ss, one, ',')) {
            one = trim(one);
            if (one == "none" || one.empty()) continue;
            if (one == "index") out.push_back(IndexChange{n_defect});
            else if (one == "radius") out.push_back(RadiusChange{r_def_over_a});
            else if (one == "dislocation")
                out.push_back(FractionalEdgeDislocation{axis, p});
            else if (one == "four-hole")
                out.push_back(FourHoleTuning{r2_over_a, r1_over_a});
            else if (one == "coupled")
                out.push_back(CoupledDefects{axis, r_def_over_a, p});
            else
                fail(line, "unknown defect.kind '" + one + "'");
        }
        return out;
    }
};

} // namespace

void RunConfig::validate() const {
    structure.validate();
    for (const auto& defect : defects) {
        if (const auto* rc = std::get_if<RadiusChange>(&defect)) {
            if (rc->r_def_over_a >= structure.r_over_a)
                throw ConfigError(
                    "defect.r_def_over_a must be smaller than structure.r_over_a");
            if (rc->r_def_over_a < 0.0)
                throw ConfigError("defect.r_def_over_a must be non-negative");
        }
        if (const auto* cd = std::get_if<CoupledDefects>(&defect)) {
            if (cd->r_def_over_a >= structure.r_over_a)
                throw ConfigError(
                    "defect.r_def_over_a must be smaller than structure.r_over_a");
            if (cd->p < 0.0) throw ConfigError("defect.p must be non-negative");
        }
        if (const auto* fh = std::get_if<FourHoleTuning>(&defect)) {
            if (fh->r1_over_a > structure.r_over_a ||
                fh->r2_over_a > structure.r_over_a)
                throw ConfigError(
                    "four-hole radii must not exceed structure.r_over_a");
        }
        if (const auto* fe = std::get_if<FractionalEdgeDislocation>(&defect)) {
            if (fe->p < 0.0) throw ConfigError("defect.p must be non-negative");
        }
    }
    if (courant <= 0.0 || courant > 0.99)
        throw ConfigError("solver.courant must be in (0, 0.99]");
    if (absorber < 4) throw ConfigError("solver.absorber must be at least 4");
    if (sigma_max <= 0.0) throw ConfigError("solver.sigma_max must be positive");
    if (window_lo <= 0.0 || window_lo >= window_hi)
        throw ConfigError("analysis window must satisfy 0 < lo < hi");
    if (gamma_perp_hz <= 0.0 || lambda_nm <= 0.0)
        throw ConfigError("analysis.gamma_perp_hz and analysis.lambda_nm must be positive");
    if (bands_k_segments < 1 || bands_seeds < 1 || bands_steps < 1000)
        throw ConfigError("bands settings out of range");
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    DefectDraft draft;
    int kind_line = 0;

    std::map<std::string, std::function<void(const std::string&, int)>> keys;
    auto dbl = [&](double& dst) {
        return [&dst](const std::string& v, int line) { dst = to_double(v, line); };
    };
    auto intg = [&](int& dst) {
        return [&dst](const std::string& v, int line) {
            dst = static_cast<int>(to_long(v, line));
        };
    };
    auto boolean = [&](bool& dst) {
        return [&dst](const std::string& v, int line) { dst = to_bool(v, line); };
    };

    keys["name"] = [&](const std::string& v, int) { cfg.name = v; };
    keys["structure.a"] = intg(cfg.structure.a);
    keys["structure.r_over_a"] = dbl(cfg.structure.r_over_a);
    keys["structure.d_over_a"] = dbl(cfg.structure.d_over_a);
    keys["structure.n_slab"] = dbl(cfg.structure.n_slab);
    keys["structure.num_layers"] = intg(cfg.structure.num_layers);
    keys["defect.kind"] = [&](const std::string& v, int line) {
        draft.kind = v;
        kind_line = line;
    };
    keys["defect.n_defect"] = dbl(draft.n_defect);
    keys["defect.r_def_over_a"] = dbl(draft.r_def_over_a);
    keys["defect.axis"] = [&](const std::string& v, int line) {
        draft.axis = to_axis(v, line);
    };
    keys["defect.p"] = dbl(draft.p);
    keys["defect.r1_over_a"] = dbl(draft.r1_over_a);
    keys["defect.r2_over_a"] = dbl(draft.r2_over_a);
    keys["solver.courant"] = dbl(cfg.courant);
    keys["solver.absorber"] = intg(cfg.absorber);
    keys["solver.sigma_max"] = dbl(cfg.sigma_max);
    keys["solver.discovery_steps"] = intg(cfg.discovery_steps);
    keys["solver.ringdown_steps"] = intg(cfg.ringdown_steps);
    keys["solver.pad_xy"] = dbl(cfg.pad_xy);
    keys["solver.air_z"] = dbl(cfg.air_z);
    keys["analysis.window_lo"] = dbl(cfg.window_lo);
    keys["analysis.window_hi"] = dbl(cfg.window_hi);
    keys["analysis.dipole"] = [&](const std::string& v, int line) {
        if (v == "x") cfg.dipole = DipoleOrientation::X;
        else if (v == "y") cfg.dipole = DipoleOrientation::Y;
        else fail(line, "analysis.dipole must be x or y");
    };
    keys["analysis.atom_x"] = dbl(cfg.atom_x);
    keys["analysis.atom_y"] = dbl(cfg.atom_y);
    keys["analysis.drive_x"] = dbl(cfg.drive_x);
    keys["analysis.drive_y"] = dbl(cfg.drive_y);
    keys["analysis.drive_mirror"] = [&](const std::string& v, int line) {
        if (v == "none") cfg.drive_mirror.reset();
        else cfg.drive_mirror = to_axis(v, line);
    };
    keys["analysis.gamma_perp_hz"] = dbl(cfg.gamma_perp_hz);
    keys["analysis.lambda_nm"] = dbl(cfg.lambda_nm);
    keys["analysis.coupling_weight"] = [&](const std::string& v, int line) {
        if (v == "eps") cfg.coupling_weight = CouplingWeightKind::EpsAsPrinted;
        else if (v == "sqrt-eps") cfg.coupling_weight = CouplingWeightKind::SqrtEps;
        else fail(line, "analysis.coupling_weight must be eps or sqrt-eps");
    };
    keys["bands.k_segments"] = intg(cfg.bands_k_segments);
    keys["bands.steps"] = intg(cfg.bands_steps);
    keys["bands.seeds"] = intg(cfg.bands_seeds);
    keys["bands.window_lo"] = dbl(cfg.bands_window_lo);
    keys["bands.window_hi"] = dbl(cfg.bands_window_hi);
    keys["output.slices"] = boolean(cfg.dump_slices);
    keys["output.checkpoint"] = boolean(cfg.dump_checkpoint);
    keys["seed"] = [&](const std::string& v, int line) {
        cfg.seed = static_cast<unsigned>(to_long(v, line));
    };

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        auto it = keys.find(key);
        if (it == keys.end()) fail(line, "unknown key '" + key + "'");
        it->second(value, line);
    }
    cfg.defects = draft.build(kind_line);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

std::string write_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "name = " << cfg.name << "\n\n";
    os << "structure.a = " << cfg.structure.a << "\n";
    os << "structure.r_over_a = " << fmt(cfg.structure.r_over_a) << "\n";
    os << "structure.d_over_a = " << fmt(cfg.structure.d_over_a) << "\n";
    os << "structure.n_slab = " << fmt(cfg.structure.n_slab) << "\n";
    os << "structure.num_layers = " << cfg.structure.num_layers << "\n\n";

    if (cfg.defects.empty()) {
        os << "defect.kind = none\n";
    } else {
        std::string kinds;
        for (const auto& d : cfg.defects) {
            if (!kinds.empty()) kinds += ",";
            if (std::holds_alternative<IndexChange>(d)) kinds += "index";
            else if (std::holds_alternative<RadiusChange>(d)) kinds += "radius";
            else if (std::holds_alternative<FractionalEdgeDislocation>(d))
                kinds += "dislocation";
            else if (std::holds_alternative<FourHoleTuning>(d)) kinds += "four-hole";
            else kinds += "coupled";
        }
        os << "defect.kind = " << kinds << "\n";
        for (const auto& d : cfg.defects) {
            if (const auto* ic = std::get_if<IndexChange>(&d)) {
                os << "defect.n_defect = " << fmt(ic->n_defect) << "\n";
            } else if (const auto* rc = std::get_if<RadiusChange>(&d)) {
                os << "defect.r_def_over_a = " << fmt(rc->r_def_over_a) << "\n";
            } else if (const auto* fe = std::get_if<FractionalEdgeDislocation>(&d)) {
                os << "defect.axis = " << (fe->axis == Axis::X ? "x" : "y") << "\n";
                os << "defect.p = " << fmt(fe->p) << "\n";
            } else if (const auto* fh = std::get_if<FourHoleTuning>(&d)) {
                os << "defect.r1_over_a = " << fmt(fh->r1_over_a) << "\n";
                os << "defect.r2_over_a = " << fmt(fh->r2_over_a) << "\n";
            } else if (const auto* cd = std::get_if<CoupledDefects>(&d)) {
                os << "defect.axis = " << (cd->orientation == Axis::X ? "x" : "y") << "\n";
                os << "defect.r_def_over_a = " << fmt(cd->r_def_over_a) << "\n";
                os << "defect.p = " << fmt(cd->p) << "\n";
            }
        }
    }
    os << "\n";
    os << "solver.courant = " << fmt(cfg.courant) << "\n";
    os << "solver.absorber = " << cfg.absorber << "\n";
    os << "solver.sigma_max = " << fmt(cfg.sigma_max) << "\n";
    os << "solver.discovery_steps = " << cfg.discovery_steps << "\n";
    os << "solver.ringdown_steps = " << cfg.ringdown_steps << "\n";
    os << "solver.pad_xy = " << fmt(cfg.pad_xy) << "\n";
    os << "solver.air_z = " << fmt(cfg.air_z) << "\n\n";
    os << "analysis.window_lo = " << fmt(cfg.window_lo) << "\n";
    os << "analysis.window_hi = " << fmt(cfg.window_hi) << "\n";
    os << "analysis.dipole = "
       << (cfg.dipole == DipoleOrientation::X ? "x" : "y") << "\n";
    os << "analysis.atom_x = " << fmt(cfg.atom_x) << "\n";
    os << "analysis.atom_y = " << fmt(cfg.atom_y) << "\n";
    os << "analysis.drive_x = " << fmt(cfg.drive_x) << "\n";
    os << "analysis.drive_y = " << fmt(cfg.drive_y) << "\n";
    os << "analysis.drive_mirror = "
       << (!cfg.drive_mirror ? "none"
                             : *cfg.drive_mirror == Axis::X ? "x" : "y")
       << "\n";
    os << "analysis.gamma_perp_hz = " << fmt(cfg.gamma_perp_hz) << "\n";
    os << "analysis.lambda_nm = " << fmt(cfg.lambda_nm) << "\n";
    os << "analysis.coupling_weight = "
       << (cfg.coupling_weight == CouplingWeightKind::EpsAsPrinted ? "eps"
                                                                   : "sqrt-eps")
       << "\n\n";
    os << "bands.k_segments = " << cfg.bands_k_segments << "\n";
    os << "bands.steps = " << cfg.bands_steps << "\n";
    os << "bands.seeds = " << cfg.bands_seeds << "\n";
    os << "bands.window_lo = " << fmt(cfg.bands_window_lo) << "\n";
    os << "bands.window_hi = " << fmt(cfg.bands_window_hi) << "\n\n";
    os << "output.slices = " << (cfg.dump_slices ? 1 : 0) << "\n";
    os << "output.checkpoint = " << (cfg.dump_checkpoint ? 1 : 0) << "\n";
    os << "seed = " << cfg.seed << "\n";
    return os.str();
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << write_config(cfg);
}

} // namespace pcmc
