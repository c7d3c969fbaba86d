// trojan — batch command-line surface for the two-electron rotating-frame
// toolkit.  Subcommands: units, equilibrium, scan, integrate, dmc, zvs-slice.
//
// Conventions:
//   - all physics I/O in scaled units unless --atomic-units or --dot is given;
//   - config files are `key = value` lines, keys named after long flags with
//     underscores; command-line flags override config values and the override
//     is reported on stderr;
//   - outputs are written atomically (temp + rename); JSON artifacts embed the
//     fully resolved parameter set;
//   - exit 0 on success, 1 on domain errors, 2 on usage errors;
//   - TROJAN_OUTPUT_DIR sets the directory for default output names.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <trojan/trojan.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

std::string trim(std::string s) {
    const auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && sp(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && sp(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

double parse_double_token(const std::string& tok, const std::string& what) {
    std::string s = tok;
    if (!s.empty() && s.front() == '+') s.erase(s.begin());
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end || s.empty())
        throw usage_error(what + ": malformed number '" + tok + "'");
    return v;
}

long parse_int_token(const std::string& tok, const std::string& what) {
    std::string s = tok;
    if (!s.empty() && s.front() == '+') s.erase(s.begin());
    long v = 0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end || s.empty())
        throw usage_error(what + ": malformed integer '" + tok + "'");
    return v;
}

// Inclusive sweep specification `start:stop:count`.
struct RangeSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
};

RangeSpec parse_range(const std::string& tok, const std::string& flag) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : tok) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 3)
        throw usage_error(flag + ": malformed range '" + tok + "' (expected start:stop:count)");
    RangeSpec r;
    r.start = parse_double_token(parts[0], flag);
    r.stop = parse_double_token(parts[1], flag);
    r.count = static_cast<int>(parse_int_token(parts[2], flag));
    if (r.count < 2) throw usage_error(flag + ": range count must be >= 2, got '" + parts[2] + "'");
    if (!(r.stop > r.start))
        throw usage_error(flag + ": range '" + tok + "' must have stop > start");
    return r;
}

fs::path default_output(const char* name) {
    const char* dir = std::getenv("TROJAN_OUTPUT_DIR");
    if (dir != nullptr && *dir != '\0') return fs::path(dir) / name;
    return fs::path(name);
}

fs::path resolve_output(const std::string& user, const char* fallback) {
    return user.empty() ? default_output(fallback) : fs::path(user);
}

// ---------------------------------------------------------------------------
// Config file merge.  `key = value` lines, '#'/';' comments; keys map to long
// flags (underscores become hyphens).  Command-line flags win; every override
// is reported.  Non-overridden pairs are appended as `--key=value` tokens so
// CLI11 applies its normal type validation.
// ---------------------------------------------------------------------------

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error("config line " + std::to_string(lineno) +
                              ": expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw usage_error("config line " + std::to_string(lineno) + ": empty key or value");
        for (char c : key)
            if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '_' && c != '-')
                throw usage_error("config line " + std::to_string(lineno) + ": bad key '" + key +
                                  "'");
        if (key == "config")
            throw usage_error("config line " + std::to_string(lineno) +
                              ": nested 'config' keys are not supported");
        if (!kv.emplace(key, value).second)
            throw usage_error("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
    }
    return kv;
}

void merge_config_tokens(std::vector<std::string>& tokens) {
    std::string config_path;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] == "--config") {
            if (i + 1 >= tokens.size()) throw usage_error("--config requires a file path");
            config_path = tokens[i + 1];
        } else if (tokens[i].rfind("--config=", 0) == 0) {
            config_path = tokens[i].substr(9);
        }
    }
    if (config_path.empty()) return;
    const auto kv = read_config_file(config_path);
    for (const auto& [key, value] : kv) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        bool on_cli = false;
        for (const std::string& t : tokens)
            if (t == flag || t.rfind(flag + "=", 0) == 0) on_cli = true;
        if (on_cli)
            std::cerr << "note: command-line " << flag << " overrides config value '" << value
                      << "'\n";
        else
            tokens.push_back(flag + "=" + value);
    }
}

// ---------------------------------------------------------------------------
// Shared parameter options: scaled units directly, or routed through the
// units module via --atomic-units / --dot.
// ---------------------------------------------------------------------------

struct ParamOpts {
    double omega = 0.5;
    double epsilon = 0.0;
    int branch = -1;
    int dims = 3;
    double charge = 2.0;

    bool atomic_units = false;
    bool dot_mode = false;

    trojan::LabParams lab;
    bool have_cyclotron = false;
    trojan::DotParams dot;

    std::string config_file;  // consumed by merge_config_tokens; defined so CLI11 accepts it
};

void add_config_option(CLI::App* sub, ParamOpts& o) {
    sub->add_option("--config", o.config_file, "key = value config file; flags override");
}

void add_scaled_options(CLI::App* sub, ParamOpts& o) {
    sub->add_option("--omega", o.omega, "rotation frequency (scaled units)");
    sub->add_option("--epsilon", o.epsilon, "CP field strength (scaled units)");
    sub->add_option("--branch", o.branch, "+1 or -1: sign of omega in g = omega + branch/2")
        ->check(CLI::IsMember({1, -1}));
    sub->add_option("--dims", o.dims, "spatial dimensions, 2 or 3")->check(CLI::IsMember({2, 3}));
    sub->add_option("--charge", o.charge, "nuclear charge Z");
}

void add_mode_options(CLI::App* sub, ParamOpts& o) {
    auto* au = sub->add_flag("--atomic-units", o.atomic_units,
                             "interpret inputs as laboratory atomic units");
    auto* dm = sub->add_flag("--dot", o.dot_mode, "interpret inputs as quantum-dot parameters");
    au->excludes(dm);
    dm->excludes(au);
    sub->add_option("--cp-frequency", o.lab.cp_frequency, "CP frequency Omega (a.u.)");
    sub->add_option("--cp-strength", o.lab.cp_strength, "CP field strength (a.u.)");
    sub->add_option("--cyclotron-frequency", o.lab.cyclotron_frequency,
                    "signed cyclotron frequency Omega_c (a.u.)")
        ->trigger_on_parse()
        ->each([&o](const std::string&) { o.have_cyclotron = true; });
    sub->add_option("--b-field", o.dot.b_field, "magnetic field (tesla)");
    sub->add_option("--effective-mass", o.dot.effective_mass, "effective mass m*/m_e");
    sub->add_option("--dielectric-constant", o.dot.dielectric_constant, "relative permittivity");
    sub->add_option("--confinement-radius", o.dot.confinement_radius,
                    "parabolic confinement length (nm)");
    sub->add_option("--impurity-charge", o.dot.impurity_charge, "impurity charge (units of e)");
    sub->add_option("--impurity-displacement", o.dot.impurity_displacement,
                    "impurity distance from dot center (nm)");
}

json params_json(const trojan::FieldParams& p) {
    return json{{"omega", p.omega},
                {"epsilon", p.epsilon},
                {"branch", p.branch},
                {"dims", p.dims},
                {"charge", p.charge}};
}

// Resolves the active input mode to scaled FieldParams and a provenance blob.
trojan::FieldParams resolve_params(const ParamOpts& o, json& resolved) {
    trojan::FieldParams p;
    if (o.dot_mode) {
        const trojan::DotReport rep = trojan::dot_effective_units(o.dot, o.charge);
        p = rep.params;
        p.dims = o.dims;
        resolved = params_json(p);
        resolved["input_mode"] = "dot";
        resolved["dot_input"] = json{{"b_field", o.dot.b_field},
                                     {"effective_mass", o.dot.effective_mass},
                                     {"dielectric_constant", o.dot.dielectric_constant},
                                     {"confinement_radius", o.dot.confinement_radius},
                                     {"impurity_charge", o.dot.impurity_charge},
                                     {"impurity_displacement", o.dot.impurity_displacement}};
    } else if (o.atomic_units) {
        const trojan::ScaledParams sp = trojan::to_scaled(o.lab, o.dims, o.charge);
        p = sp.params;
        resolved = params_json(p);
        resolved["input_mode"] = "atomic-units";
        resolved["lab_input"] = json{{"cp_frequency", o.lab.cp_frequency},
                                     {"cp_strength", o.lab.cp_strength},
                                     {"cyclotron_frequency", o.lab.cyclotron_frequency}};
    } else {
        p.omega = o.omega;
        p.epsilon = o.epsilon;
        p.branch = o.branch;
        p.dims = o.dims;
        p.charge = o.charge;
        p.validate();
        resolved = params_json(p);
        resolved["input_mode"] = "scaled";
    }
    return p;
}

trojan::EquilibriumType class_from_string(const std::string& s) {
    if (s == "I") return trojan::EquilibriumType::TypeI_Langmuir;
    if (s == "II") return trojan::EquilibriumType::TypeII_Transverse;
    if (s == "IIIa") return trojan::EquilibriumType::TypeIIIa_Collinear;
    if (s == "IIIb") return trojan::EquilibriumType::TypeIIIb_Collinear;
    throw usage_error("--class: unknown class '" + s + "' (expected I, II, IIIa, IIIb)");
}

json positions_json(const trojan::Configuration& cfg) {
    json arr = json::array();
    for (int e = 0; e < 2; ++e) {
        json row = json::array();
        for (int a = 0; a < cfg.dims; ++a) row.push_back(cfg.q[e * cfg.dims + a]);
        arr.push_back(row);
    }
    return arr;
}

json momenta_json(const Eigen::VectorXd& p, int dims) {
    json arr = json::array();
    for (int e = 0; e < 2; ++e) {
        json row = json::array();
        for (int a = 0; a < dims; ++a) row.push_back(p[e * dims + a]);
        arr.push_back(row);
    }
    return arr;
}

void write_json(const fs::path& path, const json& j) {
    trojan::atomic_write_text(path, j.dump(2) + "\n");
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

// Builds the equilibrium selected by --class/--root-index/--angle.
trojan::Equilibrium build_equilibrium(const trojan::FieldParams& params,
                                      trojan::EquilibriumType type, double angle, int root_index,
                                      std::vector<double>* roots_out) {
    std::vector<double> roots;
    if (params.charge == 2.0) {
        try {
            roots = trojan::langmuir_cubic(params);
        } catch (const trojan::invalid_input&) {
            roots.clear();
        }
    }
    if (roots_out != nullptr) *roots_out = roots;
    switch (type) {
        case trojan::EquilibriumType::TypeI_Langmuir: {
            if (roots.empty())
                throw trojan::root_not_found(
                    "no positive Langmuir root at these parameters (requires charge = 2)");
            if (root_index < 0 || root_index >= static_cast<int>(roots.size()))
                throw trojan::root_not_found("--root-index " + std::to_string(root_index) +
                                             " out of range (" + std::to_string(roots.size()) +
                                             " roots)");
            return trojan::langmuir_config(roots[static_cast<std::size_t>(root_index)], params);
        }
        case trojan::EquilibriumType::TypeII_Transverse:
            return trojan::type2_config(params, angle);
        case trojan::EquilibriumType::TypeIIIa_Collinear:
            return trojan::type3_config(params, trojan::CollinearVariant::IIIa);
        case trojan::EquilibriumType::TypeIIIb_Collinear:
            return trojan::type3_config(params, trojan::CollinearVariant::IIIb);
        default:
            throw usage_error("--class: unsupported class");
    }
}

// ---------------------------------------------------------------------------
// Subcommand option bundles
// ---------------------------------------------------------------------------

struct UnitsOpts {
    ParamOpts p;
    std::string output;
};

struct EquilibriumOpts {
    ParamOpts p;
    std::string cls = "I";
    double angle = M_PI;
    int root_index = 0;
    std::string output;
};

struct ScanOpts {
    ParamOpts p;
    std::string omega_range;
    std::string epsilon_range;
    std::string cls = "I";
    double angle = M_PI;
    int threads = 0;
    std::string output;
};

struct IntegrateOpts {
    ParamOpts p;
    std::string cls = "I";
    double angle = M_PI;
    int root_index = 0;
    std::vector<double> q;
    std::vector<double> mom;
    double perturb = 0.0;
    double periods = 1.0;
    double t_final = 0.0;
    int samples_per_period = 200;
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    bool backward = false;
    bool lab_frame = false;
    std::string output;
};

struct DmcOpts {
    ParamOpts p;
    trojan::DmcConfig cfg;
    std::vector<std::string> planes{"xz"};
    int bins = 64;
    int threads = 0;
    std::string output;
};

struct SliceOpts {
    ParamOpts p;
    std::string coord1;
    std::string coord2;
    std::string range1;
    std::string range2;
    std::vector<double> base;
    int root_index = 0;
    std::string output;
};

// ---------------------------------------------------------------------------
// units
// ---------------------------------------------------------------------------

int run_units(const UnitsOpts& o) {
    const fs::path out = resolve_output(o.output, "units.json");
    json j;
    std::string summary;
    if (o.p.dot_mode) {
        const trojan::DotReport rep = trojan::dot_effective_units(o.p.dot, o.p.charge);
        trojan::FieldParams p = rep.params;
        p.dims = o.p.dims;
        j["params"] = params_json(p);
        j["params"]["input_mode"] = "dot";
        j["dot_input"] = json{{"b_field", o.p.dot.b_field},
                              {"effective_mass", o.p.dot.effective_mass},
                              {"dielectric_constant", o.p.dot.dielectric_constant},
                              {"confinement_radius", o.p.dot.confinement_radius},
                              {"impurity_charge", o.p.dot.impurity_charge},
                              {"impurity_displacement", o.p.dot.impurity_displacement}};
        j["derived"] = json{{"effective_bohr_nm", rep.effective_bohr_nm},
                            {"effective_hartree", rep.effective_hartree},
                            {"cyclotron_au", rep.cyclotron_au},
                            {"confinement_au", rep.confinement_au},
                            {"hybrid_cyclotron_au", rep.hybrid_cyclotron_au},
                            {"rotation_au", rep.rotation_au},
                            {"field_eff_au", rep.field_eff_au},
                            {"frequency_ghz", rep.frequency_ghz},
                            {"field_kv_per_m", rep.field_kv_per_m},
                            {"scaled_length_nm", rep.scaled_length_nm}};
        j["units"] = json{{"length_au", rep.units.length_au},
                          {"energy_au", rep.units.energy_au},
                          {"time_au", rep.units.time_au},
                          {"field_au", rep.units.field_au}};
        j["report"] = rep.text;
        summary = "units: dot -> omega=" + trojan::fmt_double(p.omega) +
                  " epsilon=" + trojan::fmt_double(p.epsilon) +
                  " branch=" + std::to_string(p.branch) + " (" +
                  trojan::fmt_double(rep.frequency_ghz) + " GHz, " +
                  trojan::fmt_double(rep.field_kv_per_m) + " kV/m)";
    } else if (o.p.atomic_units) {
        const trojan::ScaledParams sp = trojan::to_scaled(o.p.lab, o.p.dims, o.p.charge);
        j["params"] = params_json(sp.params);
        j["params"]["input_mode"] = "atomic-units";
        j["lab_input"] = json{{"cp_frequency", o.p.lab.cp_frequency},
                              {"cp_strength", o.p.lab.cp_strength},
                              {"cyclotron_frequency", o.p.lab.cyclotron_frequency}};
        j["units"] = json{{"length_au", sp.units.length_au},
                          {"energy_au", sp.units.energy_au},
                          {"time_au", sp.units.time_au},
                          {"field_au", sp.units.field_au}};
        summary = "units: atomic-units -> omega=" + trojan::fmt_double(sp.params.omega) +
                  " epsilon=" + trojan::fmt_double(sp.params.epsilon) +
                  " branch=" + std::to_string(sp.params.branch);
    } else {
        trojan::FieldParams p;
        p.omega = o.p.omega;
        p.epsilon = o.p.epsilon;
        p.branch = o.p.branch;
        p.dims = o.p.dims;
        p.charge = o.p.charge;
        p.validate();
        j["params"] = params_json(p);
        j["params"]["input_mode"] = "scaled";
        summary = "units: scaled omega=" + trojan::fmt_double(p.omega) +
                  " epsilon=" + trojan::fmt_double(p.epsilon) +
                  " branch=" + std::to_string(p.branch);
        if (o.p.have_cyclotron) {
            const trojan::LabParams lab = trojan::from_scaled(p, o.p.lab.cyclotron_frequency);
            const trojan::ScaledUnits u = trojan::scale_units(o.p.lab.cyclotron_frequency);
            j["lab"] = json{{"cp_frequency", lab.cp_frequency},
                            {"cp_strength", lab.cp_strength},
                            {"cyclotron_frequency", lab.cyclotron_frequency}};
            j["units"] = json{{"length_au", u.length_au},
                              {"energy_au", u.energy_au},
                              {"time_au", u.time_au},
                              {"field_au", u.field_au}};
            summary += " -> lab Omega=" + trojan::fmt_double(lab.cp_frequency) +
                       " E=" + trojan::fmt_double(lab.cp_strength) + " a.u.";
        }
    }
    write_json(out, j);
    std::cout << summary << " -> " << out.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// equilibrium
// ---------------------------------------------------------------------------

int run_equilibrium(const EquilibriumOpts& o) {
    const fs::path out = resolve_output(o.output, "equilibrium.json");
    json resolved;
    const trojan::FieldParams params = resolve_params(o.p, resolved);
    const trojan::EquilibriumType type = class_from_string(o.cls);
    std::vector<double> roots;
    const trojan::Equilibrium eq = build_equilibrium(params, type, o.angle, o.root_index, &roots);
    const trojan::StabilityReport rep = trojan::classify(trojan::linearization(eq, params));

    json j;
    j["params"] = resolved;
    j["class"] = trojan::to_string(eq.cls.type);
    if (eq.cls.type == trojan::EquilibriumType::TypeII_Transverse) j["angle"] = eq.cls.angle;
    j["positions"] = positions_json(eq.config);
    j["momenta"] = momenta_json(eq.momenta, eq.config.dims);
    j["side_length"] = eq.side_length;
    j["residual"] = eq.residual;
    j["roots"] = roots;
    if (type == trojan::EquilibriumType::TypeI_Langmuir) j["root_index"] = o.root_index;
    json eig = json::array();
    for (int i = 0; i < rep.eigenvalues.size(); ++i)
        eig.push_back(json::array({rep.eigenvalues[i].real(), rep.eigenvalues[i].imag()}));
    j["stability"] =
        json{{"eigenvalues", eig}, {"max_real_part", rep.max_real_part}, {"stable", rep.stable}};
    write_json(out, j);
    std::cout << "equilibrium: class=" << trojan::to_string(eq.cls.type)
              << " side_length=" << trojan::fmt_double(eq.side_length)
              << " residual=" << trojan::fmt_double(eq.residual)
              << " stable=" << (rep.stable ? 1 : 0) << " -> " << out.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

int run_scan(const ScanOpts& o) {
    apply_threads(o.threads);
    const fs::path out = resolve_output(o.output, "scan.csv");
    const RangeSpec ro = parse_range(o.omega_range, "--omega");
    const RangeSpec re = parse_range(o.epsilon_range, "--epsilon");
    trojan::FieldParams base;
    base.omega = ro.stop;  // placeholder inside the valid range; cells set their own
    base.epsilon = re.start;
    base.branch = o.p.branch;
    base.dims = o.p.dims;
    base.charge = o.p.charge;
    const trojan::EquilibriumClass cls{class_from_string(o.cls), o.angle};

    const trojan::StabilityMap map = trojan::scan({ro.start, ro.stop}, {re.start, re.stop},
                                                  {ro.count, re.count}, base, cls);

    const std::string branch_str = base.branch > 0 ? "+1" : "-1";
    trojan::CsvBuilder csv("omega,epsilon,branch,root_index,side_length,max_real_part,stable");
    long long roots_total = 0;
    long long stable_roots = 0;
    long long stable_cells = 0;
    long long stable_above = 0;   // stable cells with omega > 1
    long long stable_at_most = 0; // stable cells with omega <= 1
    long long with_eq = 0;
    long long noted = 0;
    for (std::size_t i = 0; i < map.omega_axis.size(); ++i) {
        for (std::size_t j = 0; j < map.epsilon_axis.size(); ++j) {
            const trojan::StabilityCell& cell = map.cell(static_cast<int>(i), static_cast<int>(j));
            const double w = map.omega_axis[i];
            const double e = map.epsilon_axis[j];
            if (!cell.note.empty()) ++noted;
            if (!cell.has_equilibrium) {
                csv.row(w, e, branch_str, "", "", "", "");
                continue;
            }
            ++with_eq;
            if (cell.any_stable) {
                ++stable_cells;
                (w > 1.0 ? stable_above : stable_at_most) += 1;
            }
            for (std::size_t k = 0; k < cell.side_lengths.size(); ++k) {
                ++roots_total;
                const int st = cell.stable[k] != 0 ? 1 : 0;
                stable_roots += st;
                csv.row(w, e, branch_str, static_cast<int>(k), cell.side_lengths[k],
                        cell.max_real_parts[k], st);
            }
        }
    }
    trojan::atomic_write_text(out, csv.text);

    fs::path summary_path = out;
    summary_path.replace_extension(".json");
    if (summary_path == out) summary_path = out.string() + ".summary.json";
    json j;
    j["params"] = json{{"branch", base.branch},
                       {"dims", base.dims},
                       {"charge", base.charge},
                       {"class", o.cls},
                       {"input_mode", "scaled"}};
    j["omega"] = json{{"start", ro.start}, {"stop", ro.stop}, {"count", ro.count}};
    j["epsilon"] = json{{"start", re.start}, {"stop", re.stop}, {"count", re.count}};
    j["cells"] = static_cast<long long>(map.cells.size());
    j["cells_with_equilibrium"] = with_eq;
    j["roots"] = roots_total;
    j["stable_roots"] = stable_roots;
    j["stable_cells"] = stable_cells;
    j["stable_cells_omega_above_1"] = stable_above;
    j["stable_cells_omega_at_most_1"] = stable_at_most;
    j["cells_with_notes"] = noted;
    j["csv"] = out.filename().string();
    write_json(summary_path, j);

    std::cout << "scan: " << map.cells.size() << " cells, " << roots_total << " roots, "
              << stable_roots << " stable roots -> " << out.string() << " + "
              << summary_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// integrate
// ---------------------------------------------------------------------------

int run_integrate(const IntegrateOpts& o) {
    const fs::path out = resolve_output(o.output, "trajectory.csv");
    json resolved;
    const trojan::FieldParams params = resolve_params(o.p, resolved);

    trojan::PhaseState state;
    if (!o.q.empty()) {
        if (static_cast<int>(o.q.size()) != 2 * params.dims)
            throw usage_error("--q: expected " + std::to_string(2 * params.dims) +
                              " comma-separated coordinates");
        trojan::Configuration cfg(params.dims, Eigen::VectorXd::Zero(2 * params.dims));
        for (int i = 0; i < 2 * params.dims; ++i) cfg.q[i] = o.q[static_cast<std::size_t>(i)];
        Eigen::VectorXd p;
        if (!o.mom.empty()) {
            if (static_cast<int>(o.mom.size()) != 2 * params.dims)
                throw usage_error("--p: expected " + std::to_string(2 * params.dims) +
                                  " comma-separated momenta");
            p = Eigen::Map<const Eigen::VectorXd>(o.mom.data(),
                                                  static_cast<Eigen::Index>(o.mom.size()));
        } else {
            p = trojan::zero_velocity_momenta(cfg, params);
        }
        state = trojan::PhaseState(cfg, p);
    } else {
        if (!o.mom.empty()) throw usage_error("--p requires --q");
        const trojan::Equilibrium eq =
            build_equilibrium(params, class_from_string(o.cls), o.angle, o.root_index, nullptr);
        state = eq.state();
        if (o.perturb != 0.0) {
            state.config.q.array() += o.perturb;
            state.p.array() += o.perturb;
        }
    }

    const double period = 2.0 * M_PI / params.omega;
    const double t_final = o.t_final > 0.0 ? o.t_final : o.periods * period;
    trojan::IntegrationControl control;
    control.rel_tol = o.rel_tol;
    control.abs_tol = o.abs_tol;
    control.samples_per_period = o.samples_per_period;
    const int direction = o.backward ? -1 : +1;

    const trojan::Trajectory traj = trojan::integrate(state, params, t_final, control, direction);
    const trojan::Trajectory* coords = &traj;
    trojan::Trajectory lab;
    if (o.lab_frame) {
        lab = trojan::to_lab_frame(traj, params.omega);
        coords = &lab;
    }

    const std::string header =
        params.dims == 3 ? "t,x1,y1,z1,x2,y2,z2,px1,py1,pz1,px2,py2,pz2,energy"
                         : "t,x1,y1,x2,y2,px1,py1,px2,py2,energy";
    trojan::CsvBuilder csv(header);
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
        const trojan::PhaseState& ps = coords->samples[s].state;
        std::string line = trojan::fmt_double(coords->samples[s].t);
        for (int i = 0; i < 2 * params.dims; ++i)
            line += "," + trojan::fmt_double(ps.config.q[i]);
        for (int i = 0; i < 2 * params.dims; ++i) line += "," + trojan::fmt_double(ps.p[i]);
        // energy is the rotating-frame integral of motion, frame flag or not
        line += "," + trojan::fmt_double(trojan::hamiltonian(traj.samples[s].state, params));
        csv.text.append(line);
        csv.text.push_back('\n');
    }
    trojan::atomic_write_text(out, csv.text);
    std::cout << "integrate: t_final=" << trojan::fmt_double(t_final) << " samples="
              << traj.samples.size() << " energy_drift=" << trojan::fmt_double(traj.energy_drift)
              << (o.lab_frame ? " frame=lab" : " frame=rotating") << " -> " << out.string()
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// dmc
// ---------------------------------------------------------------------------

int run_dmc(const DmcOpts& o) {
    apply_threads(o.threads);
    const fs::path out = resolve_output(o.output, "dmc.json");
    if (o.bins < 1) throw usage_error("--bins must be >= 1");
    json resolved;
    const trojan::FieldParams params = resolve_params(o.p, resolved);

    const trojan::DmcResult result = trojan::run_dmc(params, o.cfg);

    std::vector<std::string> csv_names;
    const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
    const std::string stem = out.stem().string();
    for (const std::string& plane : o.planes) {
        const trojan::Histogram2D h1 = trojan::density_histogram(result, plane, o.bins, 1);
        const trojan::Histogram2D h2 = trojan::density_histogram(result, plane, o.bins, 2);
        trojan::CsvBuilder csv("bin_x,bin_y,count_e1,count_e2");
        for (int i = 0; i < o.bins; ++i)
            for (int j = 0; j < o.bins; ++j)
                csv.row(h1.centers1[static_cast<std::size_t>(i)],
                        h1.centers2[static_cast<std::size_t>(j)], h1.counts(i, j),
                        h2.counts(i, j));
        const fs::path csv_path = dir / (stem + "_" + plane + ".csv");
        trojan::atomic_write_text(csv_path, csv.text);
        csv_names.push_back(csv_path.string());
    }

    json j;
    j["params"] = resolved;
    j["config"] = json{{"walker_target", o.cfg.walker_target},
                       {"time_step", o.cfg.time_step},
                       {"equilibration_steps", o.cfg.equilibration_steps},
                       {"accumulation_steps", o.cfg.accumulation_steps},
                       {"seed", o.cfg.seed},
                       {"box_hint", o.cfg.box_hint},
                       {"guided", o.cfg.guided},
                       {"guide_width", o.cfg.guide_width},
                       {"snapshot_stride", o.cfg.snapshot_stride},
                       {"plane", o.planes},
                       {"bins", o.bins}};
    j["energy"] = result.energy;
    j["error"] = result.error;
    j["reference_energy"] = result.reference_energy_trace.empty()
                                ? result.energy
                                : result.reference_energy_trace.back();
    json lobes = json::array();
    for (const trojan::LobeCenter& lc : result.lobe_centers) {
        lobes.push_back(json{{"electron", lc.electron + 1},
                             {"z_sign", lc.z_sign},
                             {"center", {lc.center[0], lc.center[1], lc.center[2]}},
                             {"weight", lc.weight}});
    }
    j["lobe_centers"] = lobes;
    j["matched_cubic_root"] = result.matched_cubic_root;
    j["matched_root_index"] = result.matched_root_index;
    j["cubic_roots"] = result.cubic_roots;
    j["host_root"] = result.host_root;
    j["snapshots"] = static_cast<long long>(result.snapshots.size());
    j["csv"] = csv_names;
    write_json(out, j);

    std::cout << "dmc: energy=" << trojan::fmt_double(result.energy) << " +/- "
              << trojan::fmt_double(result.error)
              << " matched_root_index=" << result.matched_root_index << " -> " << out.string();
    for (const std::string& n : csv_names) std::cout << " + " << n;
    std::cout << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// zvs-slice
// ---------------------------------------------------------------------------

int coord_index(const std::string& name, int dims) {
    if (name.size() != 2) throw usage_error("bad coordinate name '" + name + "'");
    const char axis = name[0];
    const char elec = name[1];
    int a = -1;
    if (axis == 'x') a = 0;
    else if (axis == 'y') a = 1;
    else if (axis == 'z') a = 2;
    if (a < 0 || (elec != '1' && elec != '2'))
        throw usage_error("bad coordinate name '" + name + "' (expected x1..z2)");
    if (a >= dims)
        throw usage_error("coordinate '" + name + "' does not exist for dims = " +
                          std::to_string(dims));
    return (elec - '1') * dims + a;
}

int run_slice(const SliceOpts& o) {
    const fs::path out = resolve_output(o.output, "zvs_slice.csv");
    json resolved;
    const trojan::FieldParams params = resolve_params(o.p, resolved);
    const int i1 = coord_index(o.coord1, params.dims);
    const int i2 = coord_index(o.coord2, params.dims);
    if (i1 == i2) throw usage_error("--coord1 and --coord2 must differ");
    const RangeSpec r1 = parse_range(o.range1, "--range1");
    const RangeSpec r2 = parse_range(o.range2, "--range2");

    trojan::Configuration cfg(params.dims, Eigen::VectorXd::Zero(2 * params.dims));
    if (!o.base.empty()) {
        if (static_cast<int>(o.base.size()) != 2 * params.dims)
            throw usage_error("--base: expected " + std::to_string(2 * params.dims) +
                              " comma-separated coordinates");
        for (int i = 0; i < 2 * params.dims; ++i) cfg.q[i] = o.base[static_cast<std::size_t>(i)];
    } else {
        const trojan::Equilibrium eq = build_equilibrium(
            params, trojan::EquilibriumType::TypeI_Langmuir, M_PI, o.root_index, nullptr);
        cfg = eq.config;
    }

    trojan::CsvBuilder csv("coord1,coord2,value");
    for (int a = 0; a < r1.count; ++a) {
        const double v1 = r1.start + (r1.stop - r1.start) * a / (r1.count - 1);
        for (int b = 0; b < r2.count; ++b) {
            const double v2 = r2.start + (r2.stop - r2.start) * b / (r2.count - 1);
            trojan::Configuration probe = cfg;
            probe.q[i1] = v1;
            probe.q[i2] = v2;
            double value = std::numeric_limits<double>::infinity();
            try {
                value = trojan::zvs(probe, params);
            } catch (const trojan::singular_configuration&) {
                // coincident with a singularity: record +inf
            }
            csv.row(v1, v2, value);
        }
    }
    trojan::atomic_write_text(out, csv.text);
    std::cout << "zvs-slice: " << r1.count << "x" << r2.count << " samples of " << o.coord1
              << "," << o.coord2 << " -> " << out.string() << "\n";
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    std::vector<std::string> tokens(argv + 1, argv + argc);
    try {
        merge_config_tokens(tokens);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"two-electron rotating-frame toolkit"};
    app.require_subcommand(1);

    UnitsOpts units_o;
    auto* units_cmd = app.add_subcommand("units", "unit conversions and parameter resolution");
    add_config_option(units_cmd, units_o.p);
    add_scaled_options(units_cmd, units_o.p);
    add_mode_options(units_cmd, units_o.p);
    units_cmd->add_option("--output", units_o.output, "output JSON path");

    EquilibriumOpts eq_o;
    auto* eq_cmd = app.add_subcommand("equilibrium", "construct and classify one equilibrium");
    add_config_option(eq_cmd, eq_o.p);
    add_scaled_options(eq_cmd, eq_o.p);
    add_mode_options(eq_cmd, eq_o.p);
    eq_cmd->add_option("--class", eq_o.cls, "equilibrium class: I, II, IIIa, IIIb");
    eq_cmd->add_option("--angle", eq_o.angle, "Type II seed angle (radians)");
    eq_cmd->add_option("--root-index", eq_o.root_index, "cubic root index, ascending from 0");
    eq_cmd->add_option("--output", eq_o.output, "output JSON path");

    ScanOpts scan_o;
    auto* scan_cmd = app.add_subcommand("scan", "stability map over an (omega, epsilon) grid");
    add_config_option(scan_cmd, scan_o.p);
    scan_cmd->add_option("--omega", scan_o.omega_range, "omega range start:stop:count")
        ->required();
    scan_cmd->add_option("--epsilon", scan_o.epsilon_range, "epsilon range start:stop:count")
        ->required();
    scan_cmd->add_option("--branch", scan_o.p.branch, "+1 or -1")->check(CLI::IsMember({1, -1}));
    scan_cmd->add_option("--dims", scan_o.p.dims, "spatial dimensions")
        ->check(CLI::IsMember({2, 3}));
    scan_cmd->add_option("--charge", scan_o.p.charge, "nuclear charge Z");
    scan_cmd->add_option("--class", scan_o.cls, "equilibrium class: I, II, IIIa, IIIb");
    scan_cmd->add_option("--angle", scan_o.angle, "Type II seed angle (radians)");
    scan_cmd->add_option("--threads", scan_o.threads, "cap worker threads");
    scan_cmd->add_option("--output", scan_o.output, "output CSV path");

    IntegrateOpts int_o;
    auto* int_cmd = app.add_subcommand("integrate", "integrate a trajectory");
    add_config_option(int_cmd, int_o.p);
    add_scaled_options(int_cmd, int_o.p);
    add_mode_options(int_cmd, int_o.p);
    int_cmd->add_option("--class", int_o.cls, "starting equilibrium class");
    int_cmd->add_option("--angle", int_o.angle, "Type II seed angle (radians)");
    int_cmd->add_option("--root-index", int_o.root_index, "cubic root index");
    int_cmd->add_option("--q", int_o.q, "explicit initial coordinates, comma separated")
        ->delimiter(',');
    int_cmd->add_option("--p", int_o.mom, "explicit initial momenta, comma separated")
        ->delimiter(',');
    int_cmd->add_option("--perturb", int_o.perturb, "offset added to every coordinate/momentum");
    auto* per_opt = int_cmd->add_option("--periods", int_o.periods, "duration in rotation periods");
    auto* tf_opt = int_cmd->add_option("--t-final", int_o.t_final, "duration in scaled time");
    per_opt->excludes(tf_opt);
    tf_opt->excludes(per_opt);
    int_cmd->add_option("--samples-per-period", int_o.samples_per_period, "output samples per period");
    int_cmd->add_option("--rel-tol", int_o.rel_tol, "integrator relative tolerance");
    int_cmd->add_option("--abs-tol", int_o.abs_tol, "integrator absolute tolerance");
    int_cmd->add_flag("--backward", int_o.backward, "integrate backward in time");
    int_cmd->add_flag("--lab-frame", int_o.lab_frame, "emit laboratory-frame coordinates");
    int_cmd->add_option("--output", int_o.output, "output CSV path");

    DmcOpts dmc_o;
    auto* dmc_cmd = app.add_subcommand("dmc", "diffusion Monte Carlo ground-state run");
    add_config_option(dmc_cmd, dmc_o.p);
    add_scaled_options(dmc_cmd, dmc_o.p);
    add_mode_options(dmc_cmd, dmc_o.p);
    dmc_cmd->add_option("--walker-target", dmc_o.cfg.walker_target, "target walker population");
    dmc_cmd->add_option("--time-step", dmc_o.cfg.time_step, "imaginary time step");
    dmc_cmd->add_option("--equilibration-steps", dmc_o.cfg.equilibration_steps,
                        "generations before accumulation");
    dmc_cmd->add_option("--accumulation-steps", dmc_o.cfg.accumulation_steps,
                        "accumulation generations");
    dmc_cmd->add_option("--seed", dmc_o.cfg.seed, "RNG seed");
    dmc_cmd->add_option("--box-hint", dmc_o.cfg.box_hint, "initial distribution extent");
    dmc_cmd->add_flag("--guided", dmc_o.cfg.guided, "use the Gaussian guiding function");
    dmc_cmd->add_option("--guide-width", dmc_o.cfg.guide_width, "guide Gaussian width");
    dmc_cmd->add_option("--snapshot-stride", dmc_o.cfg.snapshot_stride,
                        "keep every Nth accumulation ensemble");
    dmc_cmd->add_option("--plane", dmc_o.planes, "histogram planes, e.g. xz,xy")->delimiter(',');
    dmc_cmd->add_option("--bins", dmc_o.bins, "histogram bins per axis");
    dmc_cmd->add_option("--threads", dmc_o.threads, "cap worker threads");
    dmc_cmd->add_option("--output", dmc_o.output, "output JSON path");

    SliceOpts slice_o;
    auto* slice_cmd = app.add_subcommand("zvs-slice", "sample the ZVS on a 2D slice");
    add_config_option(slice_cmd, slice_o.p);
    add_scaled_options(slice_cmd, slice_o.p);
    add_mode_options(slice_cmd, slice_o.p);
    slice_cmd->add_option("--coord1", slice_o.coord1, "first varied coordinate (x1..z2)")
        ->required();
    slice_cmd->add_option("--coord2", slice_o.coord2, "second varied coordinate (x1..z2)")
        ->required();
    slice_cmd->add_option("--range1", slice_o.range1, "range for coord1, start:stop:count")
        ->required();
    slice_cmd->add_option("--range2", slice_o.range2, "range for coord2, start:stop:count")
        ->required();
    slice_cmd->add_option("--base", slice_o.base, "base configuration, comma separated")
        ->delimiter(',');
    slice_cmd->add_option("--root-index", slice_o.root_index,
                          "cubic root index for the default base");
    slice_cmd->add_option("--output", slice_o.output, "output CSV path");

    std::vector<const char*> cargv;
    cargv.push_back(argc > 0 ? argv[0] : "trojan");
    for (const std::string& t : tokens) cargv.push_back(t.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the named offending option/token
        return 2;
    }

    try {
        if (units_cmd->parsed()) return run_units(units_o);
        if (eq_cmd->parsed()) return run_equilibrium(eq_o);
        if (scan_cmd->parsed()) return run_scan(scan_o);
        if (int_cmd->parsed()) return run_integrate(int_o);
        if (dmc_cmd->parsed()) return run_dmc(dmc_o);
        if (slice_cmd->parsed()) return run_slice(slice_o);
        std::cerr << "usage error: no subcommand\n";
        return 2;
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const trojan::invalid_input& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
