#include "udw/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "udw/csv.hpp"
#include "udw/detector.hpp"
#include "udw/errors.hpp"
#include "udw/kernel_io.hpp"
#include "udw/multipole.hpp"
#include "udw/numerics.hpp"
#include "udw/parallel.hpp"
#include "udw/tomography.hpp"

namespace udw {

using nlohmann::json;

namespace {

constexpr std::size_t max_points = 4'000'000;
constexpr double target_hii = 0.5;

const std::vector<ScenarioInfo> scenario_table = {
    {ScenarioId::vacuum_curves, "vacuum W vs s/ell: pointlike, smeared closed form, multipole estimate"},
    {ScenarioId::thermal_curves, "vacuum and thermal W vs s/ell at inverse temperature beta"},
    {ScenarioId::coherent_curves, "coherent-state W vs s/ell from a fixed anchor event"},
    {ScenarioId::coherent_field_grid, "classical coherent field phi0 on a (t, x) grid"},
    {ScenarioId::oneparticle_curves, "one-particle wavepacket W vs s/ell from a fixed anchor event"},
    {ScenarioId::oneparticle_diff_grid, "one-particle minus vacuum W on a (t, x) grid"},
    {ScenarioId::tomography_roundtrip, "kernels -> correlators -> reconstructed Hadamard function on a lattice"},
    {ScenarioId::convergence_sweep, "residual of the multipole estimate vs ell and its log-log slope"},
    {ScenarioId::shot_noise_study, "reconstruction RMS error vs number of shots"},
};

const std::set<std::string> common_keys = {"scenario_id", "seed", "output_dir", "threads", "tol"};

std::set<std::string> scenario_keys(ScenarioId id) {
    switch (id) {
        case ScenarioId::vacuum_curves: return {"ell", "s_range"};
        case ScenarioId::thermal_curves: return {"ell", "s_range", "beta"};
        case ScenarioId::coherent_curves:
        case ScenarioId::oneparticle_curves:
            return {"ell", "s_range", "delta", "anchor", "enable_quadrature_columns"};
        case ScenarioId::coherent_field_grid: return {"delta", "grid"};
        case ScenarioId::oneparticle_diff_grid: return {"delta", "anchor", "grid"};
        case ScenarioId::tomography_roundtrip: return {"state", "beta", "ell", "lattice", "lambda", "shots"};
        case ScenarioId::convergence_sweep: return {"state", "beta", "delta", "separation", "ell_grid"};
        case ScenarioId::shot_noise_study:
            return {"state", "beta", "ell", "lattice", "lambda", "shots_list", "trials"};
    }
    return {};
}

bool is_curves(ScenarioId id) {
    return id == ScenarioId::vacuum_curves || id == ScenarioId::thermal_curves ||
           id == ScenarioId::coherent_curves || id == ScenarioId::oneparticle_curves;
}

bool is_grid(ScenarioId id) {
    return id == ScenarioId::coherent_field_grid || id == ScenarioId::oneparticle_diff_grid;
}

// ---- JSON field readers -------------------------------------------------

double get_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
    return v;
}

std::uint64_t get_count(const json& j, const std::string& field) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) throw ConfigError(field, "must be non-negative");
    // Accept 1e6-style literals when they are exact integers.
    const double v = get_number(j, field);
    if (v < 0.0 || v != std::floor(v) || v > 9.0e15) throw ConfigError(field, "expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

void check_object(const json& j, const std::string& field, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(field, "expected an object");
    for (const auto& [k, v] : j.items()) {
        if (!allowed.count(k)) throw ConfigError(field + "." + k, "unknown key");
    }
}

Range get_range(const json& j, const std::string& field, Range r) {
    check_object(j, field, {"min", "max", "step"});
    if (j.contains("min")) r.min = get_number(j["min"], field + ".min");
    if (j.contains("max")) r.max = get_number(j["max"], field + ".max");
    if (j.contains("step")) r.step = get_number(j["step"], field + ".step");
    return r;
}

Event get_event(const json& j, const std::string& field, Event e) {
    check_object(j, field, {"t", "x", "y", "z"});
    if (j.contains("t")) e.t = get_number(j["t"], field + ".t");
    if (j.contains("x")) e.x = get_number(j["x"], field + ".x");
    if (j.contains("y")) e.y = get_number(j["y"], field + ".y");
    if (j.contains("z")) e.z = get_number(j["z"], field + ".z");
    return e;
}

json range_json(const Range& r) { return {{"min", r.min}, {"max", r.max}, {"step", r.step}}; }
json event_json(const Event& e) { return {{"t", e.t}, {"x", e.x}, {"y", e.y}, {"z", e.z}}; }

// ---- evaluation helpers ------------------------------------------------

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

// Evaluates one cell; a failure becomes "nan" plus an entry in the row's error list.
struct RowErrors {
    std::vector<std::string> items;

    std::string cell(const char* column, const std::function<double()>& f) {
        try {
            return csv::format(f());
        } catch (const std::exception& e) {
            items.push_back(std::string(column) + ": " + sanitize(e.what()));
            return "nan";
        }
    }

    std::string joined() const {
        std::string out;
        for (const auto& s : items) out += (out.empty() ? "" : " | ") + s;
        return out;
    }
};

using Rows = std::vector<std::vector<std::string>>;

std::size_t write_rows(const std::filesystem::path& path, const std::vector<std::string>& header, const Rows& rows) {
    csv::Writer w(path, header);
    std::size_t errors = 0;
    for (const auto& r : rows) {
        w.row(r);
        if (header.back() == "errors" && !r.back().empty()) ++errors;
    }
    return errors;
}

// Curves: s > 0 separates in x at equal time, s < 0 in t at equal position.
GaussianRegion partner(const Event& anchor, double s, double ell) {
    Event e = anchor;
    if (s >= 0.0) {
        e.x += s;
    } else {
        e.t += -s;
    }
    return {e, ell};
}

double real_part(const std::optional<numerics::complex>& w) {
    if (!w) throw DomainError("no closed form at this separation");
    return w->real();
}

RunReport run_curves(const ScenarioConfig& c) {
    const FieldState vac = FieldState::vacuum();
    const FieldState st = c.field_state();
    const bool anchored = c.id == ScenarioId::coherent_curves || c.id == ScenarioId::oneparticle_curves;
    const Event anchor = anchored ? c.anchor : Event{};
    const bool quad = anchored && c.quadrature_columns;

    std::vector<std::string> header;
    if (c.id == ScenarioId::vacuum_curves) {
        header = {"s_over_ell", "pointlike", "smeared_closed", "multipole"};
    } else if (c.id == ScenarioId::thermal_curves) {
        header = {"s_over_ell",        "pointlike",       "smeared_closed",   "multipole",
                  "thermal_pointlike", "thermal_smeared", "thermal_multipole"};
    } else {
        header = {"s_over_ell", "vacuum", "state_kernel", "multipole"};
        if (quad) header.push_back("smeared_quadrature");
    }
    header.push_back("errors");

    const std::size_t n = c.s_range.size();
    Rows rows(n);
    parallel_for(n, c.threads, [&](std::size_t k) {
        const double s_over = c.s_range.at(k);
        const GaussianRegion ri{anchor, c.ell};
        const GaussianRegion rj = partner(anchor, s_over * c.ell, c.ell);
        RowErrors err;
        std::vector<std::string> row{csv::format(s_over)};
        if (c.id == ScenarioId::vacuum_curves || c.id == ScenarioId::thermal_curves) {
            row.push_back(err.cell("pointlike", [&] { return hadamard_point(vac, ri.center, rj.center); }));
            row.push_back(err.cell("smeared_closed", [&] { return real_part(wightman_smeared_closed(vac, ri, rj)); }));
            row.push_back(err.cell("multipole", [&] { return estimate(vac, ri, rj).value; }));
            if (c.id == ScenarioId::thermal_curves) {
                row.push_back(err.cell("thermal_pointlike", [&] { return hadamard_point(st, ri.center, rj.center); }));
                row.push_back(err.cell("thermal_smeared",
                                       [&] { return wightman_smeared_quadrature(st, ri, rj, c.tol).real(); }));
                row.push_back(err.cell("thermal_multipole", [&] { return estimate(st, ri, rj).value; }));
            }
        } else {
            row.push_back(err.cell("vacuum", [&] { return hadamard_point(vac, ri.center, rj.center); }));
            row.push_back(err.cell("state_kernel", [&] { return hadamard_point(st, ri.center, rj.center); }));
            row.push_back(err.cell("multipole", [&] { return estimate(st, ri, rj).value; }));
            if (quad) {
                row.push_back(err.cell("smeared_quadrature",
                                       [&] { return wightman_smeared_quadrature(st, ri, rj, c.tol).real(); }));
            }
        }
        row.push_back(err.joined());
        rows[k] = std::move(row);
    });

    RunReport report;
    const auto path = c.output_dir / (std::string(to_string(c.id)) + ".csv");
    report.point_errors = write_rows(path, header, rows);
    report.files.push_back(path);
    report.summary.push_back(std::to_string(n) + " points");
    return report;
}

RunReport run_grid(const ScenarioConfig& c) {
    const std::size_t nt = c.grid.t.size(), nx = c.grid.x.size();
    const std::size_t n = nt * nx;
    const bool coherent = c.id == ScenarioId::coherent_field_grid;
    const numerics::complex f_anchor = coherent ? numerics::complex{} : F_oneparticle(c.delta, c.anchor);
    Rows rows(n);
    parallel_for(n, c.threads, [&](std::size_t k) {
        const Event e{c.grid.t.at(k / nx), c.grid.x.at(k % nx), 0.0, 0.0};
        RowErrors err;
        std::string v;
        if (coherent) {
            v = err.cell("value", [&] { return phi0_coherent(c.delta, e); });
        } else {
            // W_psi - W_0 = 2 Re[F(x_i) F*(x)], no pointlike singularity to subtract.
            v = err.cell("value", [&] { return 2.0 * (f_anchor * std::conj(F_oneparticle(c.delta, e))).real(); });
        }
        rows[k] = {csv::format(e.t), csv::format(e.x), v, err.joined()};
    });
    RunReport report;
    const auto path = c.output_dir / (std::string(to_string(c.id)) + ".csv");
    report.point_errors = write_rows(path, {"t", "x", "value", "errors"}, rows);
    report.files.push_back(path);
    report.summary.push_back(std::to_string(nt) + " x " + std::to_string(nx) + " grid");
    return report;
}

// Lattice kernels; lambda = 0 rescales so that max H_ii = 0.5.
KernelMatrix lattice_kernels(const ScenarioConfig& c) {
    std::vector<GaussianRegion> regions;
    for (const Event& e : build_lattice(c.lattice)) regions.push_back({e, c.ell});
    if (c.lambda > 0.0) return assemble_kernels(c.field_state(), regions, c.lambda, c.tol, c.threads);
    const KernelMatrix unit = assemble_kernels(c.field_state(), regions, 1.0, c.tol, c.threads);
    const double scale = target_hii / unit.H.diagonal().maxCoeff();
    KernelMatrix k = KernelMatrix::from_parts(unit.H * scale, unit.GR * scale, std::sqrt(scale));
    k.state = unit.state;
    k.warnings = unit.warnings;
    return k;
}

RunReport run_tomography(const ScenarioConfig& c) {
    const KernelMatrix k = lattice_kernels(c);
    const ObservableTable exact = exact_observables(k);
    const ObservableTable table = c.shots ? sample_observables(exact, *c.shots, c.seed) : exact;
    const auto results = reconstruct_all(table, k.E, k.H);
    const double max_err = max_abs_error(results);

    RunReport report;
    const auto path = c.output_dir / "tomography_roundtrip.csv";
    write_reconstruction_csv(path, results, max_err);
    report.files.push_back(path);
    const auto corr = c.output_dir / "correlations.csv";
    write_correlations_csv(corr, exact, table);
    report.files.push_back(corr);
    report.files.push_back(write_kernel_matrix(k, c.output_dir, "kernels"));

    std::size_t causal = 0;
    for (const auto& r : results) {
        if (r.regime == Regime::causal) ++causal;
        if (!r.flags.empty()) ++report.point_errors;
    }
    report.summary.push_back(std::to_string(k.n) + " regions, lambda = " + csv::format(k.lambda));
    report.summary.push_back(std::to_string(results.size() - causal) + " spacelike pairs, " + std::to_string(causal) +
                             " causal pairs");
    report.summary.push_back("max |H_rec - H_true| = " + csv::format(max_err));
    return report;
}

RunReport run_convergence(const ScenarioConfig& c) {
    const FieldState st = c.field_state();
    Rows rows;
    RunReport report;
    for (bool quadrupole : {true, false}) {
        const ConvergenceStudy study = convergence_study(st, c.sep_dt, c.sep_dr, c.ell_grid, c.tol, quadrupole);
        const char* order = quadrupole ? "quadrupole" : "pointlike";
        for (const auto& p : study.points) {
            rows.push_back({csv::format(p.ell), order, csv::format(p.reference), csv::format(p.estimate),
                            csv::format(p.residual), p.used ? "1" : "0", csv::format(study.fit.slope)});
        }
        report.summary.push_back(std::string(order) + " slope = " + csv::format(study.fit.slope));
    }
    const auto path = c.output_dir / "convergence_sweep.csv";
    write_rows(path, {"ell", "order", "reference", "estimate", "residual", "used", "slope"}, rows);
    report.files.push_back(path);
    return report;
}

RunReport run_shot_noise(const ScenarioConfig& c) {
    const KernelMatrix k = lattice_kernels(c);
    const ObservableTable exact = exact_observables(k);
    const std::size_t ns = c.shots_list.size(), nt = c.trials;

    struct Cell {
        double sum_sq = 0.0;
        double max_abs = 0.0;
        std::size_t count = 0;
        std::size_t failed = 0;
    };
    std::vector<Cell> cells(ns * nt);
    // Trial t uses the same derived seed at every shot count.
    parallel_for(ns * nt, c.threads, [&](std::size_t idx) {
        const std::size_t si = idx / nt, t = idx % nt;
        const auto sampled = sample_observables(exact, c.shots_list[si], derive_seed(c.seed, t));
        Cell cell;
        for (const auto& r : reconstruct_all(sampled, k.E, k.H)) {
            const double e = r.H_reconstructed - *r.H_true;
            if (!std::isfinite(e)) {
                ++cell.failed;
                continue;
            }
            cell.sum_sq += e * e;
            cell.max_abs = std::max(cell.max_abs, std::abs(e));
            ++cell.count;
        }
        cells[idx] = cell;
    });

    Rows rows;
    std::vector<std::pair<double, double>> fit_points;
    RunReport report;
    for (std::size_t si = 0; si < ns; ++si) {
        Cell total;
        for (std::size_t t = 0; t < nt; ++t) {
            const Cell& x = cells[si * nt + t];
            total.sum_sq += x.sum_sq;
            total.max_abs = std::max(total.max_abs, x.max_abs);
            total.count += x.count;
            total.failed += x.failed;
        }
        const double rms = total.count ? std::sqrt(total.sum_sq / static_cast<double>(total.count)) : NAN;
        if (total.failed) ++report.point_errors;
        if (rms > 0.0) fit_points.emplace_back(static_cast<double>(c.shots_list[si]), rms);
        rows.push_back({std::to_string(c.shots_list[si]), csv::format(rms), csv::format(total.max_abs),
                        std::to_string(nt), std::to_string(total.failed)});
    }
    const auto path = c.output_dir / "shot_noise_study.csv";
    write_rows(path, {"shots", "rms_error", "max_abs_error", "trials", "failed_pairs"}, rows);
    report.files.push_back(path);

    if (fit_points.size() >= 3) {
        const auto fit = numerics::fit_loglog_slope(fit_points);
        const auto fit_path = c.output_dir / "shot_noise_fit.csv";
        write_rows(fit_path, {"slope", "intercept", "residual"},
                   {{csv::format(fit.slope), csv::format(fit.intercept), csv::format(fit.residual)}});
        report.files.push_back(fit_path);
        report.summary.push_back("rms slope = " + csv::format(fit.slope));
    }
    return report;
}

}  // namespace

// ---- identifiers -------------------------------------------------------

const char* to_string(ScenarioId id) {
    switch (id) {
        case ScenarioId::vacuum_curves: return "vacuum_curves";
        case ScenarioId::thermal_curves: return "thermal_curves";
        case ScenarioId::coherent_curves: return "coherent_curves";
        case ScenarioId::coherent_field_grid: return "coherent_field_grid";
        case ScenarioId::oneparticle_curves: return "oneparticle_curves";
        case ScenarioId::oneparticle_diff_grid: return "oneparticle_diff_grid";
        case ScenarioId::tomography_roundtrip: return "tomography_roundtrip";
        case ScenarioId::convergence_sweep: return "convergence_sweep";
        case ScenarioId::shot_noise_study: return "shot_noise_study";
    }
    return "?";
}

ScenarioId scenario_from_string(const std::string& name) {
    for (const auto& info : scenario_table) {
        if (name == to_string(info.id)) return info.id;
    }
    throw ConfigError("scenario_id", "unknown scenario '" + name + "'");
}

const std::vector<ScenarioInfo>& list_scenarios() { return scenario_table; }

std::size_t Range::size() const {
    if (!(step > 0.0) || !(max >= min)) return 0;
    return static_cast<std::size_t>(std::floor((max - min) / step * (1.0 + 1e-9) + 1e-9)) + 1;
}

FieldState ScenarioConfig::field_state() const {
    switch (id) {
        case ScenarioId::vacuum_curves: return FieldState::vacuum();
        case ScenarioId::thermal_curves: return FieldState::thermal(beta);
        case ScenarioId::coherent_curves:
        case ScenarioId::coherent_field_grid: return FieldState::coherent(delta);
        case ScenarioId::oneparticle_curves:
        case ScenarioId::oneparticle_diff_grid: return FieldState::one_particle(delta);
        default: break;
    }
    return FieldState{state, state == StateTag::thermal ? beta : 0.0,
                      state == StateTag::coherent || state == StateTag::one_particle ? delta : 0.0};
}

// ---- defaults and parsing ---------------------------------------------

ScenarioConfig default_config(ScenarioId id) {
    ScenarioConfig c;
    c.id = id;
    c.output_dir = std::string("out/") + to_string(id);
    c.lattice = LatticeSpec{2, 2, 10.0, 10.0, Event{}};
    switch (id) {
        case ScenarioId::coherent_curves:
            c.delta = 1.5;
            c.anchor = {-6.0, -6.0, 0.0, 0.0};
            break;
        case ScenarioId::coherent_field_grid:
            c.delta = 1.5;
            c.grid = {{-15.0, 15.0, 0.25}, {-15.0, 15.0, 0.25}};
            break;
        case ScenarioId::oneparticle_curves:
            c.delta = 10.0;
            c.anchor = {-60.0, -60.0, 0.0, 0.0};
            c.s_range = {-150.0, 150.0, 1.0};
            break;
        case ScenarioId::oneparticle_diff_grid:
            c.delta = 10.0;
            c.anchor = {-60.0, -60.0, 0.0, 0.0};
            c.grid = {{-80.0, 80.0, 1.0}, {-80.0, 80.0, 1.0}};
            break;
        case ScenarioId::convergence_sweep:
            // Residuals reach ~1e-7 at the smallest ell; the reference needs to be far below that.
            c.ell_grid = {0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1};
            c.tol = 1e-13;
            break;
        case ScenarioId::shot_noise_study:
            c.shots_list = {1000, 10000, 100000, 1000000, 10000000};
            break;
        default: break;
    }
    return c;
}

ScenarioConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("json", e.what());
    }
    if (!j.is_object()) throw ConfigError("json", "top level must be an object");
    if (!j.contains("scenario_id") || !j["scenario_id"].is_string()) {
        throw ConfigError("scenario_id", "required string field missing");
    }
    ScenarioConfig c = default_config(scenario_from_string(j["scenario_id"].get<std::string>()));

    const auto allowed = scenario_keys(c.id);
    for (const auto& [k, v] : j.items()) {
        if (common_keys.count(k) || allowed.count(k)) continue;
        bool known = false;
        for (const auto& info : scenario_table) known = known || scenario_keys(info.id).count(k);
        throw ConfigError(k, known ? std::string("not used by scenario ") + to_string(c.id) : "unknown key");
    }

    if (j.contains("seed")) c.seed = get_count(j["seed"], "seed");
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw ConfigError("output_dir", "expected a string");
        c.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("threads")) c.threads = static_cast<unsigned>(std::min<std::uint64_t>(get_count(j["threads"], "threads"), 1024));
    if (j.contains("tol")) c.tol = get_number(j["tol"], "tol");
    if (j.contains("state")) {
        if (!j["state"].is_string()) throw ConfigError("state", "expected a string");
        c.state = state_tag_from_string(j["state"].get<std::string>());
    }
    if (j.contains("ell")) c.ell = get_number(j["ell"], "ell");
    if (j.contains("beta")) c.beta = get_number(j["beta"], "beta");
    if (j.contains("delta")) c.delta = get_number(j["delta"], "delta");
    if (j.contains("lambda")) c.lambda = get_number(j["lambda"], "lambda");
    if (j.contains("s_range")) c.s_range = get_range(j["s_range"], "s_range", c.s_range);
    if (j.contains("anchor")) c.anchor = get_event(j["anchor"], "anchor", c.anchor);
    if (j.contains("grid")) {
        check_object(j["grid"], "grid", {"t", "x"});
        if (j["grid"].contains("t")) c.grid.t = get_range(j["grid"]["t"], "grid.t", c.grid.t);
        if (j["grid"].contains("x")) c.grid.x = get_range(j["grid"]["x"], "grid.x", c.grid.x);
    }
    if (j.contains("lattice")) {
        const json& l = j["lattice"];
        check_object(l, "lattice", {"n_space", "n_time", "spacing_space", "spacing_time", "origin"});
        if (l.contains("n_space")) c.lattice.n_space = get_count(l["n_space"], "lattice.n_space");
        if (l.contains("n_time")) c.lattice.n_time = get_count(l["n_time"], "lattice.n_time");
        if (l.contains("spacing_space")) c.lattice.spacing_space = get_number(l["spacing_space"], "lattice.spacing_space");
        if (l.contains("spacing_time")) c.lattice.spacing_time = get_number(l["spacing_time"], "lattice.spacing_time");
        if (l.contains("origin")) c.lattice.origin = get_event(l["origin"], "lattice.origin", c.lattice.origin);
    }
    if (j.contains("shots")) c.shots = get_count(j["shots"], "shots");
    if (j.contains("shots_list")) {
        if (!j["shots_list"].is_array()) throw ConfigError("shots_list", "expected an array");
        c.shots_list.clear();
        for (const auto& v : j["shots_list"]) c.shots_list.push_back(get_count(v, "shots_list"));
    }
    if (j.contains("trials")) c.trials = get_count(j["trials"], "trials");
    if (j.contains("separation")) {
        check_object(j["separation"], "separation", {"dt", "dr"});
        if (j["separation"].contains("dt")) c.sep_dt = get_number(j["separation"]["dt"], "separation.dt");
        if (j["separation"].contains("dr")) c.sep_dr = get_number(j["separation"]["dr"], "separation.dr");
    }
    if (j.contains("ell_grid")) {
        if (!j["ell_grid"].is_array()) throw ConfigError("ell_grid", "expected an array");
        c.ell_grid.clear();
        for (const auto& v : j["ell_grid"]) c.ell_grid.push_back(get_number(v, "ell_grid"));
    }
    if (j.contains("enable_quadrature_columns")) {
        if (!j["enable_quadrature_columns"].is_boolean()) {
            throw ConfigError("enable_quadrature_columns", "expected a boolean");
        }
        c.quadrature_columns = j["enable_quadrature_columns"].get<bool>();
    }
    validate(c);
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const ScenarioConfig& c) {
    auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive and finite");
    };
    auto check_range = [](const Range& r, const std::string& field) {
        if (!std::isfinite(r.min) || !std::isfinite(r.max)) throw ConfigError(field, "bounds must be finite");
        if (!(r.step > 0.0)) throw ConfigError(field + ".step", "must be positive");
        if (!(r.max >= r.min)) throw ConfigError(field, "empty range (max < min)");
        if (r.size() > max_points) throw ConfigError(field, "too many points");
    };
    positive(c.tol, "tol");
    if (c.threads < 1) throw ConfigError("threads", "must be >= 1");
    if (c.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");

    const auto keys = scenario_keys(c.id);
    if (keys.count("ell")) positive(c.ell, "ell");
    if (keys.count("s_range")) check_range(c.s_range, "s_range");
    if (is_grid(c.id)) {
        check_range(c.grid.t, "grid.t");
        check_range(c.grid.x, "grid.x");
        if (c.grid.t.size() * c.grid.x.size() > max_points) throw ConfigError("grid", "too many points");
    }

    const FieldState st = c.field_state();
    if (st.tag == StateTag::thermal) positive(c.beta, "beta");
    if (st.tag == StateTag::coherent || st.tag == StateTag::one_particle) positive(c.delta, "delta");

    if (c.id == ScenarioId::tomography_roundtrip || c.id == ScenarioId::shot_noise_study) {
        if (c.state != StateTag::vacuum && c.state != StateTag::thermal) {
            throw ConfigError("state", "lattice kernels are assembled for vacuum or thermal states only");
        }
        try {
            validate(c.lattice);
        } catch (const ConfigError& e) {
            throw ConfigError("lattice." + e.field(), e.what());
        }
        const std::size_t n = c.lattice.n_space * c.lattice.n_space * c.lattice.n_space * c.lattice.n_time;
        if (n < 2) throw ConfigError("lattice", "need at least two regions");
        // Correlators come from closed forms, so the lattice is not bound by the density-matrix limit.
        if (n > 64) throw ConfigError("lattice", "at most 64 regions");
        if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) throw ConfigError("lambda", "must be >= 0 (0 = auto)");
        if (c.shots && *c.shots < 1) throw ConfigError("shots", "must be >= 1");
    }
    if (c.id == ScenarioId::shot_noise_study) {
        if (c.shots_list.size() < 3) throw ConfigError("shots_list", "need at least three shot counts");
        for (auto s : c.shots_list) {
            if (s < 1) throw ConfigError("shots_list", "entries must be >= 1");
        }
        if (c.trials < 1) throw ConfigError("trials", "must be >= 1");
    }
    if (c.id == ScenarioId::convergence_sweep) {
        if (c.ell_grid.size() < 3) throw ConfigError("ell_grid", "need at least three values");
        const double sep = std::hypot(c.sep_dt, c.sep_dr);
        if (!std::isfinite(sep) || std::abs(std::abs(c.sep_dt) - std::abs(c.sep_dr)) < 1e-9 * std::max(sep, 1.0)) {
            throw ConfigError("separation", "must be finite and off the light cone");
        }
        if (c.sep_dr < 0.0) throw ConfigError("separation.dr", "must be >= 0");
        for (double e : c.ell_grid) {
            if (!(e > 0.0)) throw ConfigError("ell_grid", "values must be positive");
            if (e > sep / 10.0 * (1.0 + 1e-12)) throw ConfigError("ell_grid", "values must not exceed separation/10");
        }
    }
}

std::string resolved_json(const ScenarioConfig& c) {
    json j;
    j["scenario_id"] = to_string(c.id);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir.generic_string();
    j["threads"] = c.threads;
    j["tol"] = c.tol;
    const auto keys = scenario_keys(c.id);
    if (keys.count("state")) j["state"] = to_string(c.state);
    if (keys.count("ell")) j["ell"] = c.ell;
    if (keys.count("beta")) j["beta"] = c.beta;
    if (keys.count("delta")) j["delta"] = c.delta;
    if (keys.count("lambda")) j["lambda"] = c.lambda;
    if (keys.count("s_range")) j["s_range"] = range_json(c.s_range);
    if (keys.count("anchor")) j["anchor"] = event_json(c.anchor);
    if (keys.count("grid")) j["grid"] = {{"t", range_json(c.grid.t)}, {"x", range_json(c.grid.x)}};
    if (keys.count("lattice")) {
        j["lattice"] = {{"n_space", c.lattice.n_space},
                        {"n_time", c.lattice.n_time},
                        {"spacing_space", c.lattice.spacing_space},
                        {"spacing_time", c.lattice.spacing_time},
                        {"origin", event_json(c.lattice.origin)}};
    }
    if (keys.count("shots") && c.shots) j["shots"] = *c.shots;
    if (keys.count("shots_list")) j["shots_list"] = c.shots_list;
    if (keys.count("trials")) j["trials"] = c.trials;
    if (keys.count("separation")) j["separation"] = {{"dt", c.sep_dt}, {"dr", c.sep_dr}};
    if (keys.count("ell_grid")) j["ell_grid"] = c.ell_grid;
    if (keys.count("enable_quadrature_columns")) j["enable_quadrature_columns"] = c.quadrature_columns;
    return j.dump(2) + "\n";
}

RunReport run(const ScenarioConfig& c) {
    validate(c);
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec) throw ConfigError("output_dir", "cannot create " + c.output_dir.string() + ": " + ec.message());

    RunReport report;
    if (is_curves(c.id)) {
        report = run_curves(c);
    } else if (is_grid(c.id)) {
        report = run_grid(c);
    } else if (c.id == ScenarioId::tomography_roundtrip) {
        report = run_tomography(c);
    } else if (c.id == ScenarioId::convergence_sweep) {
        report = run_convergence(c);
    } else {
        report = run_shot_noise(c);
    }

    // threads and output_dir do not affect results; leaving them out keeps the
    // echo byte-identical between runs that differ only in those.
    json echoed = json::parse(resolved_json(c));
    echoed.erase("threads");
    echoed.erase("output_dir");
    const auto cfg = c.output_dir / "config.json";
    std::ofstream out(cfg, std::ios::binary);
    out << echoed.dump(2) << "\n";
    if (!out) throw ConfigError("output_dir", "cannot write " + cfg.string());
    report.files.push_back(cfg);
    return report;
}

}  // namespace udw
