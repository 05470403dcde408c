#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "udw/kernels.hpp"
#include "udw/spacetime.hpp"

namespace udw {

enum class ScenarioId {
    vacuum_curves,
    thermal_curves,
    coherent_curves,
    coherent_field_grid,
    oneparticle_curves,
    oneparticle_diff_grid,
    tomography_roundtrip,
    convergence_sweep,
    shot_noise_study,
};

const char* to_string(ScenarioId id);
ScenarioId scenario_from_string(const std::string& name);  // ConfigError("scenario_id") if unknown

struct ScenarioInfo {
    ScenarioId id;
    const char* summary;
};
const std::vector<ScenarioInfo>& list_scenarios();

// Inclusive arithmetic range min, min + step, ... <= max (with 1e-9 relative slack at the top).
struct Range {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;
    std::size_t size() const;
    double at(std::size_t k) const { return min + static_cast<double>(k) * step; }
};

struct Grid {
    Range t;
    Range x;
};

// All lengths in units where ell = 1 unless `ell` is overridden.
struct ScenarioConfig {
    ScenarioId id = ScenarioId::vacuum_curves;
    StateTag state = StateTag::vacuum;  // tomography, shot noise, convergence
    double ell = 1.0;
    double beta = 50.0;
    double delta = 1.5;
    Range s_range{-20.0, 20.0, 0.25};
    Event anchor{};  // fixed x_i for coherent / one-particle scans
    Grid grid;
    LatticeSpec lattice;
    double lambda = 0.0;  // 0 means "pick so that H_ii = 0.5" for vacuum
    std::optional<std::uint64_t> shots;
    std::vector<std::uint64_t> shots_list;
    std::size_t trials = 8;
    double sep_dt = 0.0;
    double sep_dr = 1.0;
    std::vector<double> ell_grid;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    bool quadrature_columns = false;
    unsigned threads = 1;
    double tol = 1e-10;

    FieldState field_state() const;
};

// Defaults reproduce the reference curves, grids and protocol at desk scale.
ScenarioConfig default_config(ScenarioId id);

// Parses a JSON config: scenario_id is required, every other key overrides a
// default. Unknown keys and keys the scenario does not use are rejected.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& config);

// Fully resolved config as JSON (sorted keys), written next to the outputs.
std::string resolved_json(const ScenarioConfig& config);

struct RunReport {
    std::vector<std::filesystem::path> files;
    std::size_t point_errors = 0;  // rows with a non-empty errors column
    std::vector<std::string> summary;
};

// Runs a validated scenario. Per-point kernel failures go to the errors column;
// failures that invalidate the whole scenario propagate.
RunReport run(const ScenarioConfig& config);

}  // namespace udw
