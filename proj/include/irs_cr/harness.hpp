#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "irs_cr/channel.hpp"
#include "irs_cr/optimizer_ao.hpp"
#include "irs_cr/optimizer_lowcomplexity.hpp"

namespace irs_cr {

/// Joint design plus every two-stage design and baseline.
enum class Design { IrsAO, MaxAlphaPP, MaxAlphaSS, MinAlphaSP, MinAlphaPS, NoIrsWithSic, NoIrsWithoutSic };

std::string_view to_string(Design design);
std::optional<Design> parse_design(std::string_view name);
const std::vector<Design>& all_designs();

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Hotspot nodes (P1, S1) are drawn uniformly in a ground disc in front of the
// panel; far nodes (P2, S2) sit at far_distance on either side of the normal.
// Explicit positions override the random placement.
struct PlacementConfig {
    double hotspot_center_distance = 1.5;  // meters from the IRS foot along the normal
    double hotspot_radius = 2.0;
    double far_distance = 75.0;
    double far_azimuth_deg = 30.0;  // P2 at -azimuth, S2 at +azimuth from the normal
    double node_height = 0.0;       // antenna height of every randomly placed node
    std::optional<Vec3> p1, p2, s1, s2;
};

struct ScenarioConfig {
    int setup_id = 1;  // 1: PR+SR near the IRS, 2: PT+SR, 3: PR+ST

    double carrier_frequency_hz = 750e6;
    double wavelength = 0.4;
    int irs_rows = 6;
    int irs_cols = 10;
    double spacing_wavelengths = 0.375;
    Vec3 irs_position{0.0, 0.0, 2.0};
    Vec3 irs_normal{0.0, 1.0, 0.0};
    PlacementConfig placement;
    LinkFading fading;

    double p0_dbm = 20.0;
    double noise_dbm = -105.0;
    double gamma_th_db = 20.0;
    std::vector<double> sweep_dbm{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};

    int trials = 50;
    std::uint64_t master_seed = 1;
    std::vector<Design> designs = all_designs();
    AoOptions ao;
    // IrsAO also starts from the best two-stage reflection and keeps the
    // better of that run and the ao.init run(s).
    bool ao_warm_start = true;
    TwoStageOptions two_stage;
    int workers = 1;
    bool record_timing = false;  // wall_time_ms stays 0 unless enabled

    Index elements() const { return static_cast<Index>(irs_rows) * irs_cols; }
    IrsPanel panel() const;
    SystemParams params(double p_max_dbm) const;
    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Throws ConfigError; parse errors report line and column.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(std::string_view text);
std::string dump_config(const ScenarioConfig& config);
void save_config(const ScenarioConfig& config, const std::filesystem::path& path);

/// Node placement and roles of one trial.
NodeGeometry trial_geometry(const ScenarioConfig& config, const RngStream& trial_stream);

struct ResultRecord {
    int setup_id = 0;
    Design design = Design::IrsAO;
    double p_max_dbm = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    double rate = 0.0;
    double gamma_p = 0.0;
    double gamma_s = 0.0;
    double p_s = 0.0;
    int outer_iterations = 0;
    int inner_iterations = 0;
    bool feasible = false;
    double wall_time_ms = 0.0;

    bool operator==(const ResultRecord&) const = default;
};

/// Solves every design for every (P_max, trial). All designs and sweep points
/// of a trial share one channel realization. Records are ordered by
/// (design, P_max, trial) whatever the worker count.
std::vector<ResultRecord> run_sweep(const ScenarioConfig& config);

std::string format_results(const std::vector<ResultRecord>& records);
void write_results(const std::vector<ResultRecord>& records, const std::filesystem::path& path);
std::vector<ResultRecord> parse_results(std::string_view csv);
std::vector<ResultRecord> read_results(const std::filesystem::path& path);

struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n); 0 for n < 2
};
MeanStderr mean_stderr(const std::vector<double>& values);

struct SummaryRow {
    int setup_id = 0;
    Design design = Design::IrsAO;
    double p_max_dbm = 0.0;
    int count = 0;
    MeanStderr rate;
    double feasible_fraction = 0.0;
};

/// Per (setup, design, P_max) rate statistics, in key order.
std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records);
std::string format_summary(const std::vector<SummaryRow>& rows);

}  // namespace irs_cr
