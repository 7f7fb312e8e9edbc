#include "irs_cr/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace irs_cr {

namespace {

using json = nlohmann::json;

constexpr std::array<std::pair<Design, std::string_view>, 7> kDesignNames{{
    {Design::IrsAO, "IrsAO"},
    {Design::MaxAlphaPP, "MaxAlphaPP"},
    {Design::MaxAlphaSS, "MaxAlphaSS"},
    {Design::MinAlphaSP, "MinAlphaSP"},
    {Design::MinAlphaPS, "MinAlphaPS"},
    {Design::NoIrsWithSic, "NoIrsWithSic"},
    {Design::NoIrsWithoutSic, "NoIrsWithoutSic"},
}};

const std::vector<std::string> kCsvColumns{"setup_id", "design",           "p_max_dbm",        "trial",
                                           "seed",     "rate",             "gamma_p",          "gamma_s",
                                           "p_s",      "outer_iterations", "inner_iterations", "feasible",
                                           "wall_time_ms"};

// Child stream indices below one trial stream.
enum : std::uint64_t { kPlacementStream = 0, kChannelStream = 1, kAoStream = 2, kRandomizationStream = 3 };

DesignKind two_stage_kind(Design d)
{
    switch (d) {
    case Design::MaxAlphaPP: return DesignKind::MaxAlphaPP;
    case Design::MaxAlphaSS: return DesignKind::MaxAlphaSS;
    case Design::MinAlphaSP: return DesignKind::MinAlphaSP;
    case Design::MinAlphaPS: return DesignKind::MinAlphaPS;
    case Design::NoIrsWithSic: return DesignKind::NoIrsWithSic;
    case Design::NoIrsWithoutSic: return DesignKind::NoIrsWithoutSic;
    case Design::IrsAO: break;
    }
    throw std::logic_error("IrsAO has no two-stage kind");
}

// ---- JSON helpers -------------------------------------------------------

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed)
{
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(where + "." + key + ": unknown field");
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out)
{
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

void read_vec3(const json& obj, const char* key, const std::string& where, Vec3& out)
{
    if (!obj.contains(key))
        return;
    const json& a = obj.at(key);
    if (!a.is_array() || a.size() != 3 || !std::all_of(a.begin(), a.end(), [](const json& x) { return x.is_number(); }))
        throw ConfigError(where + "." + key + ": expected [x, y, z]");
    out = Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

void read_opt_vec3(const json& obj, const char* key, const std::string& where, std::optional<Vec3>& out)
{
    if (!obj.contains(key))
        return;
    if (obj.at(key).is_null()) {
        out.reset();
        return;
    }
    Vec3 v;
    read_vec3(obj, key, where, v);
    out = v;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

void read_fading(const json& obj, const char* key, const std::string& where, FadingSpec& spec)
{
    if (!obj.contains(key))
        return;
    const json& f = obj.at(key);
    const std::string here = where + "." + key;
    check_keys(f, here, {"exponent", "rician_factor"});
    read(f, "exponent", here, spec.path_loss_exponent);
    if (f.contains("rician_factor")) {
        const json& k = f.at("rician_factor");
        if (k.is_string() && k.get<std::string>() == "inf")
            spec.rician_factor = std::numeric_limits<double>::infinity();
        else if (k.is_number())
            spec.rician_factor = k.get<double>();
        else
            throw ConfigError(here + ".rician_factor: expected a number or \"inf\"");
    }
}

json fading_json(const FadingSpec& spec)
{
    json k = std::isinf(spec.rician_factor) ? json("inf") : json(spec.rician_factor);
    return {{"exponent", spec.path_loss_exponent}, {"rician_factor", k}};
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte)
{
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < std::min(byte > 0 ? byte - 1 : 0, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

// ---- CSV helpers --------------------------------------------------------

std::string format_double(double x)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), end);
}

template <typename T>
T parse_number(std::string_view field, const std::string& what)
{
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw std::runtime_error("results: cannot parse " + what + " from '" + std::string(field) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

ResultRecord to_record(const SolveResult& r, int setup, Design design, double p_max_dbm, int trial,
                       std::uint64_t seed)
{
    ResultRecord rec;
    rec.setup_id = setup;
    rec.design = design;
    rec.p_max_dbm = p_max_dbm;
    rec.trial = trial;
    rec.seed = seed;
    rec.rate = r.rate;
    rec.gamma_p = r.gamma_p;
    rec.gamma_s = r.gamma_s;
    rec.p_s = r.p_s;
    rec.outer_iterations = r.outer_iterations;
    rec.inner_iterations = r.inner_iterations;
    rec.feasible = r.feasible;
    return rec;
}

}  // namespace

std::string_view to_string(Design design)
{
    for (const auto& [d, name] : kDesignNames)
        if (d == design)
            return name;
    return "unknown";
}

std::optional<Design> parse_design(std::string_view name)
{
    for (const auto& [d, n] : kDesignNames)
        if (n == name)
            return d;
    return std::nullopt;
}

const std::vector<Design>& all_designs()
{
    static const std::vector<Design> designs{Design::IrsAO,      Design::MaxAlphaPP,   Design::MaxAlphaSS,
                                             Design::MinAlphaSP, Design::MinAlphaPS,   Design::NoIrsWithSic,
                                             Design::NoIrsWithoutSic};
    return designs;
}

// ---- ScenarioConfig -----------------------------------------------------

IrsPanel ScenarioConfig::panel() const
{
    IrsPanel p;
    p.position = irs_position;
    p.normal = irs_normal;
    p.rows = irs_rows;
    p.cols = irs_cols;
    p.spacing = spacing_wavelengths * wavelength;
    return p;
}

SystemParams ScenarioConfig::params(double p_max_dbm) const
{
    SystemParams p;
    p.p_p = dbm_to_watts(p0_dbm);
    p.p_max = dbm_to_watts(p_max_dbm);
    p.sigma2_p = dbm_to_watts(noise_dbm);
    p.sigma2_s = p.sigma2_p;
    p.gamma_th = db_to_linear(gamma_th_db);
    p.n_elements = elements();
    return p;
}

void ScenarioConfig::validate() const
{
    auto require = [](bool ok, const char* field, const char* message) {
        if (!ok)
            throw ConfigError(std::string(field) + ": " + message);
    };
    require(setup_id >= 1 && setup_id <= 3, "setup", "must be 1, 2 or 3");
    require(trials >= 1, "trials", "must be at least 1");
    require(workers >= 1, "workers", "must be at least 1");
    require(!sweep_dbm.empty(), "sweep_dbm", "must not be empty");
    for (std::size_t i = 0; i < sweep_dbm.size(); ++i) {
        require(std::isfinite(sweep_dbm[i]), "sweep_dbm", "entries must be finite");
        require(i == 0 || sweep_dbm[i] > sweep_dbm[i - 1], "sweep_dbm", "must be strictly increasing");
    }
    require(!designs.empty(), "designs", "must not be empty");
    require(std::set<Design>(designs.begin(), designs.end()).size() == designs.size(), "designs",
            "contains duplicates");
    require(irs_rows >= 1, "irs.rows", "must be at least 1");
    require(irs_cols >= 1, "irs.cols", "must be at least 1");
    require(spacing_wavelengths > 0.0, "irs.spacing_wavelengths", "must be positive");
    require(wavelength > 0.0, "carrier.wavelength_m", "must be positive");
    require(carrier_frequency_hz > 0.0, "carrier.frequency_hz", "must be positive");
    require(irs_normal.norm() > 0.0, "irs.normal", "must be nonzero");
    require(std::isfinite(p0_dbm), "system.p0_dbm", "must be finite");
    require(std::isfinite(noise_dbm), "system.noise_dbm", "must be finite");
    require(std::isfinite(gamma_th_db), "system.gamma_th_db", "must be finite");
    require(placement.hotspot_radius >= 0.0, "geometry.hotspot_radius_m", "must be nonnegative");
    require(placement.far_distance > 0.0, "geometry.far_distance_m", "must be positive");
    require(std::isfinite(placement.node_height) && placement.node_height >= 0.0, "geometry.node_height_m",
            "must be finite and nonnegative");
    require(ao.outer_tolerance > 0.0, "solver.outer_tolerance", "must be positive");
    require(ao.inner_tolerance > 0.0, "solver.inner_tolerance", "must be positive");
    require(ao.bisection_tolerance > 0.0, "solver.bisection_tolerance", "must be positive");
    require(ao.max_outer >= 1, "solver.max_outer", "must be at least 1");
    require(ao.max_inner >= 1, "solver.max_inner", "must be at least 1");
    require(ao.restarts >= 1, "solver.restarts", "must be at least 1");
    require(two_stage.randomization_count >= 0, "solver.randomization_count", "must be nonnegative");
    require(two_stage.sdr.tolerance > 0.0, "solver.sdr_tolerance", "must be positive");
    require(two_stage.sdr.max_iterations >= 1, "solver.sdr_max_iterations", "must be at least 1");
    const std::pair<const FadingSpec*, const char*> specs[] = {
        {&fading.ground, "fading.ground"}, {&fading.irs_hotspot, "fading.irs_hotspot"}, {&fading.irs_far, "fading.irs_far"}};
    for (const auto& [spec, name] : specs) {
        try {
            spec->validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string(name) + ": " + e.what());
        }
    }
}

ScenarioConfig parse_config(std::string_view text)
{
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte);
        throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": " + e.what());
    }

    ScenarioConfig c;
    check_keys(root, "config", {"setup", "trials", "master_seed", "workers", "record_timing", "sweep_dbm", "designs",
                                "system", "carrier", "irs", "geometry", "fading", "solver"});
    read(root, "setup", "config", c.setup_id);
    read(root, "trials", "config", c.trials);
    read(root, "master_seed", "config", c.master_seed);
    read(root, "workers", "config", c.workers);
    read(root, "record_timing", "config", c.record_timing);
    read(root, "sweep_dbm", "config", c.sweep_dbm);
    if (root.contains("designs")) {
        std::vector<std::string> names;
        read(root, "designs", "config", names);
        c.designs.clear();
        for (const auto& n : names) {
            auto d = parse_design(n);
            if (!d)
                throw ConfigError("designs: unknown design '" + n + "'");
            c.designs.push_back(*d);
        }
    }
    if (root.contains("system")) {
        const json& s = root.at("system");
        check_keys(s, "system", {"p0_dbm", "noise_dbm", "gamma_th_db"});
        read(s, "p0_dbm", "system", c.p0_dbm);
        read(s, "noise_dbm", "system", c.noise_dbm);
        read(s, "gamma_th_db", "system", c.gamma_th_db);
    }
    if (root.contains("carrier")) {
        const json& s = root.at("carrier");
        check_keys(s, "carrier", {"frequency_hz", "wavelength_m"});
        read(s, "frequency_hz", "carrier", c.carrier_frequency_hz);
        read(s, "wavelength_m", "carrier", c.wavelength);
    }
    if (root.contains("irs")) {
        const json& s = root.at("irs");
        check_keys(s, "irs", {"rows", "cols", "spacing_wavelengths", "position", "normal"});
        read(s, "rows", "irs", c.irs_rows);
        read(s, "cols", "irs", c.irs_cols);
        read(s, "spacing_wavelengths", "irs", c.spacing_wavelengths);
        read_vec3(s, "position", "irs", c.irs_position);
        read_vec3(s, "normal", "irs", c.irs_normal);
    }
    if (root.contains("geometry")) {
        const json& s = root.at("geometry");
        check_keys(s, "geometry", {"hotspot_center_distance_m", "hotspot_radius_m", "far_distance_m",
                                   "far_azimuth_deg", "node_height_m", "p1", "p2", "s1", "s2"});
        read(s, "hotspot_center_distance_m", "geometry", c.placement.hotspot_center_distance);
        read(s, "hotspot_radius_m", "geometry", c.placement.hotspot_radius);
        read(s, "far_distance_m", "geometry", c.placement.far_distance);
        read(s, "far_azimuth_deg", "geometry", c.placement.far_azimuth_deg);
        read(s, "node_height_m", "geometry", c.placement.node_height);
        read_opt_vec3(s, "p1", "geometry", c.placement.p1);
        read_opt_vec3(s, "p2", "geometry", c.placement.p2);
        read_opt_vec3(s, "s1", "geometry", c.placement.s1);
        read_opt_vec3(s, "s2", "geometry", c.placement.s2);
    }
    if (root.contains("fading")) {
        const json& s = root.at("fading");
        check_keys(s, "fading", {"reference_loss_db", "reference_distance_m", "ground", "irs_hotspot", "irs_far"});
        read_fading(s, "ground", "fading", c.fading.ground);
        read_fading(s, "irs_hotspot", "fading", c.fading.irs_hotspot);
        read_fading(s, "irs_far", "fading", c.fading.irs_far);
        double loss = c.fading.ground.reference_loss_db;
        double d0 = c.fading.ground.reference_distance;
        read(s, "reference_loss_db", "fading", loss);
        read(s, "reference_distance_m", "fading", d0);
        for (FadingSpec* spec : {&c.fading.ground, &c.fading.irs_hotspot, &c.fading.irs_far}) {
            spec->reference_loss_db = loss;
            spec->reference_distance = d0;
        }
    }
    if (root.contains("solver")) {
        const json& s = root.at("solver");
        check_keys(s, "solver", {"outer_tolerance", "inner_tolerance", "bisection_tolerance", "max_outer",
                                 "max_inner", "init", "restarts", "warm_start", "randomization_count", "sdr_tolerance",
                                 "sdr_max_iterations"});
        read(s, "outer_tolerance", "solver", c.ao.outer_tolerance);
        read(s, "inner_tolerance", "solver", c.ao.inner_tolerance);
        read(s, "bisection_tolerance", "solver", c.ao.bisection_tolerance);
        read(s, "max_outer", "solver", c.ao.max_outer);
        read(s, "max_inner", "solver", c.ao.max_inner);
        read(s, "restarts", "solver", c.ao.restarts);
        read(s, "warm_start", "solver", c.ao_warm_start);
        if (s.contains("init")) {
            std::string init;
            read(s, "init", "solver", init);
            if (init == "random")
                c.ao.init = InitMode::random;
            else if (init == "zero")
                c.ao.init = InitMode::zero;
            else
                throw ConfigError("solver.init: expected \"random\" or \"zero\"");
        }
        read(s, "randomization_count", "solver", c.two_stage.randomization_count);
        read(s, "sdr_tolerance", "solver", c.two_stage.sdr.tolerance);
        read(s, "sdr_max_iterations", "solver", c.two_stage.sdr.max_iterations);
    }
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string dump_config(const ScenarioConfig& c)
{
    json designs = json::array();
    for (Design d : c.designs)
        designs.push_back(std::string(to_string(d)));
    json geometry = {{"hotspot_center_distance_m", c.placement.hotspot_center_distance},
                     {"hotspot_radius_m", c.placement.hotspot_radius},
                     {"far_distance_m", c.placement.far_distance},
                     {"far_azimuth_deg", c.placement.far_azimuth_deg},
                     {"node_height_m", c.placement.node_height}};
    const std::pair<const std::optional<Vec3>*, const char*> fixed[] = {
        {&c.placement.p1, "p1"}, {&c.placement.p2, "p2"}, {&c.placement.s1, "s1"}, {&c.placement.s2, "s2"}};
    for (const auto& [pos, name] : fixed)
        if (*pos)
            geometry[name] = vec3_json(**pos);

    json root = {
        {"setup", c.setup_id},
        {"trials", c.trials},
        {"master_seed", c.master_seed},
        {"workers", c.workers},
        {"record_timing", c.record_timing},
        {"sweep_dbm", c.sweep_dbm},
        {"designs", designs},
        {"system", {{"p0_dbm", c.p0_dbm}, {"noise_dbm", c.noise_dbm}, {"gamma_th_db", c.gamma_th_db}}},
        {"carrier", {{"frequency_hz", c.carrier_frequency_hz}, {"wavelength_m", c.wavelength}}},
        {"irs",
         {{"rows", c.irs_rows},
          {"cols", c.irs_cols},
          {"spacing_wavelengths", c.spacing_wavelengths},
          {"position", vec3_json(c.irs_position)},
          {"normal", vec3_json(c.irs_normal)}}},
        {"geometry", geometry},
        {"fading",
         {{"reference_loss_db", c.fading.ground.reference_loss_db},
          {"reference_distance_m", c.fading.ground.reference_distance},
          {"ground", fading_json(c.fading.ground)},
          {"irs_hotspot", fading_json(c.fading.irs_hotspot)},
          {"irs_far", fading_json(c.fading.irs_far)}}},
        {"solver",
         {{"outer_tolerance", c.ao.outer_tolerance},
          {"inner_tolerance", c.ao.inner_tolerance},
          {"bisection_tolerance", c.ao.bisection_tolerance},
          {"max_outer", c.ao.max_outer},
          {"max_inner", c.ao.max_inner},
          {"init", c.ao.init == InitMode::random ? "random" : "zero"},
          {"restarts", c.ao.restarts},
          {"warm_start", c.ao_warm_start},
          {"randomization_count", c.two_stage.randomization_count},
          {"sdr_tolerance", c.two_stage.sdr.tolerance},
          {"sdr_max_iterations", c.two_stage.sdr.max_iterations}}},
    };
    return root.dump(2) + "\n";
}

void save_config(const ScenarioConfig& config, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write config file " + path.string());
    out << dump_config(config);
    if (!out)
        throw std::runtime_error("failed writing config file " + path.string());
}

// ---- Sweep ----------------------------------------------------------------

NodeGeometry trial_geometry(const ScenarioConfig& config, const RngStream& trial_stream)
{
    const PlacementConfig& pc = config.placement;
    const Vec3 foot(config.irs_position.x(), config.irs_position.y(), pc.node_height);
    Vec3 forward(config.irs_normal.x(), config.irs_normal.y(), 0.0);
    forward = forward.norm() > 0.0 ? forward.normalized() : Vec3::UnitY();
    const Vec3 lateral = forward.cross(Vec3::UnitZ());

    Engine engine = trial_stream.child(kPlacementStream).engine();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto hotspot_point = [&] {
        const double r = pc.hotspot_radius * std::sqrt(unit(engine));
        const double phi = 2.0 * std::numbers::pi * unit(engine);
        return Vec3(foot + pc.hotspot_center_distance * forward + r * (std::cos(phi) * lateral + std::sin(phi) * forward));
    };
    const double az = pc.far_azimuth_deg * std::numbers::pi / 180.0;
    // Both draws always happen so the stream layout is independent of overrides.
    const Vec3 p1_draw = hotspot_point();
    const Vec3 s1_draw = hotspot_point();
    const Vec3 p1 = pc.p1.value_or(p1_draw);
    const Vec3 s1 = pc.s1.value_or(s1_draw);
    const Vec3 p2 = pc.p2.value_or(Vec3(foot + pc.far_distance * (std::cos(az) * forward - std::sin(az) * lateral)));
    const Vec3 s2 = pc.s2.value_or(Vec3(foot + pc.far_distance * (std::cos(az) * forward + std::sin(az) * lateral)));

    NodeGeometry g;
    g.irs = config.panel();
    g.wavelength = config.wavelength;
    const Node near_p{p1, true}, near_s{s1, true}, far_p{p2, false}, far_s{s2, false};
    switch (config.setup_id) {
    case 1:  // PR and SR in the hotspot
        g.pr = near_p; g.sr = near_s; g.pt = far_p; g.st = far_s;
        break;
    case 2:  // PT and SR in the hotspot
        g.pt = near_p; g.sr = near_s; g.pr = far_p; g.st = far_s;
        break;
    case 3:  // PR and ST in the hotspot
        g.pr = near_p; g.st = near_s; g.pt = far_p; g.sr = far_s;
        break;
    default:
        throw ConfigError("setup: must be 1, 2 or 3");
    }
    return g;
}

std::vector<ResultRecord> run_sweep(const ScenarioConfig& config)
{
    config.validate();
    const std::size_t n_designs = config.designs.size();
    const std::size_t n_points = config.sweep_dbm.size();
    const std::size_t n_trials = static_cast<std::size_t>(config.trials);
    const RngStream master(config.master_seed);

    // Slot (design, point, trial) -> index; filled by whichever worker owns the trial.
    std::vector<ResultRecord> records(n_designs * n_points * n_trials);
    auto slot = [&](std::size_t d, std::size_t p, std::size_t t) { return (d * n_points + p) * n_trials + t; };

    auto run_trial = [&](std::size_t t) {
        const RngStream trial_stream = master.child(t);
        std::optional<ChannelSet> channels;
        try {
            channels = generate_channels(trial_geometry(config, trial_stream), config.fading,
                                         trial_stream.child(kChannelStream));
        } catch (const std::exception&) {
            channels.reset();
        }
        // Stage-1 reflections do not depend on P_max; compute each once per trial.
        std::map<DesignKind, StageOne> stage_cache;
        auto stage = [&](DesignKind kind) -> const StageOne& {
            auto it = stage_cache.find(kind);
            if (it == stage_cache.end())
                it = stage_cache.emplace(kind, stage_one(kind, *channels, trial_stream.child(kRandomizationStream),
                                                         config.two_stage)).first;
            return it->second;
        };
        auto solve_joint = [&](const SystemParams& params) {
            SolveResult best = solve_ao(*channels, params, trial_stream.child(kAoStream), config.ao);
            if (!config.ao_warm_start)
                return best;
            std::optional<SolveResult> seed_design;
            for (DesignKind kind : {DesignKind::MaxAlphaPP, DesignKind::MaxAlphaSS, DesignKind::MinAlphaSP,
                                    DesignKind::MinAlphaPS}) {
                try {
                    SolveResult r = stage_two(*channels, params, stage(kind));
                    if (!seed_design || preferable(r, *seed_design))
                        seed_design = std::move(r);
                } catch (const std::exception&) {
                    // a failed stage-1 design just drops out as a start
                }
            }
            if (!seed_design)
                return best;
            SolveResult warm = solve_ao(*channels, params, *seed_design->v, config.ao);
            return preferable(warm, best) ? warm : best;
        };

        for (std::size_t d = 0; d < n_designs; ++d) {
            const Design design = config.designs[d];
            for (std::size_t p = 0; p < n_points; ++p) {
                const double p_max_dbm = config.sweep_dbm[p];
                const auto start = std::chrono::steady_clock::now();
                SolveResult result;
                try {
                    if (!channels)
                        throw std::runtime_error("channel generation failed");
                    const SystemParams params = config.params(p_max_dbm);
                    if (design == Design::IrsAO)
                        result = solve_joint(params);
                    else if (design == Design::NoIrsWithSic || design == Design::NoIrsWithoutSic)
                        result = solve_no_irs(design == Design::NoIrsWithSic, *channels, params);
                    else
                        result = stage_two(*channels, params, stage(two_stage_kind(design)));
                } catch (const std::exception&) {
                    result = SolveResult{};
                }
                ResultRecord rec = to_record(result, config.setup_id, design, p_max_dbm, static_cast<int>(t),
                                             trial_stream.key());
                if (config.record_timing)
                    rec.wall_time_ms =
                        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                records[slot(d, p, t)] = rec;
            }
        }
    };

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), n_trials);
    if (workers <= 1) {
        for (std::size_t t = 0; t < n_trials; ++t)
            run_trial(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < n_trials; t = next++)
                    run_trial(t);
            });
    }
    return records;
}

// ---- Results ----------------------------------------------------------------

std::string format_results(const std::vector<ResultRecord>& records)
{
    std::string out;
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i)
        out += (i ? "," : "") + kCsvColumns[i];
    out += "\n";
    for (const ResultRecord& r : records) {
        out += std::to_string(r.setup_id) + "," + std::string(to_string(r.design)) + "," + format_double(r.p_max_dbm) +
               "," + std::to_string(r.trial) + "," + std::to_string(r.seed) + "," + format_double(r.rate) + "," +
               format_double(r.gamma_p) + "," + format_double(r.gamma_s) + "," + format_double(r.p_s) + "," +
               std::to_string(r.outer_iterations) + "," + std::to_string(r.inner_iterations) + "," +
               (r.feasible ? "1" : "0") + "," + format_double(r.wall_time_ms) + "\n";
    }
    return out;
}

void write_results(const std::vector<ResultRecord>& records, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open results file " + path.string());
    out << format_results(records);
    if (!out)
        throw std::runtime_error("failed writing results file " + path.string());
}

std::vector<ResultRecord> parse_results(std::string_view csv)
{
    std::vector<ResultRecord> records;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < csv.size()) {
        std::size_t end = csv.find('\n', start);
        if (end == std::string_view::npos)
            end = csv.size();
        std::string_view line = csv.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        ++line_no;
        if (line_no == 1) {
            const auto header = split(line, ',');
            if (header.size() != kCsvColumns.size() || !std::equal(header.begin(), header.end(), kCsvColumns.begin()))
                throw std::runtime_error("results: unexpected header");
            continue;
        }
        if (line.empty())
            continue;
        const auto f = split(line, ',');
        if (f.size() != kCsvColumns.size())
            throw std::runtime_error("results: line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                                     " fields");
        ResultRecord r;
        r.setup_id = parse_number<int>(f[0], "setup_id");
        const auto design = parse_design(f[1]);
        if (!design)
            throw std::runtime_error("results: unknown design '" + std::string(f[1]) + "'");
        r.design = *design;
        r.p_max_dbm = parse_number<double>(f[2], "p_max_dbm");
        r.trial = parse_number<int>(f[3], "trial");
        r.seed = parse_number<std::uint64_t>(f[4], "seed");
        r.rate = parse_number<double>(f[5], "rate");
        r.gamma_p = parse_number<double>(f[6], "gamma_p");
        r.gamma_s = parse_number<double>(f[7], "gamma_s");
        r.p_s = parse_number<double>(f[8], "p_s");
        r.outer_iterations = parse_number<int>(f[9], "outer_iterations");
        r.inner_iterations = parse_number<int>(f[10], "inner_iterations");
        r.feasible = parse_number<int>(f[11], "feasible") != 0;
        r.wall_time_ms = parse_number<double>(f[12], "wall_time_ms");
        records.push_back(r);
    }
    if (line_no == 0)
        throw std::runtime_error("results: missing header");
    return records;
}

std::vector<ResultRecord> read_results(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open results file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_results(buffer.str());
}

MeanStderr mean_stderr(const std::vector<double>& values)
{
    MeanStderr out;
    if (values.empty())
        return out;
    const double n = static_cast<double>(values.size());
    for (double v : values)
        out.mean += v;
    out.mean /= n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - out.mean) * (v - out.mean);
        out.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records)
{
    if (records.empty())
        throw std::invalid_argument("summarize: no records");
    std::map<std::tuple<int, Design, double>, std::pair<std::vector<double>, int>> groups;
    for (const ResultRecord& r : records) {
        auto& g = groups[{r.setup_id, r.design, r.p_max_dbm}];
        g.first.push_back(r.rate);
        g.second += r.feasible ? 1 : 0;
    }
    std::vector<SummaryRow> rows;
    for (const auto& [key, g] : groups) {
        SummaryRow row;
        std::tie(row.setup_id, row.design, row.p_max_dbm) = key;
        row.count = static_cast<int>(g.first.size());
        row.rate = mean_stderr(g.first);
        row.feasible_fraction = static_cast<double>(g.second) / static_cast<double>(row.count);
        rows.push_back(row);
    }
    return rows;
}

std::string format_summary(const std::vector<SummaryRow>& rows)
{
    std::ostringstream out;
    out << "setup,design,p_max_dbm,count,mean_rate,stderr_rate,feasible_fraction\n";
    for (const SummaryRow& r : rows)
        out << r.setup_id << "," << to_string(r.design) << "," << format_double(r.p_max_dbm) << "," << r.count << ","
            << format_double(r.rate.mean) << "," << format_double(r.rate.std_error) << ","
            << format_double(r.feasible_fraction) << "\n";
    return out.str();
}

}  // namespace irs_cr
