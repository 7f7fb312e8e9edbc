#include <doctest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include "irs_cr/harness.hpp"

using namespace irs_cr;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "irs_cr_test_harness";
    std::filesystem::create_directories(dir);
    return dir / name;
}

ScenarioConfig small_config()
{
    ScenarioConfig c;
    c.irs_rows = 2;
    c.irs_cols = 3;
    c.trials = 4;
    c.sweep_dbm = {0.0, 30.0};
    c.master_seed = 99;
    c.two_stage.randomization_count = 50;
    return c;
}

int line_count(const std::string& text)
{
    int n = 0;
    for (char ch : text)
        n += ch == '\n';
    return n;
}

std::string error_of(std::string_view text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("empty config yields the defaults")
{
    const ScenarioConfig c = parse_config("{}");
    CHECK(c.carrier_frequency_hz == 750e6);
    CHECK(c.wavelength == doctest::Approx(0.4));
    CHECK(c.irs_rows * c.irs_cols == 60);
    CHECK(c.p0_dbm == 20.0);
    CHECK(c.noise_dbm == -105.0);
    CHECK(c.gamma_th_db == 20.0);
    CHECK(c.sweep_dbm == std::vector<double>{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0});
    CHECK(c.fading.ground.path_loss_exponent == 3.0);
    CHECK(c.fading.irs_hotspot.path_loss_exponent == 2.0);
    CHECK(std::isinf(c.fading.irs_hotspot.rician_factor));
    CHECK(c.fading.irs_far.rician_factor == 0.0);
    CHECK(c.designs.size() == 7);
    CHECK(c.ao.outer_tolerance == 1e-4);
    CHECK(c.ao.inner_tolerance == 1e-5);
    CHECK(c.two_stage.randomization_count == 1000);
}

TEST_CASE("params converts units")
{
    const ScenarioConfig c;
    const SystemParams p = c.params(30.0);
    CHECK(p.p_max == doctest::Approx(1.0));
    CHECK(p.p_p == doctest::Approx(0.1));
    CHECK(p.gamma_th == doctest::Approx(100.0));
    CHECK(p.sigma2_p == doctest::Approx(dbm_to_watts(-105.0)));
    CHECK(p.n_elements == 60);
}

TEST_CASE("validation names the offending field")
{
    CHECK(error_of(R"({"trials": 0})").find("trials") != std::string::npos);
    CHECK(error_of(R"({"setup": 4})").find("setup") != std::string::npos);
    CHECK(error_of(R"({"sweep_dbm": [10, 5]})").find("sweep_dbm") != std::string::npos);
    CHECK(error_of(R"({"designs": ["IrsAO", "Nope"]})").find("Nope") != std::string::npos);
    CHECK(error_of(R"({"designs": ["IrsAO", "IrsAO"]})").find("designs") != std::string::npos);
    CHECK(error_of(R"({"trails": 3})").find("trails") != std::string::npos);
    CHECK(error_of(R"({"geometry": {"node_height_m": -1}})").find("node_height_m") != std::string::npos);
    CHECK(error_of(R"({"trials": "many"})").find("trials") != std::string::npos);
}

TEST_CASE("parse errors report a position")
{
    const std::string msg = error_of("{\n  \"trials\": 3,\n  \"setup\": \n}");
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("config survives save and load")
{
    ScenarioConfig c;
    c.setup_id = 2;
    c.trials = 7;
    c.master_seed = 123456789012345ULL;
    c.sweep_dbm = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    c.placement.p1 = Vec3(0.5, 1.0, 0.0);
    c.designs = {Design::IrsAO, Design::NoIrsWithSic};
    c.ao.init = InitMode::zero;
    c.ao_warm_start = false;
    const auto path = scratch("roundtrip.json");
    save_config(c, path);
    const ScenarioConfig back = load_config(path);
    CHECK(back.sweep_dbm == c.sweep_dbm);
    CHECK(back.setup_id == 2);
    CHECK(back.trials == 7);
    CHECK(back.master_seed == c.master_seed);
    CHECK(back.designs == c.designs);
    REQUIRE(back.placement.p1.has_value());
    CHECK(*back.placement.p1 == *c.placement.p1);
    CHECK(back.ao.init == InitMode::zero);
    CHECK_FALSE(back.ao_warm_start);
    CHECK(dump_config(back) == dump_config(c));
}

TEST_CASE("missing config file")
{
    CHECK_THROWS_AS(load_config(scratch("does_not_exist.json")), ConfigError);
}

TEST_CASE("trial geometry assigns hotspot roles per setup")
{
    ScenarioConfig c;
    const RngStream trial(5);
    for (int setup : {1, 2, 3}) {
        c.setup_id = setup;
        const NodeGeometry g = trial_geometry(c, trial);
        CHECK_NOTHROW(g.validate());
        CHECK(g.pr.hotspot == (setup != 2));
        CHECK(g.sr.hotspot == (setup != 3));
        CHECK(g.pt.hotspot == (setup == 2));
        CHECK(g.st.hotspot == (setup == 3));
        for (const Node* n : {&g.pt, &g.pr, &g.st, &g.sr}) {
            const double d = (n->position - Vec3(0.0, 0.0, 0.0)).head<2>().norm();
            if (n->hotspot)
                CHECK(d <= c.placement.hotspot_center_distance + c.placement.hotspot_radius + 1e-12);
            else
                CHECK(d == doctest::Approx(c.placement.far_distance));
        }
    }
    c.placement.p1 = Vec3(1.0, 2.0, 0.0);
    c.setup_id = 1;
    CHECK(trial_geometry(c, trial).pr.position == *c.placement.p1);
}

TEST_CASE("csv output")
{
    ResultRecord r;
    r.setup_id = 3;
    r.design = Design::MinAlphaPS;
    r.p_max_dbm = 12.5;
    r.trial = 4;
    r.seed = 18446744073709551615ULL;
    r.rate = 0.1 + 0.2;
    r.gamma_p = 100.00000000000001;
    r.gamma_s = 1e-300;
    r.p_s = 3.0e-3;
    r.outer_iterations = 7;
    r.inner_iterations = 70;
    r.feasible = true;

    const std::string text = format_results({r});
    CHECK(line_count(text) == 2);
    CHECK(text.rfind("setup_id,design,p_max_dbm,trial,seed,rate,", 0) == 0);

    const auto back = parse_results(text);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == r);

    const auto path = scratch("one.csv");
    write_results({r, r}, path);
    CHECK(read_results(path) == std::vector<ResultRecord>{r, r});

    CHECK_THROWS(parse_results("nope\n1,2\n"));
}

TEST_CASE("summary statistics")
{
    const MeanStderr m = mean_stderr({1.0, 3.0});
    CHECK(m.mean == doctest::Approx(2.0));
    CHECK(m.std_error == doctest::Approx(1.0));
    CHECK(mean_stderr({5.0}).std_error == 0.0);

    std::vector<ResultRecord> records;
    for (int t = 0; t < 2; ++t) {
        ResultRecord r;
        r.setup_id = 1;
        r.trial = t;
        r.rate = 1.0 + 2.0 * t;
        r.feasible = t == 0;
        records.push_back(r);
    }
    const auto rows = summarize(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].count == 2);
    CHECK(rows[0].rate.mean == doctest::Approx(2.0));
    CHECK(rows[0].feasible_fraction == doctest::Approx(0.5));
    CHECK(format_summary(rows).find("IrsAO") != std::string::npos);
}

TEST_CASE("design names")
{
    for (Design d : all_designs())
        CHECK(parse_design(to_string(d)) == d);
    CHECK_FALSE(parse_design("irsao").has_value());
}

TEST_CASE("sweep is deterministic and ordered")
{
    ScenarioConfig c = small_config();
    const auto a = run_sweep(c);
    const auto b = run_sweep(c);
    CHECK(format_results(a) == format_results(b));
    c.workers = 3;
    CHECK(format_results(run_sweep(c)) == format_results(a));

    CHECK(a.size() == c.designs.size() * c.sweep_dbm.size() * static_cast<std::size_t>(c.trials));
    for (std::size_t i = 1; i < a.size(); ++i) {
        const auto key = [](const ResultRecord& r) { return std::tuple(r.design, r.p_max_dbm, r.trial); };
        CHECK(key(a[i - 1]) < key(a[i]));
    }

    c.master_seed = 100;
    c.workers = 1;
    CHECK(format_results(run_sweep(c)) != format_results(a));
}

TEST_CASE("trials share one realization across designs and budgets")
{
    ScenarioConfig c = small_config();
    c.designs = {Design::NoIrsWithSic, Design::NoIrsWithoutSic};
    const auto records = run_sweep(c);
    std::map<int, std::uint64_t> seed_of;
    for (const auto& r : records) {
        const auto [it, inserted] = seed_of.emplace(r.trial, r.seed);
        CHECK(it->second == r.seed);
    }
    CHECK(seed_of.size() == static_cast<std::size_t>(c.trials));
}

TEST_CASE("joint design is never worse than any two-stage design")
{
    ScenarioConfig c = small_config();
    c.setup_id = 1;
    c.trials = 6;
    const auto records = run_sweep(c);
    std::map<std::tuple<double, int>, double> joint;
    for (const auto& r : records)
        if (r.design == Design::IrsAO)
            joint[{r.p_max_dbm, r.trial}] = r.rate;
    for (const auto& r : records)
        if (r.design != Design::IrsAO && r.design != Design::NoIrsWithSic && r.design != Design::NoIrsWithoutSic &&
            r.feasible)
            CHECK(joint[{r.p_max_dbm, r.trial}] >= r.rate - 1e-9);
}

TEST_CASE("baselines are ineffective when the PR sits at the surface")
{
    ScenarioConfig c;
    c.setup_id = 3;
    c.designs = {Design::NoIrsWithSic, Design::NoIrsWithoutSic};
    c.master_seed = 2024;
    for (const auto& row : summarize(run_sweep(c)))
        CHECK(row.rate.mean < 0.1);
}
