#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irs_cr/harness.hpp"

namespace py = pybind11;
using namespace irs_cr;

namespace {

DesignKind design_kind(const std::string& name)
{
    const auto k = parse_design_kind(name);
    if (!k)
        throw py::value_error("unknown design '" + name + "'");
    return *k;
}

std::optional<CVector> coefficients(const SolveResult& r)
{
    if (!r.v)
        return std::nullopt;
    return r.v->coefficients();
}

ChannelSet trial_channels(const ScenarioConfig& config, int trial)
{
    const RngStream t = RngStream(config.master_seed).child(static_cast<std::uint64_t>(trial));
    return generate_channels(trial_geometry(config, t), config.fading, t.child(1));
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "IRS-assisted spectrum sharing: joint and two-stage designs, Monte Carlo sweeps";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("p_p", &SystemParams::p_p)
        .def_readwrite("p_max", &SystemParams::p_max)
        .def_readwrite("sigma2_p", &SystemParams::sigma2_p)
        .def_readwrite("sigma2_s", &SystemParams::sigma2_s)
        .def_readwrite("gamma_th", &SystemParams::gamma_th)
        .def_readwrite("n_elements", &SystemParams::n_elements);

    py::class_<ChannelSet>(m, "ChannelSet")
        .def(py::init<>())
        .def_readwrite("h_pp", &ChannelSet::h_pp)
        .def_readwrite("h_ps", &ChannelSet::h_ps)
        .def_readwrite("h_sp", &ChannelSet::h_sp)
        .def_readwrite("h_ss", &ChannelSet::h_ss)
        .def_readwrite("h_pr", &ChannelSet::h_pr)
        .def_readwrite("h_sr", &ChannelSet::h_sr)
        .def_readwrite("h_rp", &ChannelSet::h_rp)
        .def_readwrite("h_rs", &ChannelSet::h_rs)
        .def_property_readonly("elements", &ChannelSet::elements)
        .def("h_prp", &ChannelSet::h_prp)
        .def("h_prs", &ChannelSet::h_prs)
        .def("h_srp", &ChannelSet::h_srp)
        .def("h_srs", &ChannelSet::h_srs);

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("p_s", &SolveResult::p_s)
        .def_property_readonly("v", &coefficients)
        .def_readonly("gamma_p", &SolveResult::gamma_p)
        .def_readonly("gamma_s", &SolveResult::gamma_s)
        .def_readonly("rate", &SolveResult::rate)
        .def_readonly("outer_iterations", &SolveResult::outer_iterations)
        .def_readonly("inner_iterations", &SolveResult::inner_iterations)
        .def_readonly("feasible", &SolveResult::feasible)
        .def_readonly("solver_warning", &SolveResult::solver_warning)
        .def_readonly("objective_trace", &SolveResult::objective_trace);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_static("from_json", &parse_config, py::arg("text"))
        .def_static("load", [](const std::string& path) { return load_config(path); }, py::arg("path"))
        .def("to_json", &dump_config)
        .def("validate", &ScenarioConfig::validate)
        .def("params", &ScenarioConfig::params, py::arg("p_max_dbm"))
        .def_readwrite("setup_id", &ScenarioConfig::setup_id)
        .def_readwrite("trials", &ScenarioConfig::trials)
        .def_readwrite("master_seed", &ScenarioConfig::master_seed)
        .def_readwrite("sweep_dbm", &ScenarioConfig::sweep_dbm)
        .def_readwrite("irs_rows", &ScenarioConfig::irs_rows)
        .def_readwrite("irs_cols", &ScenarioConfig::irs_cols)
        .def_readwrite("workers", &ScenarioConfig::workers)
        .def_property(
            "designs",
            [](const ScenarioConfig& c) {
                std::vector<std::string> out;
                for (Design d : c.designs)
                    out.emplace_back(to_string(d));
                return out;
            },
            [](ScenarioConfig& c, const std::vector<std::string>& names) {
                std::vector<Design> ds;
                for (const auto& n : names) {
                    const auto d = parse_design(n);
                    if (!d)
                        throw py::value_error("unknown design '" + n + "'");
                    ds.push_back(*d);
                }
                c.designs = std::move(ds);
            });

    py::class_<ResultRecord>(m, "ResultRecord")
        .def_readonly("setup_id", &ResultRecord::setup_id)
        .def_property_readonly("design", [](const ResultRecord& r) { return std::string(to_string(r.design)); })
        .def_readonly("p_max_dbm", &ResultRecord::p_max_dbm)
        .def_readonly("trial", &ResultRecord::trial)
        .def_readonly("seed", &ResultRecord::seed)
        .def_readonly("rate", &ResultRecord::rate)
        .def_readonly("gamma_p", &ResultRecord::gamma_p)
        .def_readonly("gamma_s", &ResultRecord::gamma_s)
        .def_readonly("p_s", &ResultRecord::p_s)
        .def_readonly("feasible", &ResultRecord::feasible);

    m.def("trial_channels", &trial_channels, py::arg("config"), py::arg("trial"),
          "Channel realization that run_sweep uses for `trial`.");

    m.def("optimal_power", &optimal_power, py::arg("alpha_pp"), py::arg("alpha_sp"), py::arg("params"));

    m.def(
        "max_eigenvalue", [](const CMatrix& b) { return max_eigenvalue(HermitianMatrix(b)); }, py::arg("b"));

    m.def(
        "sinr",
        [](const CVector& v, double p_s, const ChannelSet& ch, const SystemParams& params) {
            const ReflectionVector rv(v);
            return std::make_pair(sinr_primary(rv, p_s, ch, params), sinr_secondary(rv, p_s, ch, params));
        },
        py::arg("v"), py::arg("p_s"), py::arg("channels"), py::arg("params"), "(gamma_p, gamma_s)");

    m.def(
        "solve_ao",
        [](const ChannelSet& ch, const SystemParams& params, std::uint64_t seed, int restarts) {
            AoOptions opt;
            opt.restarts = restarts;
            py::gil_scoped_release release;
            return solve_ao(ch, params, RngStream(seed), opt);
        },
        py::arg("channels"), py::arg("params"), py::arg("seed") = 1, py::arg("restarts") = 1);

    m.def(
        "solve_two_stage",
        [](const std::string& design, const ChannelSet& ch, const SystemParams& params, std::uint64_t seed) {
            const DesignKind k = design_kind(design);
            py::gil_scoped_release release;
            return solve_two_stage(k, ch, params, RngStream(seed));
        },
        py::arg("design"), py::arg("channels"), py::arg("params"), py::arg("seed") = 1);

    m.def("solve_no_irs", &solve_no_irs, py::arg("with_sic"), py::arg("channels"), py::arg("params"));

    m.def(
        "interference_min",
        [](const CVector& h_cascaded, Complex h_direct, int count, std::uint64_t seed) {
            Engine engine = RngStream(seed).engine();
            return CVector(interference_min(h_cascaded, h_direct, count, engine).v.coefficients());
        },
        py::arg("h_cascaded"), py::arg("h_direct"), py::arg("count") = 1000, py::arg("seed") = 1);

    m.def(
        "run_sweep",
        [](const ScenarioConfig& config) {
            config.validate();
            py::gil_scoped_release release;
            return run_sweep(config);
        },
        py::arg("config"));

    m.def("format_results", &format_results, py::arg("records"));
    m.def(
        "write_results", [](const std::vector<ResultRecord>& r, const std::string& path) { write_results(r, path); },
        py::arg("records"), py::arg("path"));
}
