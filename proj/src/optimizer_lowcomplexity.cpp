#include "irs_cr/optimizer_lowcomplexity.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace irs_cr {

namespace {

using EigenSolver = Eigen::SelfAdjointEigenSolver<CMatrix>;

constexpr std::array<std::pair<DesignKind, std::string_view>, 6> kDesignNames{{
    {DesignKind::MaxAlphaPP, "MaxAlphaPP"},
    {DesignKind::MaxAlphaSS, "MaxAlphaSS"},
    {DesignKind::MinAlphaSP, "MinAlphaSP"},
    {DesignKind::MinAlphaPS, "MinAlphaPS"},
    {DesignKind::NoIrsWithSic, "NoIrsWithSic"},
    {DesignKind::NoIrsWithoutSic, "NoIrsWithoutSic"},
}};

CMatrix project_psd(const CMatrix& m)
{
    EigenSolver es(m);
    const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * clipped.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double trace_product(const CMatrix& h, const CMatrix& v)
{
    return h.cwiseProduct(v.transpose()).sum().real();
}

CVector unit_phases(const CVector& x)
{
    CVector u(x.size());
    for (Index i = 0; i < x.size(); ++i)
        u[i] = x[i] == Complex(0.0) ? Complex(1.0) : std::polar(1.0, std::arg(x[i]));
    return u;
}

ReflectionVector destructive_phases(const CVector& h_cascaded, Complex h_direct)
{
    CVector v(h_cascaded.size());
    for (Index n = 0; n < v.size(); ++n)
        v[n] = std::polar(1.0, std::numbers::pi + std::arg(h_direct) - std::arg(h_cascaded[n]));
    return ReflectionVector(std::move(v));
}

}  // namespace

std::string_view to_string(DesignKind kind)
{
    for (const auto& [k, name] : kDesignNames)
        if (k == kind)
            return name;
    return "unknown";
}

std::optional<DesignKind> parse_design_kind(std::string_view name)
{
    for (const auto& [k, n] : kDesignNames)
        if (n == name)
            return k;
    return std::nullopt;
}

bool uses_irs(DesignKind kind)
{
    return kind != DesignKind::NoIrsWithSic && kind != DesignKind::NoIrsWithoutSic;
}

PsdMatrixVariable::PsdMatrixVariable(HermitianMatrix v) : v_(std::move(v))
{
    const CMatrix& m = v_.matrix();
    for (Index i = 0; i < m.rows(); ++i)
        if (std::abs(m(i, i) - Complex(1.0)) > 1e-8)
            throw NumericalError("PsdMatrixVariable: diagonal entry " + std::to_string(i) + " is not 1");
    const Eigen::VectorXd ev = EigenSolver(m, Eigen::EigenvaluesOnly).eigenvalues();
    if (ev.size() > 0 && ev.minCoeff() < -1e-8 * std::max(ev.maxCoeff(), 1.0))
        throw NumericalError("PsdMatrixVariable: matrix is not positive semidefinite");
}

SdrSolution sdr_solve(const HermitianMatrix& h, const SdrOptions& options)
{
    const Index m = h.dim();
    if (m == 0)
        throw DimensionError("sdr_solve: empty matrix");
    const double scale = h.matrix().trace().real();
    if (!(scale > 0.0))
        return {PsdMatrixVariable(HermitianMatrix::identity(m)), 0.0, 0};

    const CMatrix hn = h.matrix() / scale;
    CMatrix z = CMatrix::Identity(m, m);
    CMatrix u = CMatrix::Zero(m, m);
    CMatrix v = z;
    // Fixed penalty on the trace-normalized problem; residual balancing was
    // observed to cycle on instances whose optimum is rank one.
    const double rho = 1.0 / static_cast<double>(m);
    const double threshold = options.tolerance * std::sqrt(static_cast<double>(m));

    int it = 0;
    bool converged = false;
    while (it < options.max_iterations) {
        ++it;
        v = project_psd(z - u - hn / rho);
        const CMatrix z_old = z;
        z = v + u;
        z.diagonal().setOnes();
        u += v - z;

        const double primal = (v - z).norm();
        const double dual = rho * (z - z_old).norm();
        if (primal <= threshold && dual <= threshold) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericalError("sdr_solve: no convergence after " + std::to_string(options.max_iterations) +
                             " iterations");

    // Rescale the PSD iterate to an exactly unit diagonal; congruence keeps it PSD.
    Eigen::VectorXd d = v.diagonal().real();
    if (d.minCoeff() <= 0.0)
        throw NumericalError("sdr_solve: degenerate diagonal in the relaxed solution");
    const Eigen::VectorXd inv_sqrt = d.cwiseSqrt().cwiseInverse();
    CMatrix feasible = inv_sqrt.cast<Complex>().asDiagonal() * v * inv_sqrt.cast<Complex>().asDiagonal();
    feasible = 0.5 * (feasible + feasible.adjoint());
    feasible.diagonal().setOnes();

    SdrSolution out{PsdMatrixVariable(HermitianMatrix(feasible)), 0.0, it};
    out.objective = trace_product(h.matrix(), out.v.matrix().matrix());
    return out;
}

CVector gaussian_randomize(const PsdMatrixVariable& v, const HermitianMatrix& h, int count, Engine& engine)
{
    if (v.dim() != h.dim())
        throw DimensionError("gaussian_randomize: covariance and objective sizes differ");
    EigenSolver es(v.matrix().matrix());
    const Index m = v.dim();
    // roundoff-level eigenvalues would otherwise leak ~1e-8 noise into every draw
    const double floor = 1e-12 * std::max(es.eigenvalues()[m - 1], 0.0);
    const Eigen::VectorXd spread = es.eigenvalues().unaryExpr([floor](double x) { return x > floor ? x : 0.0; });
    const CMatrix factor = es.eigenvectors() * spread.cwiseSqrt().cast<Complex>().asDiagonal();

    CVector best = unit_phases(es.eigenvectors().col(m - 1));
    double best_value = quadratic_form(h, best);
    CVector z(m);
    for (int k = 0; k < count; ++k) {
        for (Index i = 0; i < m; ++i)
            z[i] = standard_complex_normal(engine);
        const CVector candidate = unit_phases(factor * z);
        const double value = quadratic_form(h, candidate);
        if (value < best_value) {
            best_value = value;
            best = candidate;
        }
    }
    return best;
}

ReflectionVector signal_max_phases(const CVector& h_cascaded, Complex h_direct)
{
    CVector v(h_cascaded.size());
    for (Index n = 0; n < v.size(); ++n)
        v[n] = std::polar(1.0, std::arg(h_direct) - std::arg(h_cascaded[n]));
    return ReflectionVector(std::move(v));
}

InterferenceNulling interference_min(const CVector& h_cascaded, Complex h_direct, int randomization_count,
                                     Engine& engine, const SdrOptions& sdr)
{
    if (h_cascaded.cwiseAbs().sum() <= std::abs(h_direct))
        return {destructive_phases(h_cascaded, h_direct), NullingCase::closed_form, false};

    const Index n = h_cascaded.size();
    CVector hbar(n + 1);
    hbar.head(n) = h_cascaded;
    hbar[n] = h_direct;
    const HermitianMatrix h = outer_product(hbar);
    try {
        const SdrSolution relaxed = sdr_solve(h, sdr);
        const Eigen::VectorXd ev =
            EigenSolver(relaxed.v.matrix().matrix(), Eigen::EigenvaluesOnly).eigenvalues();
        if (ev[n - 1] < 1e-6 * ev[n]) {
            EigenSolver es(relaxed.v.matrix().matrix());
            return {ReflectionVector::from_lifted(unit_phases(es.eigenvectors().col(n))), NullingCase::sdr_rank_one,
                    false};
        }
        const CVector lifted = gaussian_randomize(relaxed.v, h, randomization_count, engine);
        return {ReflectionVector::from_lifted(lifted), NullingCase::sdr_randomized, false};
    } catch (const NumericalError&) {
        return {destructive_phases(h_cascaded, h_direct), NullingCase::closed_form_fallback, true};
    }
}

StageOne stage_one(DesignKind kind, const ChannelSet& ch, const RngStream& stream, const TwoStageOptions& options)
{
    if (!uses_irs(kind))
        throw std::invalid_argument("stage_one: " + std::string(to_string(kind)) + " is not an IRS design");
    ch.validate();

    Engine engine = stream.engine();
    switch (kind) {
    case DesignKind::MaxAlphaPP:
        return {signal_max_phases(ch.h_prp(), ch.h_pp), false};
    case DesignKind::MaxAlphaSS:
        return {signal_max_phases(ch.h_srs(), ch.h_ss), false};
    case DesignKind::MinAlphaSP: {
        auto nulling = interference_min(ch.h_srp(), ch.h_sp, options.randomization_count, engine, options.sdr);
        return {nulling.v, nulling.warning};
    }
    case DesignKind::MinAlphaPS: {
        auto nulling = interference_min(ch.h_prs(), ch.h_ps, options.randomization_count, engine, options.sdr);
        return {nulling.v, nulling.warning};
    }
    default:
        break;
    }
    throw std::logic_error("stage_one: unhandled design");
}

SolveResult stage_two(const ChannelSet& ch, const SystemParams& params, const StageOne& stage)
{
    params.validate();
    const LinkGains gains = link_gains(stage.v.lifted(), LiftedChannels::from(ch));
    const double p_s = optimal_power(gains.alpha_pp, gains.alpha_sp, params);
    SolveResult result = evaluate_solution(ch, params, p_s, stage.v);
    result.solver_warning = stage.warning;
    result.outer_iterations = 1;
    result.objective_trace = {result.rate};
    return result;
}

SolveResult solve_two_stage(DesignKind kind, const ChannelSet& ch, const SystemParams& params,
                            const RngStream& stream, const TwoStageOptions& options)
{
    return stage_two(ch, params, stage_one(kind, ch, stream, options));
}

SolveResult solve_no_irs(bool with_sic, const ChannelSet& ch, const SystemParams& params)
{
    params.validate();
    const double g_pp = std::norm(ch.h_pp);
    const double g_sp = std::norm(ch.h_sp);
    const double g_ps = std::norm(ch.h_ps);
    const double g_ss = std::norm(ch.h_ss);

    SolveResult r;
    r.p_s = optimal_power(g_pp, g_sp, params);
    r.gamma_p = params.p_p * g_pp / (r.p_s * g_sp + params.sigma2_p);
    r.gamma_s = r.p_s * g_ss / (params.p_p * g_ps + params.sigma2_s);
    if (with_sic) {
        const double primary_at_sr = params.p_p * g_ps / (r.p_s * g_ss + params.sigma2_s);
        if (primary_at_sr >= params.gamma_th)
            r.gamma_s = r.p_s * g_ss / params.sigma2_s;
    }
    r.rate = su_rate(r.gamma_s);
    r.feasible = meets_primary_target(r.gamma_p, params.gamma_th);
    r.outer_iterations = 1;
    r.objective_trace = {r.rate};
    return r;
}

}  // namespace irs_cr
