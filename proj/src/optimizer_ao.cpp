#include "irs_cr/optimizer_ao.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace irs_cr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool relative_change_below(double current, double previous, double tolerance)
{
    return std::abs(current - previous) <= tolerance * std::max(std::abs(current), 1e-300);
}

double p23_objective(const CVector& w_ss, double d_ss, const CVector& u)
{
    return 2.0 * w_ss.dot(u).real() + d_ss;
}

}  // namespace

bool preferable(const SolveResult& candidate, const SolveResult& incumbent)
{
    if (candidate.feasible != incumbent.feasible)
        return candidate.feasible;
    return candidate.rate > incumbent.rate;
}

bool meets_primary_target(double gamma_p, double gamma_th)
{
    return gamma_p >= gamma_th * (1.0 - 1e-6);
}

SolveResult evaluate_solution(const ChannelSet& ch, const SystemParams& params, double p_s, const ReflectionVector& v)
{
    SolveResult r;
    r.p_s = p_s;
    r.v = v;
    r.gamma_p = sinr_primary(v, p_s, ch, params);
    r.gamma_s = sinr_secondary(v, p_s, ch, params);
    r.rate = su_rate(r.gamma_s);
    r.feasible = meets_primary_target(r.gamma_p, params.gamma_th);
    return r;
}

double optimal_power(double alpha_pp, double alpha_sp, const SystemParams& params)
{
    if (!(alpha_pp >= 0.0) || !(alpha_sp >= 0.0))
        throw std::invalid_argument("optimal_power: gains must be nonnegative");
    const double headroom = params.p_p * alpha_pp / params.gamma_th - params.sigma2_p;
    if (headroom < 0.0)
        return 0.0;
    if (alpha_sp == 0.0)
        return params.p_max;
    return std::max(0.0, std::min(headroom / alpha_sp, params.p_max));
}

double ScaBound::evaluate(const CVector& x) const
{
    require_same_length(w, x, "ScaBound::evaluate");
    return 2.0 * w.dot(x).real() + d;
}

ScaBound sca_bound(const HermitianMatrix& a, const HermitianMatrix& b, const CVector& v0)
{
    return sca_bound(a, b, max_eigenvalue(b), v0);
}

ScaBound sca_bound(const HermitianMatrix& a, const HermitianMatrix& b, double lambda_max_b, const CVector& v0)
{
    if (a.dim() != v0.size() || b.dim() != v0.size())
        throw DimensionError("sca_bound: matrix and expansion point sizes differ");
    const CVector av = a.matrix() * v0;
    const CVector bv = b.matrix() * v0;
    const double a0 = v0.dot(av).real();
    const double y0 = v0.dot(bv).real();
    if (!(y0 > 0.0))
        throw NumericalError("sca_bound: denominator form is not positive at the expansion point");
    const double m = static_cast<double>(v0.size());  // ||v0||^2 for unit-modulus v0
    const double ratio = a0 / (y0 * y0);

    ScaBound bound;
    bound.w = av / y0 - (bv - lambda_max_b * v0) * ratio;
    bound.d = -(2.0 * lambda_max_b * m - y0) * ratio;
    return bound;
}

CVector combine_phases(double lambda, const CVector& w_ss, const CVector& w_pp, const CVector& fallback)
{
    require_same_length(w_ss, w_pp, "combine_phases");
    require_same_length(w_ss, fallback, "combine_phases");
    CVector u(w_ss.size());
    for (Index n = 0; n < u.size(); ++n) {
        Complex z;
        if (std::isinf(lambda))
            z = w_pp[n] != Complex(0.0) ? w_pp[n] : w_ss[n];
        else
            z = w_ss[n] + lambda * w_pp[n];
        if (z == Complex(0.0) || !std::isfinite(std::abs(z)))
            u[n] = std::polar(1.0, std::arg(fallback[n]));
        else
            u[n] = std::polar(1.0, std::arg(z));
    }
    return u;
}

double gamma_p_of_lambda(double lambda, const CVector& w_ss, const CVector& w_pp, double d_pp,
                         const CVector& fallback)
{
    if (!(lambda >= 0.0))
        throw std::invalid_argument("gamma_p_of_lambda: lambda must be nonnegative");
    return 2.0 * w_pp.dot(combine_phases(lambda, w_ss, w_pp, fallback)).real() + d_pp;
}

P23Solution solve_p23(const CVector& w_ss, const CVector& w_pp, double d_ss, double d_pp, double gamma_th,
                      const CVector& v_prev, double tolerance)
{
    require_same_length(w_ss, w_pp, "solve_p23");
    require_same_length(w_ss, v_prev, "solve_p23");
    if (!all_finite(w_ss) || !all_finite(w_pp) || !std::isfinite(d_ss) || !std::isfinite(d_pp))
        throw NumericalError("solve_p23: non-finite input");

    const double slack = tolerance * std::max(1.0, gamma_th);
    auto gamma_at = [&](double lambda) { return gamma_p_of_lambda(lambda, w_ss, w_pp, d_pp, v_prev); };
    auto finish = [&](P23Case kind, double lambda, int steps) {
        P23Solution s;
        s.kind = kind;
        s.lambda = lambda;
        s.bisection_steps = steps;
        s.u = kind == P23Case::infeasible ? v_prev : combine_phases(lambda, w_ss, w_pp, v_prev);
        s.objective = p23_objective(w_ss, d_ss, s.u);
        s.constraint_value = 2.0 * w_pp.dot(s.u).real() + d_pp;
        return s;
    };

    if (gamma_at(0.0) >= gamma_th)
        return finish(P23Case::unconstrained, 0.0, 0);

    const double limit = gamma_at(kInf);
    if (limit < gamma_th - slack)
        return finish(P23Case::infeasible, 0.0, 0);
    if (limit < gamma_th)
        return finish(P23Case::bisection, kInf, 0);

    double lo = 0.0;
    double hi = 1.0;
    int steps = 0;
    while (gamma_at(hi) < gamma_th) {
        lo = hi;
        hi *= 2.0;
        ++steps;
        if (!std::isfinite(hi))
            return finish(P23Case::bisection, kInf, steps);
    }
    double g_hi = gamma_at(hi);
    for (int it = 0; it < 400 && g_hi - gamma_th > slack; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double g = gamma_at(mid);
        ++steps;
        if (g >= gamma_th) {
            hi = mid;
            g_hi = g;
        } else {
            lo = mid;
        }
    }
    return finish(P23Case::bisection, hi, steps);
}

BeamformingResult optimize_beamforming(const ChannelSet& ch, double p_s, const SystemParams& params,
                                       const CVector& lifted_init, const AoOptions& options)
{
    return optimize_beamforming(LiftedChannels::from(ch), p_s, params, lifted_init, options);
}

BeamformingResult optimize_beamforming(const LiftedChannels& lifted, double p_s, const SystemParams& params,
                                       const CVector& lifted_init, const AoOptions& options)
{
    require_same_length(lifted.hbar_pp, lifted_init, "optimize_beamforming");
    for (Index n = 0; n < lifted_init.size(); ++n)
        if (!(std::abs(std::abs(lifted_init[n]) - 1.0) <= 1e-12))
            throw std::invalid_argument("optimize_beamforming: initial point is not unit-modulus");

    const QuadraticForms q = build_ab(lifted, p_s, params);
    const double lambda_ps = max_eigenvalue(q.b_ps);
    const double lambda_sp = max_eigenvalue(q.b_sp);

    BeamformingResult out;
    out.lifted = lifted_init;
    out.objective = fractional_quadratic(q.a_ss, q.b_ps, out.lifted);
    out.trace.push_back(out.objective);

    for (int it = 1; it <= options.max_inner; ++it) {
        const ScaBound ss = sca_bound(q.a_ss, q.b_ps, lambda_ps, out.lifted);
        const ScaBound pp = sca_bound(q.a_pp, q.b_sp, lambda_sp, out.lifted);
        const P23Solution step =
            solve_p23(ss.w, pp.w, ss.d, pp.d, params.gamma_th, out.lifted, options.bisection_tolerance);
        out.iterations = it;
        if (!step.feasible()) {
            out.stopped_infeasible = true;
            break;
        }
        const double objective = fractional_quadratic(q.a_ss, q.b_ps, step.u);
        const bool converged = relative_change_below(objective, out.objective, options.inner_tolerance);
        out.lifted = step.u;
        out.objective = objective;
        out.trace.push_back(objective);
        if (converged)
            break;
    }
    return out;
}

ReflectionVector random_reflection(Index n, Engine& engine)
{
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    Eigen::VectorXd theta(n);
    for (Index i = 0; i < n; ++i)
        theta[i] = phase(engine);
    return ReflectionVector::from_phases(theta);
}

SolveResult solve_ao(const ChannelSet& ch, const SystemParams& params, const ReflectionVector& v_init,
                     const AoOptions& options)
{
    ch.validate();
    params.validate();
    if (v_init.size() != ch.elements())
        throw DimensionError("solve_ao: initial reflection has the wrong length");

    const LiftedChannels lifted = LiftedChannels::from(ch);
    CVector tilde = v_init.lifted();
    double p_s = 0.0;
    int outer = 0;
    int inner = 0;
    std::vector<double> trace;

    for (int l = 1; l <= options.max_outer; ++l) {
        const LinkGains before = link_gains(tilde, lifted);
        p_s = optimal_power(before.alpha_pp, before.alpha_sp, params);

        const BeamformingResult bf = optimize_beamforming(lifted, p_s, params, tilde, options);
        tilde = bf.lifted;
        inner += bf.iterations;
        outer = l;

        const LinkGains after = link_gains(tilde, lifted);
        const double gamma_s = p_s * after.alpha_ss / (params.p_p * after.alpha_ps + params.sigma2_s);
        const double objective = su_rate(gamma_s);
        const bool converged = !trace.empty() && relative_change_below(objective, trace.back(), options.outer_tolerance);
        trace.push_back(objective);
        if (converged)
            break;
    }

    SolveResult result = evaluate_solution(ch, params, p_s, ReflectionVector::from_lifted(tilde));
    if (!result.feasible) {
        auto v = *result.v;
        result = evaluate_solution(ch, params, 0.0, v);
        result.feasible = false;
    }
    result.outer_iterations = outer;
    result.inner_iterations = inner;
    result.objective_trace = std::move(trace);
    return result;
}

SolveResult solve_ao(const ChannelSet& ch, const SystemParams& params, const RngStream& stream,
                     const AoOptions& options)
{
    const int restarts = std::max(1, options.restarts);
    std::optional<SolveResult> best;
    for (int r = 0; r < restarts; ++r) {
        ReflectionVector start = ReflectionVector::ones(ch.elements());
        if (options.init == InitMode::random) {
            Engine engine = stream.child(static_cast<std::uint64_t>(r)).engine();
            start = random_reflection(ch.elements(), engine);
        } else if (r > 0) {
            break;  // zero-phase start is deterministic; restarts add nothing
        }
        SolveResult candidate = solve_ao(ch, params, start, options);
        if (!best || preferable(candidate, *best))
            best = std::move(candidate);
    }
    return *best;
}

}  // namespace irs_cr
