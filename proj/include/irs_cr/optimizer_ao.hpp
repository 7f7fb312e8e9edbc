#pragma once

#include <optional>
#include <vector>

#include "irs_cr/channel.hpp"
#include "irs_cr/numerics.hpp"
#include "irs_cr/rng.hpp"
#include "irs_cr/system_model.hpp"

namespace irs_cr {

/// Outcome of any solver (joint, two-stage or no-IRS baseline).
struct SolveResult {
    double p_s = 0.0;
    std::optional<ReflectionVector> v;  // empty for the no-IRS baselines
    double gamma_p = 0.0;
    double gamma_s = 0.0;
    double rate = 0.0;
    int outer_iterations = 0;
    int inner_iterations = 0;
    bool feasible = false;
    bool solver_warning = false;  // e.g. SDP fell back to the closed form
    std::vector<double> objective_trace;
};

/// Ranking used to pick among several starts: feasible beats infeasible,
/// then higher rate.
bool preferable(const SolveResult& candidate, const SolveResult& incumbent);

/// gamma_p >= gamma_th * (1 - 1e-6).
bool meets_primary_target(double gamma_p, double gamma_th);

/// Evaluates SINRs and rate of (p_s, v) and sets the feasibility flag.
SolveResult evaluate_solution(const ChannelSet& ch, const SystemParams& params, double p_s, const ReflectionVector& v);

/// Closed-form secondary power for fixed equivalent gains:
/// max(0, min((P0 alpha_pp / gamma_th - sigma_p^2) / alpha_sp, P_max)).
double optimal_power(double alpha_pp, double alpha_sp, const SystemParams& params);

/// Linear minorant 2 Re{w^H x} + d of x^H A x / x^H B x over unit-modulus x,
/// tight at the expansion point.
struct ScaBound {
    CVector w;
    double d = 0.0;

    double evaluate(const CVector& x) const;
};

ScaBound sca_bound(const HermitianMatrix& a, const HermitianMatrix& b, const CVector& v0);
/// Same, with lambda_max(B) supplied by the caller.
ScaBound sca_bound(const HermitianMatrix& a, const HermitianMatrix& b, double lambda_max_b, const CVector& v0);

/// u_n = exp(j angle(w_ss(n) + lambda w_pp(n))); entries where the sum
/// vanishes keep fallback(n). lambda = +inf selects the phases of w_pp.
CVector combine_phases(double lambda, const CVector& w_ss, const CVector& w_pp, const CVector& fallback);

/// Left-hand side of the linearized primary constraint at combine_phases(lambda, ...).
double gamma_p_of_lambda(double lambda, const CVector& w_ss, const CVector& w_pp, double d_pp,
                         const CVector& fallback);

enum class P23Case { unconstrained, bisection, infeasible };

struct P23Solution {
    P23Case kind = P23Case::infeasible;
    CVector u;            // unit-modulus; equals the previous iterate when infeasible
    double lambda = 0.0;  // +inf when only the limit solution meets the target
    double objective = 0.0;
    double constraint_value = 0.0;
    int bisection_steps = 0;

    bool feasible() const { return kind != P23Case::infeasible; }
};

/// Maximizes 2 Re{w_ss^H u} + d_ss s.t. 2 Re{w_pp^H u} + d_pp >= gamma_th,
/// |u_n| <= 1, whose optimum is unit-modulus. Bisects the dual variable until
/// the constraint is met with slack at most tolerance * max(1, gamma_th).
P23Solution solve_p23(const CVector& w_ss, const CVector& w_pp, double d_ss, double d_pp, double gamma_th,
                      const CVector& v_prev, double tolerance = 1e-8);

enum class InitMode { random, zero };

struct AoOptions {
    double outer_tolerance = 1e-4;
    double inner_tolerance = 1e-5;
    double bisection_tolerance = 1e-8;
    int max_outer = 50;
    int max_inner = 100;
    InitMode init = InitMode::random;
    int restarts = 1;
};

struct BeamformingResult {
    CVector lifted;
    double objective = 0.0;  // x^H A_ss x / x^H B_ps x at `lifted`
    int iterations = 0;
    bool stopped_infeasible = false;
    std::vector<double> trace;  // objective after every accepted step, starting with v_init
};

/// SCA loop for fixed p_s: re-expands both fractional terms at the current
/// lifted iterate and solves the linearized subproblem until the objective's
/// relative change drops below options.inner_tolerance.
BeamformingResult optimize_beamforming(const ChannelSet& ch, double p_s, const SystemParams& params,
                                       const CVector& lifted_init, const AoOptions& options = {});
BeamformingResult optimize_beamforming(const LiftedChannels& lifted, double p_s, const SystemParams& params,
                                       const CVector& lifted_init, const AoOptions& options = {});

/// Alternating power control / passive beamforming from a given start.
SolveResult solve_ao(const ChannelSet& ch, const SystemParams& params, const ReflectionVector& v_init,
                     const AoOptions& options = {});
/// Start(s) drawn from `stream` per options.init; the best of
/// options.restarts runs is returned.
SolveResult solve_ao(const ChannelSet& ch, const SystemParams& params, const RngStream& stream,
                     const AoOptions& options = {});

ReflectionVector random_reflection(Index n, Engine& engine);

}  // namespace irs_cr
