#pragma once

#include <optional>
#include <string_view>

#include "irs_cr/optimizer_ao.hpp"

namespace irs_cr {

enum class DesignKind { MaxAlphaPP, MaxAlphaSS, MinAlphaSP, MinAlphaPS, NoIrsWithSic, NoIrsWithoutSic };

std::string_view to_string(DesignKind kind);
std::optional<DesignKind> parse_design_kind(std::string_view name);
bool uses_irs(DesignKind kind);

/// Hermitian PSD matrix with unit diagonal (the lifted v v^H after relaxation).
class PsdMatrixVariable {
public:
    /// Throws NumericalError unless diag = 1 within 1e-8 and
    /// lambda_min >= -1e-8 * lambda_max.
    explicit PsdMatrixVariable(HermitianMatrix v);

    const HermitianMatrix& matrix() const { return v_; }
    Index dim() const { return v_.dim(); }

private:
    HermitianMatrix v_;
};

struct SdrOptions {
    double tolerance = 1e-7;  // primal and dual residual, normalized problem
    int max_iterations = 50000;
};

struct SdrSolution {
    PsdMatrixVariable v;
    double objective = 0.0;  // Tr(H V)
    int iterations = 0;
};

/// min Tr(H V) s.t. diag(V) = 1, V >= 0, by ADMM with eigenvalue-based PSD
/// projection. Throws NumericalError when the iteration cap is reached.
SdrSolution sdr_solve(const HermitianMatrix& h, const SdrOptions& options = {});

/// Draws `count` vectors from CN(0, V), projects each entry to unit modulus
/// and returns the candidate minimizing u^H H u. The phase-projected principal
/// eigenvector of V is always the first candidate.
CVector gaussian_randomize(const PsdMatrixVariable& v, const HermitianMatrix& h, int count, Engine& engine);

/// v_n = exp(j(angle h_d - angle h_c(n))): coherent combining with the direct path.
ReflectionVector signal_max_phases(const CVector& h_cascaded, Complex h_direct);

enum class NullingCase { closed_form, sdr_rank_one, sdr_randomized, closed_form_fallback };

struct InterferenceNulling {
    ReflectionVector v;
    NullingCase kind = NullingCase::closed_form;
    bool warning = false;  // SDP failed, closed form used instead
};

/// Minimizes |sum_n v_n h_c(n) + h_d|^2. Closed form (destructive alignment)
/// when sum |h_c| <= |h_d|, otherwise relaxation plus randomization.
InterferenceNulling interference_min(const CVector& h_cascaded, Complex h_direct, int randomization_count,
                                     Engine& engine, const SdrOptions& sdr = {});

struct TwoStageOptions {
    int randomization_count = 1000;
    SdrOptions sdr;
};

/// Stage 1 result. It does not depend on P_max, so callers sweeping the
/// power budget can compute it once per channel realization.
struct StageOne {
    ReflectionVector v;
    bool warning = false;
};

StageOne stage_one(DesignKind kind, const ChannelSet& ch, const RngStream& stream, const TwoStageOptions& options = {});
/// Closed-form power control on the gains produced by `stage`.
SolveResult stage_two(const ChannelSet& ch, const SystemParams& params, const StageOne& stage);

/// Stage 1 picks v by the design's single-link criterion, stage 2 applies
/// the closed-form power control on the resulting gains.
SolveResult solve_two_stage(DesignKind kind, const ChannelSet& ch, const SystemParams& params,
                            const RngStream& stream, const TwoStageOptions& options = {});

/// Baselines without the surface. With SIC the SR first decodes the primary
/// message when p_p|h_ps|^2 / (p_s|h_ss|^2 + sigma_s^2) >= gamma_th.
SolveResult solve_no_irs(bool with_sic, const ChannelSet& ch, const SystemParams& params);

}  // namespace irs_cr
