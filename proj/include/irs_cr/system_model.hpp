#pragma once

#include "irs_cr/channel.hpp"
#include "irs_cr/numerics.hpp"

namespace irs_cr {

/// Linear-unit system parameters (watts, linear SINR).
struct SystemParams {
    double p_p = 0.1;         // primary transmit power, fixed
    double p_max = 1.0;       // secondary power budget
    double sigma2_p = 3.1622776601683795e-14;
    double sigma2_s = 3.1622776601683795e-14;
    double gamma_th = 100.0;  // primary SINR target
    Index n_elements = 60;

    void validate() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);

/// Unit-modulus IRS reflection coefficients v_1..v_N.
///
/// The composite channel through the surface is sum_n v_n h_irj(n). The
/// lifted vector is the (N+1)-column whose conjugate transpose is
/// [v_1 ... v_N 1], so |lifted^H hbar|^2 is the equivalent channel gain.
class ReflectionVector {
public:
    ReflectionVector() = default;
    /// Throws std::invalid_argument unless every |v_n| = 1 within 1e-12.
    explicit ReflectionVector(CVector coefficients);

    static ReflectionVector from_phases(const Eigen::VectorXd& theta);
    static ReflectionVector ones(Index n);
    /// Extraction from any global rotation of a lifted vector:
    /// v_n = exp(-j angle(lifted_n / lifted_{N+1})).
    static ReflectionVector from_lifted(const CVector& lifted);

    Index size() const { return v_.size(); }
    const CVector& coefficients() const { return v_; }
    CVector lifted() const;

private:
    CVector v_;
};

/// Cascaded-over-direct stacking, hbar_ij = [h_irj; h_ij].
struct LiftedChannels {
    CVector hbar_pp, hbar_ps, hbar_sp, hbar_ss;

    static LiftedChannels from(const ChannelSet& ch);
};

/// sum_n v_n h_c(n) + h_d.
Complex composite_gain(const CVector& coefficients, const CVector& h_cascaded, Complex h_direct);

double sinr_primary(const ReflectionVector& v, double p_s, const ChannelSet& ch, const SystemParams& params);
double sinr_secondary(const ReflectionVector& v, double p_s, const ChannelSet& ch, const SystemParams& params);
double su_rate(double gamma_s);

/// |lifted^H hbar|^2.
double equivalent_gain(const CVector& lifted_v, const CVector& hbar);

/// Equivalent gains of all four links for one reflection.
struct LinkGains {
    double alpha_pp = 0.0, alpha_ps = 0.0, alpha_sp = 0.0, alpha_ss = 0.0;
};
LinkGains link_gains(const CVector& lifted_v, const LiftedChannels& lifted);

/// Quadratic-form matrices of the beamforming subproblem for fixed p_s:
/// A_jj = p_j H_jj, B_ij = p_i H_ij + I sigma_j^2/(N+1), H_ij = hbar_ij hbar_ij^H.
struct QuadraticForms {
    HermitianMatrix a_ss, a_pp, b_ps, b_sp;
};
QuadraticForms build_ab(const ChannelSet& ch, double p_s, const SystemParams& params);
QuadraticForms build_ab(const LiftedChannels& lifted, double p_s, const SystemParams& params);

/// x^H A x / x^H B x.
double fractional_quadratic(const HermitianMatrix& a, const HermitianMatrix& b, const CVector& x);

}  // namespace irs_cr
