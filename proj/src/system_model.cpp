#include "irs_cr/system_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace irs_cr {

void SystemParams::validate() const
{
    if (!(p_p > 0.0))
        throw std::invalid_argument("params: p_p must be positive");
    if (!(p_max > 0.0))
        throw std::invalid_argument("params: p_max must be positive");
    if (!(sigma2_p > 0.0) || !(sigma2_s > 0.0))
        throw std::invalid_argument("params: noise powers must be positive");
    if (!(gamma_th > 0.0))
        throw std::invalid_argument("params: gamma_th must be positive");
    if (n_elements < 1)
        throw std::invalid_argument("params: at least one IRS element is required");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ReflectionVector::ReflectionVector(CVector coefficients) : v_(std::move(coefficients))
{
    for (Index i = 0; i < v_.size(); ++i)
        if (!(std::abs(std::abs(v_[i]) - 1.0) <= 1e-12))
            throw std::invalid_argument("ReflectionVector: entry " + std::to_string(i) + " is not unit-modulus");
}

ReflectionVector ReflectionVector::from_phases(const Eigen::VectorXd& theta)
{
    CVector v(theta.size());
    for (Index i = 0; i < theta.size(); ++i)
        v[i] = std::polar(1.0, theta[i]);
    return ReflectionVector(std::move(v));
}

ReflectionVector ReflectionVector::ones(Index n)
{
    return ReflectionVector(CVector::Ones(n));
}

ReflectionVector ReflectionVector::from_lifted(const CVector& lifted)
{
    const Index n = lifted.size() - 1;
    if (n < 1)
        throw DimensionError("ReflectionVector::from_lifted: lifted vector needs at least two entries");
    const Complex anchor = lifted[n];
    if (anchor == Complex(0.0))
        throw NumericalError("ReflectionVector::from_lifted: auxiliary entry is zero");
    CVector v(n);
    for (Index i = 0; i < n; ++i)
        v[i] = std::polar(1.0, -std::arg(lifted[i] / anchor));
    return ReflectionVector(std::move(v));
}

CVector ReflectionVector::lifted() const
{
    CVector out(v_.size() + 1);
    out.head(v_.size()) = v_.conjugate();
    out[v_.size()] = 1.0;
    return out;
}

LiftedChannels LiftedChannels::from(const ChannelSet& ch)
{
    auto stack = [](const CVector& cascaded, Complex direct) {
        CVector out(cascaded.size() + 1);
        out.head(cascaded.size()) = cascaded;
        out[cascaded.size()] = direct;
        return out;
    };
    return {stack(ch.h_prp(), ch.h_pp), stack(ch.h_prs(), ch.h_ps), stack(ch.h_srp(), ch.h_sp),
            stack(ch.h_srs(), ch.h_ss)};
}

Complex composite_gain(const CVector& coefficients, const CVector& h_cascaded, Complex h_direct)
{
    require_same_length(coefficients, h_cascaded, "composite_gain");
    return coefficients.cwiseProduct(h_cascaded).sum() + h_direct;
}

double sinr_primary(const ReflectionVector& v, double p_s, const ChannelSet& ch, const SystemParams& params)
{
    const double signal = std::norm(composite_gain(v.coefficients(), ch.h_prp(), ch.h_pp));
    const double interference = std::norm(composite_gain(v.coefficients(), ch.h_srp(), ch.h_sp));
    return params.p_p * signal / (p_s * interference + params.sigma2_p);
}

double sinr_secondary(const ReflectionVector& v, double p_s, const ChannelSet& ch, const SystemParams& params)
{
    const double signal = std::norm(composite_gain(v.coefficients(), ch.h_srs(), ch.h_ss));
    const double interference = std::norm(composite_gain(v.coefficients(), ch.h_prs(), ch.h_ps));
    return p_s * signal / (params.p_p * interference + params.sigma2_s);
}

double su_rate(double gamma_s)
{
    return std::log2(1.0 + gamma_s);
}

double equivalent_gain(const CVector& lifted_v, const CVector& hbar)
{
    require_same_length(lifted_v, hbar, "equivalent_gain");
    return std::norm(lifted_v.dot(hbar));
}

LinkGains link_gains(const CVector& lifted_v, const LiftedChannels& lifted)
{
    return {equivalent_gain(lifted_v, lifted.hbar_pp), equivalent_gain(lifted_v, lifted.hbar_ps),
            equivalent_gain(lifted_v, lifted.hbar_sp), equivalent_gain(lifted_v, lifted.hbar_ss)};
}

QuadraticForms build_ab(const LiftedChannels& lifted, double p_s, const SystemParams& params)
{
    const Index dim = lifted.hbar_pp.size();
    const double n1 = static_cast<double>(dim);
    const auto eye = HermitianMatrix::identity(dim);
    return {
        p_s * outer_product(lifted.hbar_ss),
        params.p_p * outer_product(lifted.hbar_pp),
        params.p_p * outer_product(lifted.hbar_ps) + (params.sigma2_s / n1) * eye,
        p_s * outer_product(lifted.hbar_sp) + (params.sigma2_p / n1) * eye,
    };
}

QuadraticForms build_ab(const ChannelSet& ch, double p_s, const SystemParams& params)
{
    return build_ab(LiftedChannels::from(ch), p_s, params);
}

double fractional_quadratic(const HermitianMatrix& a, const HermitianMatrix& b, const CVector& x)
{
    return quadratic_form(a, x) / quadratic_form(b, x);
}

}  // namespace irs_cr
