#include <doctest.h>

#include <random>

#include "irs_cr/system_model.hpp"
#include "oracle/oracle.hpp"

using namespace irs_cr;

namespace {

CVector random_vector(std::mt19937_64& rng, Index n, double scale = 1.0)
{
    const oracle::cvec v = oracle::random_cvec(rng, static_cast<int>(n));
    return scale * Eigen::Map<const CVector>(v.data(), n);
}

ChannelSet random_channels(std::mt19937_64& rng, Index n)
{
    ChannelSet ch;
    auto scalar = [&] { return random_vector(rng, 1, 1e-3)[0]; };
    ch.h_pp = scalar();
    ch.h_ps = scalar();
    ch.h_sp = scalar();
    ch.h_ss = scalar();
    ch.h_pr = random_vector(rng, n, 1e-2);
    ch.h_sr = random_vector(rng, n, 1e-2);
    ch.h_rp = random_vector(rng, n, 1e-2);
    ch.h_rs = random_vector(rng, n, 1e-2);
    return ch;
}

ReflectionVector random_v(std::mt19937_64& rng, Index n)
{
    const oracle::cvec u = oracle::random_phases(rng, static_cast<int>(n));
    return ReflectionVector(Eigen::Map<const CVector>(u.data(), n));
}

oracle::cvec to_std(const CVector& x)
{
    return {x.data(), x.data() + x.size()};
}

ChannelSet zero_irs_channels(Index n)
{
    ChannelSet ch;
    ch.h_pp = {3e-4, 1e-4};
    ch.h_ps = {-2e-4, 0.0};
    ch.h_sp = {1e-5, 2e-5};
    ch.h_ss = {0.0, 5e-4};
    ch.h_pr = ch.h_sr = ch.h_rp = ch.h_rs = CVector::Zero(n);
    return ch;
}

}  // namespace

TEST_CASE("unit conversions")
{
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
    CHECK(dbm_to_watts(20.0) == doctest::Approx(0.1));
    CHECK(watts_to_dbm(1e-3) == doctest::Approx(0.0));
    CHECK(db_to_linear(20.0) == doctest::Approx(100.0));
    CHECK(watts_to_dbm(dbm_to_watts(-105.0)) == doctest::Approx(-105.0));
}

TEST_CASE("SystemParams validation")
{
    SystemParams p;
    CHECK_NOTHROW(p.validate());
    p.p_max = -1.0;
    CHECK_THROWS(p.validate());
    p = {};
    p.sigma2_p = 0.0;
    CHECK_THROWS(p.validate());
}

TEST_CASE("ReflectionVector")
{
    SUBCASE("rejects non-unit entries")
    {
        CHECK_THROWS_AS(ReflectionVector(CVector::Constant(2, Complex(0.5))), std::invalid_argument);
    }
    SUBCASE("lifted appends one and conjugates")
    {
        const ReflectionVector v(CVector{{Complex(0.0, 1.0), Complex(-1.0)}});
        const CVector l = v.lifted();
        CHECK(l.size() == 3);
        CHECK(std::abs(l[0] - Complex(0.0, -1.0)) < 1e-15);
        CHECK(std::abs(l[1] - Complex(-1.0)) < 1e-15);
        CHECK(l[2] == Complex(1.0));
    }
    SUBCASE("extraction undoes lifting under any global rotation")
    {
        std::mt19937_64 rng(1);
        const ReflectionVector v = random_v(rng, 7);
        const CVector rotated = std::polar(2.5, 0.7) * v.lifted();
        const ReflectionVector back = ReflectionVector::from_lifted(rotated);
        CHECK((back.coefficients() - v.coefficients()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("composite_gain and equivalent_gain agree")
{
    std::mt19937_64 rng(2);
    for (int k = 0; k < 20; ++k) {
        const ReflectionVector v = random_v(rng, 5);
        const CVector hc = random_vector(rng, 5);
        const Complex hd = random_vector(rng, 1)[0];
        CVector hbar(6);
        hbar << hc, hd;
        Complex loop = hd;
        for (Index n = 0; n < 5; ++n)
            loop += v.coefficients()[n] * hc[n];
        CHECK(std::abs(composite_gain(v.coefficients(), hc, hd) - loop) < 1e-12);
        CHECK(equivalent_gain(v.lifted(), hbar) == doctest::Approx(std::norm(loop)).epsilon(1e-12));
    }
}

TEST_CASE("equivalent_gain examples")
{
    const CVector ones = CVector::Ones(4);
    for (Index k = 0; k < 4; ++k)
        CHECK(equivalent_gain(ones, CVector::Unit(4, k)) == doctest::Approx(1.0));

    std::mt19937_64 rng(3);
    const CVector l = random_vector(rng, 6);
    const CVector h = random_vector(rng, 6);
    const double g = equivalent_gain(l, h);
    CHECK(std::abs(equivalent_gain(std::polar(1.0, 0.7) * l, h) - g) <= 1e-12 * std::max(1.0, g));

    Complex acc = 0.0;
    for (Index n = 0; n < 6; ++n)
        acc += std::conj(l[n]) * h[n];
    CHECK(g == doctest::Approx(std::norm(acc)).epsilon(1e-12));
}

TEST_CASE("sinr_primary")
{
    SystemParams p;
    p.n_elements = 3;

    SUBCASE("interference-free direct link")
    {
        const ChannelSet ch = zero_irs_channels(3);
        const ReflectionVector v = ReflectionVector::ones(3);
        CHECK(sinr_primary(v, 0.0, ch, p) == doctest::Approx(p.p_p * std::norm(ch.h_pp) / p.sigma2_p));
    }
    SUBCASE("matches a scalar evaluation of the signal model")
    {
        std::mt19937_64 rng(4);
        for (int k = 0; k < 20; ++k) {
            const ChannelSet ch = random_channels(rng, 3);
            const ReflectionVector v = random_v(rng, 3);
            const oracle::Scenario s{{to_std(ch.h_prp()), ch.h_pp}, {to_std(ch.h_prs()), ch.h_ps},
                                     {to_std(ch.h_srp()), ch.h_sp}, {to_std(ch.h_srs()), ch.h_ss},
                                     p.p_p, p.p_max, p.sigma2_p, p.sigma2_s, p.gamma_th};
            const oracle::cvec vv = to_std(v.coefficients());
            const double ps = 0.3;
            CHECK(sinr_primary(v, ps, ch, p) == doctest::Approx(oracle::sinr_p(s, vv, ps)).epsilon(1e-10));
            CHECK(sinr_secondary(v, ps, ch, p) == doctest::Approx(oracle::sinr_s(s, vv, ps)).epsilon(1e-10));
        }
    }
    SUBCASE("invariant under a global rotation of the lifted vector")
    {
        std::mt19937_64 rng(5);
        const ChannelSet ch = random_channels(rng, 3);
        const ReflectionVector v = random_v(rng, 3);
        const ReflectionVector w = ReflectionVector::from_lifted(std::polar(1.0, 1.9) * v.lifted());
        CHECK(sinr_primary(v, 0.2, ch, p) == doctest::Approx(sinr_primary(w, 0.2, ch, p)).epsilon(1e-12));
        CHECK(sinr_secondary(v, 0.2, ch, p) == doctest::Approx(sinr_secondary(w, 0.2, ch, p)).epsilon(1e-12));
    }
}

TEST_CASE("sinr_secondary without primary power")
{
    std::mt19937_64 rng(6);
    SystemParams p;
    p.p_p = 0.0;
    p.n_elements = 4;
    const ChannelSet ch = random_channels(rng, 4);
    const ReflectionVector v = random_v(rng, 4);
    const double expected = 0.5 * std::norm(composite_gain(v.coefficients(), ch.h_srs(), ch.h_ss)) / p.sigma2_s;
    CHECK(sinr_secondary(v, 0.5, ch, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("su_rate examples")
{
    CHECK(su_rate(0.0) == 0.0);
    CHECK(su_rate(1.0) == doctest::Approx(1.0));
    CHECK(su_rate(3.0) == doctest::Approx(2.0));
}

TEST_CASE("build_ab")
{
    SUBCASE("zero channels leave the noise shift")
    {
        SystemParams p;
        p.n_elements = 1;
        ChannelSet ch;
        ch.h_pr = ch.h_sr = ch.h_rp = ch.h_rs = CVector::Zero(1);
        const QuadraticForms q = build_ab(ch, 0.4, p);
        CHECK(q.a_ss.matrix().isZero());
        CHECK(q.a_pp.matrix().isZero());
        CHECK(q.b_ps.matrix().isApprox(CMatrix::Identity(2, 2) * (p.sigma2_s / 2.0)));
        CHECK(q.b_sp.matrix().isApprox(CMatrix::Identity(2, 2) * (p.sigma2_p / 2.0)));
    }
    SUBCASE("ratio reproduces the SINRs for a unit-modulus lifted vector")
    {
        std::mt19937_64 rng(7);
        SystemParams p;
        p.n_elements = 5;
        for (int k = 0; k < 20; ++k) {
            const ChannelSet ch = random_channels(rng, 5);
            const ReflectionVector v = random_v(rng, 5);
            const QuadraticForms q = build_ab(ch, 0.25, p);
            CHECK(fractional_quadratic(q.a_ss, q.b_ps, v.lifted()) ==
                  doctest::Approx(sinr_secondary(v, 0.25, ch, p)).epsilon(1e-9));
            CHECK(fractional_quadratic(q.a_pp, q.b_sp, v.lifted()) ==
                  doctest::Approx(sinr_primary(v, 0.25, ch, p)).epsilon(1e-9));
            CHECK(max_eigenvalue(q.b_sp) >= p.sigma2_p / 6.0 * (1.0 - 1e-9));
        }
    }
}

TEST_CASE("link_gains from lifted channels")
{
    std::mt19937_64 rng(8);
    const ChannelSet ch = random_channels(rng, 4);
    const ReflectionVector v = random_v(rng, 4);
    const LinkGains g = link_gains(v.lifted(), LiftedChannels::from(ch));
    CHECK(g.alpha_pp == doctest::Approx(std::norm(composite_gain(v.coefficients(), ch.h_prp(), ch.h_pp))));
    CHECK(g.alpha_ps == doctest::Approx(std::norm(composite_gain(v.coefficients(), ch.h_prs(), ch.h_ps))));
    CHECK(g.alpha_sp == doctest::Approx(std::norm(composite_gain(v.coefficients(), ch.h_srp(), ch.h_sp))));
    CHECK(g.alpha_ss == doctest::Approx(std::norm(composite_gain(v.coefficients(), ch.h_srs(), ch.h_ss))));
}
