#include "irs_cr/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace irs_cr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Link : std::uint64_t { pp, ps, sp, ss, pr, sr, rp, rs };

Complex ground_link(const Node& tx, const Node& rx, double wavelength, const FadingSpec& spec, Engine& engine)
{
    const double d = (tx.position - rx.position).norm();
    CVector los(1);
    los[0] = std::polar(1.0, -kTwoPi * d / wavelength);
    return path_loss(d, spec) * rician_sample(los, spec.rician_factor, engine)[0];
}

// Physical per-element gains between a node and the panel (reciprocal).
CVector irs_link(const Node& node, const NodeGeometry& g, const FadingSpec& spec, Engine& engine)
{
    const double d = (node.position - g.irs.position).norm();
    const CVector los = std::polar(1.0, -kTwoPi * d / g.wavelength) * upa_los_vector(node.position, g.irs, g.wavelength);
    return path_loss(d, spec) * rician_sample(los, spec.rician_factor, engine);
}

}  // namespace

Vec3 IrsPanel::column_axis() const
{
    const Vec3 n = normal.normalized();
    Vec3 axis = n.cross(Vec3::UnitZ());
    if (axis.norm() < 1e-9)
        axis = Vec3::UnitX();
    return axis.normalized();
}

Vec3 IrsPanel::row_axis() const
{
    return column_axis().cross(normal.normalized()).normalized();
}

Vec3 IrsPanel::element_offset(int row, int col) const
{
    return spacing * (col * column_axis() + row * row_axis());
}

void NodeGeometry::validate() const
{
    if (irs.rows < 1 || irs.cols < 1)
        throw std::invalid_argument("geometry: IRS panel needs at least one row and one column");
    if (!(irs.spacing > 0.0))
        throw std::invalid_argument("geometry: IRS element spacing must be positive");
    if (!(wavelength > 0.0))
        throw std::invalid_argument("geometry: wavelength must be positive");
    if (!(irs.normal.norm() > 0.0))
        throw std::invalid_argument("geometry: IRS normal must be nonzero");
    const Vec3 points[] = {pt.position, pr.position, st.position, sr.position, irs.position};
    const char* names[] = {"PT", "PR", "ST", "SR", "IRS"};
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b)
            if (!((points[a] - points[b]).norm() > 0.0))
                throw std::invalid_argument(std::string("geometry: ") + names[a] + " and " + names[b] +
                                            " coincide");
}

void FadingSpec::validate() const
{
    if (!(path_loss_exponent >= 1.5 && path_loss_exponent <= 6.0))
        throw std::invalid_argument("fading: path loss exponent must lie in [1.5, 6]");
    if (!(rician_factor >= 0.0))
        throw std::invalid_argument("fading: Rician factor must be nonnegative");
    if (!(reference_distance > 0.0))
        throw std::invalid_argument("fading: reference distance must be positive");
    if (!std::isfinite(reference_loss_db))
        throw std::invalid_argument("fading: reference loss must be finite");
}

void ChannelSet::validate() const
{
    const Index n = h_pr.size();
    if (n < 1 || h_sr.size() != n || h_rp.size() != n || h_rs.size() != n)
        throw DimensionError("ChannelSet: IRS link vectors must share a positive length");
    for (Complex c : {h_pp, h_ps, h_sp, h_ss})
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw NumericalError("ChannelSet: non-finite direct channel");
    if (!all_finite(h_pr) || !all_finite(h_sr) || !all_finite(h_rp) || !all_finite(h_rs))
        throw NumericalError("ChannelSet: non-finite IRS channel");
}

CVector ChannelSet::h_prp() const { return cascaded_channel(h_pr, h_rp); }
CVector ChannelSet::h_prs() const { return cascaded_channel(h_pr, h_rs); }
CVector ChannelSet::h_srp() const { return cascaded_channel(h_sr, h_rp); }
CVector ChannelSet::h_srs() const { return cascaded_channel(h_sr, h_rs); }

double path_loss(double distance, const FadingSpec& spec)
{
    if (!(distance > 0.0))
        throw std::invalid_argument("path_loss: distance must be positive");
    const double l0 = std::pow(10.0, spec.reference_loss_db / 10.0);
    return std::sqrt(l0 * std::pow(distance / spec.reference_distance, -spec.path_loss_exponent));
}

Complex standard_complex_normal(Engine& engine)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double re = normal(engine);
    const double im = normal(engine);
    return {re, im};
}

CVector rician_sample(const CVector& los, double rician_factor, Engine& engine)
{
    if (!(rician_factor >= 0.0))
        throw std::invalid_argument("rician_sample: Rician factor must be nonnegative");
    if (std::isinf(rician_factor))
        return los;
    const double los_weight = std::sqrt(rician_factor / (1.0 + rician_factor));
    const double nlos_weight = std::sqrt(1.0 / (1.0 + rician_factor));
    CVector out(los.size());
    for (Index i = 0; i < los.size(); ++i)
        out[i] = los_weight * los[i] + nlos_weight * standard_complex_normal(engine);
    return out;
}

CVector upa_los_vector(const Vec3& source, const IrsPanel& panel, double wavelength)
{
    if (!(wavelength > 0.0) || !(panel.spacing > 0.0))
        throw std::invalid_argument("upa_los_vector: spacing and wavelength must be positive");
    const Vec3 delta = source - panel.position;
    if (!(delta.norm() > 0.0))
        throw std::invalid_argument("upa_los_vector: source coincides with the IRS reference");
    const Vec3 direction = delta.normalized();
    CVector a(panel.elements());
    for (int r = 0; r < panel.rows; ++r)
        for (int c = 0; c < panel.cols; ++c)
            a[r * panel.cols + c] = std::polar(1.0, kTwoPi / wavelength * panel.element_offset(r, c).dot(direction));
    return a;
}

CVector cascaded_channel(const CVector& h_ir, const CVector& h_rj)
{
    require_same_length(h_ir, h_rj, "cascaded_channel");
    return h_rj.conjugate().cwiseProduct(h_ir.conjugate());
}

ChannelSet generate_channels(const NodeGeometry& geometry, const LinkFading& fading, const RngStream& stream)
{
    geometry.validate();
    fading.ground.validate();
    fading.irs_hotspot.validate();
    fading.irs_far.validate();

    auto engine_for = [&](Link link) { return stream.child(static_cast<std::uint64_t>(link)).engine(); };
    auto irs_spec = [&](const Node& node) -> const FadingSpec& {
        return node.hotspot ? fading.irs_hotspot : fading.irs_far;
    };
    const double lambda = geometry.wavelength;

    ChannelSet ch;
    {
        Engine e = engine_for(Link::pp);
        ch.h_pp = ground_link(geometry.pt, geometry.pr, lambda, fading.ground, e);
    }
    {
        Engine e = engine_for(Link::ps);
        ch.h_ps = ground_link(geometry.pt, geometry.sr, lambda, fading.ground, e);
    }
    {
        Engine e = engine_for(Link::sp);
        ch.h_sp = ground_link(geometry.st, geometry.pr, lambda, fading.ground, e);
    }
    {
        Engine e = engine_for(Link::ss);
        ch.h_ss = ground_link(geometry.st, geometry.sr, lambda, fading.ground, e);
    }
    {
        Engine e = engine_for(Link::pr);
        ch.h_pr = irs_link(geometry.pt, geometry, irs_spec(geometry.pt), e).conjugate();
    }
    {
        Engine e = engine_for(Link::sr);
        ch.h_sr = irs_link(geometry.st, geometry, irs_spec(geometry.st), e).conjugate();
    }
    {
        Engine e = engine_for(Link::rp);
        ch.h_rp = irs_link(geometry.pr, geometry, irs_spec(geometry.pr), e).conjugate();
    }
    {
        Engine e = engine_for(Link::rs);
        ch.h_rs = irs_link(geometry.sr, geometry, irs_spec(geometry.sr), e).conjugate();
    }
    return ch;
}

}  // namespace irs_cr
