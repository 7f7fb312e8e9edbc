#pragma once

#include <limits>

#include "irs_cr/numerics.hpp"
#include "irs_cr/rng.hpp"

namespace irs_cr {

using Vec3 = Eigen::Vector3d;

// Uniform planar array. Element (row, col) sits at
// position + col*spacing*column_axis() + row*spacing*row_axis(); element
// (0, 0) is the phase reference. Elements are indexed row-major.
struct IrsPanel {
    Vec3 position{0.0, 0.0, 2.0};
    Vec3 normal{0.0, 1.0, 0.0};
    int rows = 6;
    int cols = 10;
    double spacing = 0.15;  // meters

    Index elements() const { return static_cast<Index>(rows) * cols; }
    Vec3 column_axis() const;  // horizontal, in the panel plane
    Vec3 row_axis() const;     // completes the right-handed (column, row, normal) frame
    Vec3 element_offset(int row, int col) const;
};

struct Node {
    Vec3 position = Vec3::Zero();
    bool hotspot = false;  // IRS links of hotspot nodes use the LoS link class
};

/// Transmit/receive roles resolved for one deployment.
struct NodeGeometry {
    Node pt, pr, st, sr;
    IrsPanel irs;
    double wavelength = 0.4;  // meters

    void validate() const;
};

struct FadingSpec {
    double path_loss_exponent = 3.0;
    double rician_factor = 0.0;  // linear; +inf means pure LoS
    double reference_loss_db = -30.0;
    double reference_distance = 1.0;  // meters

    void validate() const;
};

/// Fading specs per link class.
struct LinkFading {
    FadingSpec ground{3.0, 0.0};
    FadingSpec irs_hotspot{2.0, std::numeric_limits<double>::infinity()};
    FadingSpec irs_far{3.0, 0.0};
};

/// One channel realization in the convention where the cascaded channel is
/// conj(h_rj) .* conj(h_ir): the vectors h_pr, h_sr, h_rp, h_rs hold the
/// conjugates of the physical per-element gains, the direct scalars hold the
/// physical gains.
struct ChannelSet {
    Complex h_pp{}, h_ps{}, h_sp{}, h_ss{};
    CVector h_pr, h_sr, h_rp, h_rs;

    Index elements() const { return h_pr.size(); }
    void validate() const;

    CVector h_prp() const;
    CVector h_prs() const;
    CVector h_srp() const;
    CVector h_srs() const;
};

/// sqrt(L0 * (d/d0)^-c), L0 converted from dB.
double path_loss(double distance, const FadingSpec& spec);

/// sqrt(beta/(1+beta)) * los + sqrt(1/(1+beta)) * CN(0,1), per entry.
CVector rician_sample(const CVector& los, double rician_factor, Engine& engine);

/// Complex Gaussian with unit variance (two independent N(0, 1/2) parts).
Complex standard_complex_normal(Engine& engine);

/// Planar-wavefront response of the panel toward `source`:
/// exp(j 2 pi / wavelength * <element offset, unit direction to source>).
CVector upa_los_vector(const Vec3& source, const IrsPanel& panel, double wavelength);

/// Entry n = conj(h_rj(n)) * conj(h_ir(n)).
CVector cascaded_channel(const CVector& h_ir, const CVector& h_rj);

/// Draws all direct and IRS links for one realization. Every link has its
/// own child stream of `stream`, so links are independent and reproducible.
ChannelSet generate_channels(const NodeGeometry& geometry, const LinkFading& fading, const RngStream& stream);

}  // namespace irs_cr
