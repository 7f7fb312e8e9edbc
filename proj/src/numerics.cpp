#include "irs_cr/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace irs_cr {

bool all_finite(const CVector& x)
{
    for (Index i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i].real()) || !std::isfinite(x[i].imag()))
            return false;
    return true;
}

void require_same_length(const CVector& a, const CVector& b, const char* what)
{
    if (a.size() != b.size())
        throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + ")");
}

HermitianMatrix::HermitianMatrix(CMatrix m)
{
    if (m.rows() != m.cols())
        throw DimensionError("HermitianMatrix: matrix is not square");
    if (!m.allFinite())
        throw NumericalError("HermitianMatrix: non-finite entry");
    if (m.size() == 0) {
        m_ = std::move(m);
        return;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw NumericalError("HermitianMatrix: input is not Hermitian (asymmetry " + std::to_string(asym) + ")");
    m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::identity(Index n)
{
    return HermitianMatrix(CMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::zero(Index n)
{
    return HermitianMatrix(CMatrix::Zero(n, n));
}

HermitianMatrix HermitianMatrix::diagonal(const Eigen::VectorXd& d)
{
    return HermitianMatrix(CMatrix(d.cast<Complex>().asDiagonal()));
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other)
{
    if (other.dim() != dim())
        throw DimensionError("HermitianMatrix: dimension mismatch in sum");
    m_ += other.m_;
    return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s)
{
    m_ *= s;
    return *this;
}

HermitianMatrix outer_product(const CVector& h)
{
    if (!all_finite(h))
        throw NumericalError("outer_product: non-finite entry");
    return HermitianMatrix(h * h.adjoint());
}

double quadratic_form(const HermitianMatrix& m, const CVector& x)
{
    if (m.dim() != x.size())
        throw DimensionError("quadratic_form: matrix is " + std::to_string(m.dim()) + "x" +
                             std::to_string(m.dim()) + ", vector has length " + std::to_string(x.size()));
    const Complex value = x.dot(m.matrix() * x);  // dot() conjugates its left operand
    if (std::abs(value.imag()) > 1e-9 * std::max(1.0, std::abs(value.real())))
        throw NumericalError("quadratic_form: imaginary part " + std::to_string(value.imag()) + " is not negligible");
    return value.real();
}

namespace {

// Fixed, generic start vector: unit-modulus entries with quadratic phase so
// that it is never orthogonal to a structured eigenvector in practice.
CVector start_vector(Index n)
{
    CVector x(n);
    for (Index i = 0; i < n; ++i) {
        const double k = static_cast<double>(i);
        x[i] = std::polar(1.0 + 0.01 * k, 0.7 * k + 0.3 * k * k + 0.1);
    }
    return x.normalized();
}

}  // namespace

double max_eigenvalue(const HermitianMatrix& b, const PowerIterationOptions& options)
{
    const Index n = b.dim();
    if (n == 0)
        throw DimensionError("max_eigenvalue: empty matrix");
    const CMatrix& m = b.matrix();
    if (n == 1)
        return m(0, 0).real();

    // Gershgorin lower bound on the spectrum.
    double lower = m(0, 0).real();
    double upper = m(0, 0).real();
    for (Index i = 0; i < n; ++i) {
        const double radius = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
        lower = std::min(lower, m(i, i).real() - radius);
        upper = std::max(upper, m(i, i).real() + radius);
    }
    if (upper == 0.0 && lower == 0.0)
        return 0.0;
    const double shift = lower < 0.0 ? -lower : 0.0;

    CVector x = start_vector(n);
    double previous = 0.0;
    for (int it = 0; it < options.max_iterations; ++it) {
        CVector y = m * x;
        const double rayleigh = x.dot(y).real();  // unshifted, ||x|| = 1
        y += shift * x;
        const double norm = y.norm();
        if (!std::isfinite(norm))
            throw NumericalError("max_eigenvalue: non-finite iterate");
        if (norm == 0.0)
            return rayleigh;
        const double scale = std::max(std::abs(rayleigh + shift), 1e-300);
        if (it > 0 && std::abs(rayleigh - previous) <= options.tolerance * scale)
            return rayleigh;
        previous = rayleigh;
        x = y / norm;
    }
    throw NumericalError("max_eigenvalue: no convergence after " + std::to_string(options.max_iterations) +
                         " iterations");
}

}  // namespace irs_cr
