#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace irs_cr {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

// Raised when an iterative routine fails to converge or produces a
// non-finite value.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when operand sizes disagree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

bool all_finite(const CVector& x);
void require_same_length(const CVector& a, const CVector& b, const char* what);

/// Dense complex square matrix equal to its own conjugate transpose.
///
/// Construction checks the Hermitian property (elementwise within 1e-12 of
/// the largest entry magnitude, floor 1) and then stores the exactly
/// symmetrized value (M + M^H)/2, so every instance is Hermitian to the last
/// bit.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(CMatrix m);

    static HermitianMatrix identity(Index n);
    static HermitianMatrix zero(Index n);
    static HermitianMatrix diagonal(const Eigen::VectorXd& d);

    Index dim() const { return m_.rows(); }
    const CMatrix& matrix() const { return m_; }
    Complex operator()(Index i, Index j) const { return m_(i, j); }

    HermitianMatrix& operator+=(const HermitianMatrix& other);
    HermitianMatrix& operator*=(double s);

    friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
    friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

private:
    CMatrix m_;
};

/// h h^H. Rank one and positive semidefinite.
HermitianMatrix outer_product(const CVector& h);

/// Re{x^H M x}. Throws NumericalError if the imaginary part is not
/// negligible (|Im| > 1e-9 * max(1, |Re|)).
double quadratic_form(const HermitianMatrix& m, const CVector& x);

struct PowerIterationOptions {
    int max_iterations = 10000;
    double tolerance = 1e-10;  // relative change of the Rayleigh quotient
};

/// Largest eigenvalue by power iteration.
///
/// When the Gershgorin discs do not certify positive semidefiniteness the
/// iteration runs on B + cI with c large enough to make every eigenvalue
/// nonnegative, so the dominant eigenvalue is always the algebraically
/// largest one. Throws NumericalError after max_iterations.
double max_eigenvalue(const HermitianMatrix& b, const PowerIterationOptions& options = {});

}  // namespace irs_cr
