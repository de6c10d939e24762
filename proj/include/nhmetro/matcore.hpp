#pragma once

// Small dense complex linear algebra for d <= 8.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nhmetro {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

class ComplexVector {
 public:
  ComplexVector() = default;
  explicit ComplexVector(std::size_t dim) : amps_(dim) {}
  explicit ComplexVector(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {}
  ComplexVector(std::initializer_list<cplx> amplitudes) : amps_(amplitudes) {}

  static ComplexVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return amps_.size(); }
  cplx& operator[](std::size_t i) { return amps_[i]; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }

  double norm_squared() const noexcept;
  double norm() const noexcept;
  bool is_normalized(double tol = 1e-12) const noexcept;
  ComplexVector normalized() const;
  bool all_finite() const noexcept;

  ComplexVector& operator+=(const ComplexVector& other);
  ComplexVector& operator-=(const ComplexVector& other);
  ComplexVector& operator*=(cplx scalar);

  friend bool operator==(const ComplexVector&, const ComplexVector&) = default;

 private:
  std::vector<cplx> amps_;
};

ComplexVector operator+(ComplexVector a, const ComplexVector& b);
ComplexVector operator-(ComplexVector a, const ComplexVector& b);
ComplexVector operator*(cplx scalar, ComplexVector v);
ComplexVector operator*(ComplexVector v, cplx scalar);

/// <a|b>, conjugate-linear in the first argument.
cplx inner(const ComplexVector& a, const ComplexVector& b);

/// Dense square matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}
  ComplexMatrix(std::size_t dim, std::vector<cplx> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }
  static ComplexMatrix diagonal(std::span<const cplx> values);

  std::size_t dim() const noexcept { return dim_; }
  cplx& operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }
  std::span<const cplx> entries() const noexcept { return entries_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  cplx trace() const noexcept;
  double frobenius_norm() const noexcept;
  /// Largest absolute column sum.
  double one_norm() const noexcept;
  bool all_finite() const noexcept;
  bool is_hermitian(double tol) const noexcept;

  ComplexVector column(std::size_t c) const;
  void set_column(std::size_t c, const ComplexVector& v);

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx scalar);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx scalar, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, cplx scalar);
ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& v);

/// |a><b|
ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b);
/// Kronecker product; `a` is the leading (slow) tensor factor.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
/// <v|A|v>
cplx expectation(const ComplexMatrix& a, const ComplexVector& v);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

// ---------------------------------------------------------------------------
// Matrix functions

/// e^A by scaling and squaring: A is scaled by 2^-k until its Frobenius norm
/// is at most 0.5, exponentiated with a 13th-order Taylor polynomial, then
/// squared back k times. Throws Error{NonFinite} on non-finite input or
/// overflow.
ComplexMatrix mat_exp(const ComplexMatrix& a);

/// Inverse by LU with partial pivoting. Throws Error{Singular} when
/// |det A| <= 1e-14 * ||A||_F^dim.
ComplexMatrix mat_inverse(const ComplexMatrix& a);

cplx determinant(const ComplexMatrix& a);

struct EigenDecomposition {
  std::vector<cplx> eigenvalues;   // ascending by (real, imag)
  ComplexMatrix right_eigenvectors;  // unit-norm columns, matching eigenvalues
  double condition_number = 0.0;     // ||V||_F ||V^-1||_F; +inf when V is singular
  bool defective = false;
};

inline constexpr double kDefectiveThreshold = 1e8;

/// General (non-Hermitian) eigendecomposition. 2x2 uses the closed-form
/// quadratic; larger matrices go through Hessenberg reduction and shifted QR.
EigenDecomposition eig_decompose(const ComplexMatrix& a,
                                 double defective_threshold = kDefectiveThreshold);

/// Eigenvalues only, same ordering as eig_decompose.
std::vector<cplx> eigenvalues(const ComplexMatrix& a);

struct HermitianEigen {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // unitary, columns match eigenvalues
};

/// Cyclic Jacobi for Hermitian input. Throws Error{NotHermitian}.
HermitianEigen hermitian_eig(const ComplexMatrix& a);

enum class SpectralFunction { Sqrt, InvSqrt, Inverse };

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPositivityThreshold = 1e-12;

/// f(A) through the eigenbasis of a Hermitian positive-definite A.
/// Throws Error{NotHermitian} or Error{NotPositive}.
ComplexMatrix herm_funct(const ComplexMatrix& a, SpectralFunction f);

/// Same as herm_funct for an arbitrary real function of the spectrum; the
/// positivity requirement is the caller's business.
template <typename F>
ComplexMatrix herm_apply(const ComplexMatrix& a, F&& f) {
  const HermitianEigen e = hermitian_eig(a);
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(e.eigenvalues[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vik = e.eigenvectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(e.eigenvectors(j, k));
    }
  }
  // exact Hermitian symmetry
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = out(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (out(i, j) + std::conj(out(j, i)));
      out(i, j) = avg;
      out(j, i) = std::conj(avg);
    }
  }
  return out;
}

}  // namespace nhmetro
