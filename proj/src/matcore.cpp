#include "nhmetro/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nhmetro/error.hpp"

namespace nhmetro {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorKind::UnsupportedProbe: return "UnsupportedProbe";
    case ErrorKind::NotProjector: return "NotProjector";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::ZeroScalar: return "ZeroScalar";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::ZeroG: return "ZeroG";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::NotBracketed: return "NotBracketed";
    case ErrorKind::AllTrialsFailed: return "AllTrialsFailed";
    case ErrorKind::NoPositiveSolution: return "NoPositiveSolution";
    case ErrorKind::ZetaNotPositive: return "ZetaNotPositive";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ComplexVector

ComplexVector ComplexVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  ComplexVector v(dim);
  v[index] = 1.0;
  return v;
}

double ComplexVector::norm_squared() const noexcept {
  double s = 0.0;
  for (const cplx& a : amps_) s += std::norm(a);
  return s;
}

double ComplexVector::norm() const noexcept { return std::sqrt(norm_squared()); }

bool ComplexVector::is_normalized(double tol) const noexcept {
  return std::abs(norm_squared() - 1.0) < tol;
}

ComplexVector ComplexVector::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::NotNormalized, "cannot normalize a zero or non-finite vector");
  }
  ComplexVector out(*this);
  out *= 1.0 / n;
  return out;
}

bool ComplexVector::all_finite() const noexcept {
  return std::all_of(amps_.begin(), amps_.end(), finite);
}

ComplexVector& ComplexVector::operator+=(const ComplexVector& other) {
  require_same_dim(dim(), other.dim(), "vector +");
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += other.amps_[i];
  return *this;
}

ComplexVector& ComplexVector::operator-=(const ComplexVector& other) {
  require_same_dim(dim(), other.dim(), "vector -");
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] -= other.amps_[i];
  return *this;
}

ComplexVector& ComplexVector::operator*=(cplx scalar) {
  for (cplx& a : amps_) a *= scalar;
  return *this;
}

ComplexVector operator+(ComplexVector a, const ComplexVector& b) { return a += b; }
ComplexVector operator-(ComplexVector a, const ComplexVector& b) { return a -= b; }
ComplexVector operator*(cplx scalar, ComplexVector v) { return v *= scalar; }
ComplexVector operator*(ComplexVector v, cplx scalar) { return v *= scalar; }

cplx inner(const ComplexVector& a, const ComplexVector& b) {
  require_same_dim(a.dim(), b.dim(), "inner");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<cplx> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != dim_ * dim_) {
    throw Error(ErrorKind::InvalidArgument, "entry count must equal dim^2");
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : dim_(rows.size()) {
  entries_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw Error(ErrorKind::InvalidArgument, "matrix must be square");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

cplx ComplexMatrix::trace() const noexcept {
  cplx s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += (*this)(i, i);
  return s;
}

double ComplexMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (const cplx& a : entries_) s += std::norm(a);
  return std::sqrt(s);
}

double ComplexMatrix::one_norm() const noexcept {
  double best = 0.0;
  for (std::size_t c = 0; c < dim_; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) s += std::abs((*this)(r, c));
    best = std::max(best, s);
  }
  return best;
}

bool ComplexMatrix::all_finite() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), finite);
}

bool ComplexMatrix::is_hermitian(double tol) const noexcept {
  double diff = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      diff += std::norm((*this)(r, c) - std::conj((*this)(c, r)));
  return std::sqrt(diff) <= tol * std::max(1.0, frobenius_norm());
}

ComplexVector ComplexMatrix::column(std::size_t c) const {
  ComplexVector v(dim_);
  for (std::size_t r = 0; r < dim_; ++r) v[r] = (*this)(r, c);
  return v;
}

void ComplexMatrix::set_column(std::size_t c, const ComplexVector& v) {
  require_same_dim(dim_, v.dim(), "set_column");
  for (std::size_t r = 0; r < dim_; ++r) (*this)(r, c) = v[r];
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(dim_, other.dim_, "matrix +");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(dim_, other.dim_, "matrix -");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scalar) {
  for (cplx& a : entries_) a *= scalar;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx scalar, ComplexMatrix a) { return a *= scalar; }
ComplexMatrix operator*(ComplexMatrix a, cplx scalar) { return a *= scalar; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "matrix *");
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a(i, k);
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& v) {
  require_same_dim(a.dim(), v.dim(), "matrix-vector *");
  ComplexVector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b) {
  require_same_dim(a.dim(), b.dim(), "outer");
  ComplexMatrix m(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix m(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) m(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
  return m;
}

cplx expectation(const ComplexMatrix& a, const ComplexVector& v) { return inner(v, a * v); }

namespace pauli {
ComplexMatrix x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix y() { return {{0.0, -kI}, {kI, 0.0}}; }
ComplexMatrix z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

// ---------------------------------------------------------------------------
// Exponential

ComplexMatrix mat_exp(const ComplexMatrix& a) {
  if (!a.all_finite()) throw Error(ErrorKind::NonFinite, "mat_exp: input has non-finite entries");
  const std::size_t n = a.dim();

  const double norm = a.frobenius_norm();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const ComplexMatrix scaled = a * cplx(std::ldexp(1.0, -squarings));

  // Horner form of sum_{k<=13} X^k / k!
  constexpr int kOrder = 13;
  ComplexMatrix result = ComplexMatrix::identity(n);
  for (int k = kOrder; k >= 1; --k) {
    result = scaled * result * cplx(1.0 / k);
    for (std::size_t i = 0; i < n; ++i) result(i, i) += 1.0;
  }
  if (!result.all_finite()) {
    throw Error(ErrorKind::NonFinite, "mat_exp: overflow in the series stage");
  }
  for (int s = 0; s < squarings; ++s) {
    result = result * result;
    if (!result.all_finite()) {
      std::ostringstream os;
      os << "mat_exp: overflow at squaring stage " << s + 1 << " of " << squarings;
      throw Error(ErrorKind::NonFinite, os.str());
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// LU

namespace {

struct LU {
  ComplexMatrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool zero_pivot = false;
};

LU lu_decompose(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  LU f{a, std::vector<std::size_t>(n), 1, false};
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(f.lu(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(f.lu(r, k)) > best) {
        best = std::abs(f.lu(r, k));
        piv = r;
      }
    }
    if (best == 0.0) {
      f.zero_pivot = true;
      continue;
    }
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(f.lu(k, c), f.lu(piv, c));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const cplx m = f.lu(r, k) / f.lu(k, k);
      f.lu(r, k) = m;
      for (std::size_t c = k + 1; c < n; ++c) f.lu(r, c) -= m * f.lu(k, c);
    }
  }
  return f;
}

cplx lu_det(const LU& f) {
  if (f.zero_pivot) return 0.0;
  cplx d = static_cast<double>(f.sign);
  for (std::size_t i = 0; i < f.lu.dim(); ++i) d *= f.lu(i, i);
  return d;
}

}  // namespace

cplx determinant(const ComplexMatrix& a) { return lu_det(lu_decompose(a)); }

ComplexMatrix mat_inverse(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  const LU f = lu_decompose(a);
  const double det = std::abs(lu_det(f));
  const double scale = std::pow(a.frobenius_norm(), static_cast<double>(n));
  if (!(det > 1e-14 * scale)) {
    std::ostringstream os;
    os << "mat_inverse: |det| = " << det << " below 1e-14*||A||^n = " << 1e-14 * scale;
    throw Error(ErrorKind::Singular, os.str());
  }
  ComplexMatrix inv(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (f.perm[i] == col) ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < i; ++k) x[i] -= f.lu(i, k) * x[k];
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t k = ii + 1; k < n; ++k) x[ii] -= f.lu(ii, k) * x[k];
      x[ii] /= f.lu(ii, ii);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  return inv;
}

}  // namespace nhmetro
