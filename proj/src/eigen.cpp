#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "nhmetro/error.hpp"
#include "nhmetro/matcore.hpp"

namespace nhmetro {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool eig_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Reorders eigenpairs ascending by (real, imag).
void sort_pairs(std::vector<cplx>& vals, ComplexMatrix& vecs) {
  const std::size_t n = vals.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return eig_less(vals[i], vals[j]); });
  std::vector<cplx> v2(n);
  ComplexMatrix m2(n);
  for (std::size_t k = 0; k < n; ++k) {
    v2[k] = vals[order[k]];
    m2.set_column(k, vecs.column(order[k]));
  }
  vals = std::move(v2);
  vecs = std::move(m2);
}

void normalize_columns(ComplexMatrix& v) {
  for (std::size_t c = 0; c < v.dim(); ++c) {
    ComplexVector col = v.column(c);
    const double nrm = col.norm();
    if (nrm > 0.0) {
      col *= 1.0 / nrm;
      v.set_column(c, col);
    }
  }
}

void eig_2x2(const ComplexMatrix& a, std::vector<cplx>& vals, ComplexMatrix& vecs) {
  const cplx p = a(0, 0), b = a(0, 1), c = a(1, 0), d = a(1, 1);
  const double scale = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());
  vecs = ComplexMatrix(2);
  if (std::abs(b) + std::abs(c) <= 4.0 * kEps * scale) {
    vals = {p, d};
    vecs = ComplexMatrix::identity(2);
    return;
  }
  const cplx half_tr = 0.5 * (p + d);
  const cplx disc = std::sqrt(0.25 * (p - d) * (p - d) + b * c);
  vals = {half_tr - disc, half_tr + disc};
  for (std::size_t k = 0; k < 2; ++k) {
    const cplx lam = vals[k];
    // (A - lam) v = 0; pick the better-conditioned row
    if (std::abs(b) >= std::abs(c)) {
      vecs(0, k) = b;
      vecs(1, k) = lam - p;
    } else {
      vecs(0, k) = lam - d;
      vecs(1, k) = c;
    }
  }
  normalize_columns(vecs);
}

// Householder reduction to upper Hessenberg form; q accumulates the
// similarity transform so that a = q h q^dagger.
void hessenberg(ComplexMatrix& h, ComplexMatrix& q) {
  const std::size_t n = h.dim();
  q = ComplexMatrix::identity(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha2 += std::norm(h(i, k));
    const double alpha = std::sqrt(alpha2);
    if (alpha == 0.0) continue;
    const cplx x0 = h(k + 1, k);
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0);
    std::vector<cplx> v(n, 0.0);
    v[k + 1] = x0 + phase * alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = h(i, k);
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    // P = I - 2 v v^dagger / |v|^2 ; h <- P h P, q <- q P
    for (std::size_t c = 0; c < n; ++c) {
      cplx s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, c);
      s *= 2.0 / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) h(i, c) -= v[i] * s;
    }
    for (std::size_t r = 0; r < n; ++r) {
      cplx s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += h(r, i) * v[i];
      s *= 2.0 / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) h(r, i) -= s * std::conj(v[i]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      cplx s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += q(r, i) * v[i];
      s *= 2.0 / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) q(r, i) -= s * std::conj(v[i]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

struct Givens {
  double c;
  cplx s;
};

// Rotation G with G^dagger-style action [c s; -conj(s) c] mapping (x, y) to (r, 0).
Givens make_givens(cplx x, cplx y) {
  const double ax = std::abs(x), ay = std::abs(y);
  if (ay == 0.0) return {1.0, 0.0};
  if (ax == 0.0) return {0.0, std::conj(y) / ay};
  const double r = std::hypot(ax, ay);
  const cplx phase = x / ax;
  return {ax / r, phase * std::conj(y) / r};
}

// Complex Schur form by Wilkinson-shifted QR on the Hessenberg matrix.
void schur(ComplexMatrix& t, ComplexMatrix& q) {
  const std::size_t n = t.dim();
  const double anorm = std::max(t.frobenius_norm(), std::numeric_limits<double>::min());
  std::size_t hi = n - 1;
  int iter = 0;
  while (hi > 0) {
    std::size_t lo = hi;
    while (lo > 0) {
      const double sub = std::abs(t(lo, lo - 1));
      const double diag = std::abs(t(lo, lo)) + std::abs(t(lo - 1, lo - 1));
      if (sub <= kEps * (diag > 0.0 ? diag : anorm)) {
        t(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      iter = 0;
      continue;
    }
    ++iter;
    if (iter > 300) break;  // leaves a bump; eigenvectors will flag as ill-conditioned

    cplx mu;
    if (iter % 11 == 0) {
      mu = t(hi, hi) + std::abs(t(hi, hi - 1));  // exceptional shift
    } else {
      const cplx a = t(hi - 1, hi - 1), b = t(hi - 1, hi), c = t(hi, hi - 1), d = t(hi, hi);
      const cplx half = 0.5 * (a - d);
      cplx disc = std::sqrt(half * half + b * c);
      if (std::real(std::conj(half) * disc) < 0.0) disc = -disc;
      const cplx denom = half + disc;
      mu = std::abs(denom) > 0.0 ? d - b * c / denom : d;
    }

    std::vector<Givens> rots;
    rots.reserve(hi - lo);
    for (std::size_t k = lo; k <= hi; ++k) t(k, k) -= mu;
    for (std::size_t k = lo; k < hi; ++k) {
      const Givens g = make_givens(t(k, k), t(k + 1, k));
      rots.push_back(g);
      for (std::size_t c = k; c < n; ++c) {
        const cplx x = t(k, c), y = t(k + 1, c);
        t(k, c) = g.c * x + g.s * y;
        t(k + 1, c) = -std::conj(g.s) * x + g.c * y;
      }
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const Givens& g = rots[k - lo];
      const std::size_t rmax = std::min(k + 2, hi);
      for (std::size_t r = 0; r <= rmax; ++r) {
        const cplx x = t(r, k), y = t(r, k + 1);
        t(r, k) = g.c * x + std::conj(g.s) * y;
        t(r, k + 1) = -g.s * x + g.c * y;
      }
      for (std::size_t r = 0; r < n; ++r) {
        const cplx x = q(r, k), y = q(r, k + 1);
        q(r, k) = g.c * x + std::conj(g.s) * y;
        q(r, k + 1) = -g.s * x + g.c * y;
      }
    }
    for (std::size_t k = lo; k <= hi; ++k) t(k, k) += mu;
  }
}

void eig_general(const ComplexMatrix& a, std::vector<cplx>& vals, ComplexMatrix& vecs) {
  const std::size_t n = a.dim();
  ComplexMatrix t = a;
  ComplexMatrix q;
  hessenberg(t, q);
  schur(t, q);

  vals.resize(n);
  for (std::size_t k = 0; k < n; ++k) vals[k] = t(k, k);

  const double small = kEps * std::max(t.frobenius_norm(), std::numeric_limits<double>::min());
  ComplexMatrix y(n);
  for (std::size_t k = 0; k < n; ++k) {
    y(k, k) = 1.0;
    for (std::size_t i = k; i-- > 0;) {
      cplx s = 0.0;
      for (std::size_t j = i + 1; j <= k; ++j) s += t(i, j) * y(j, k);
      cplx denom = t(i, i) - vals[k];
      if (std::abs(denom) < small) denom = small;
      y(i, k) = -s / denom;
    }
  }
  vecs = q * y;
  normalize_columns(vecs);
}

}  // namespace

EigenDecomposition eig_decompose(const ComplexMatrix& a, double defective_threshold) {
  if (!a.all_finite()) throw Error(ErrorKind::NonFinite, "eig_decompose: non-finite input");
  EigenDecomposition out;
  if (a.dim() == 0) return out;
  if (a.dim() == 1) {
    out.eigenvalues = {a(0, 0)};
    out.right_eigenvectors = ComplexMatrix::identity(1);
    out.condition_number = 1.0;
    return out;
  }
  if (a.dim() == 2) {
    eig_2x2(a, out.eigenvalues, out.right_eigenvectors);
  } else {
    eig_general(a, out.eigenvalues, out.right_eigenvectors);
  }
  sort_pairs(out.eigenvalues, out.right_eigenvectors);

  try {
    const ComplexMatrix vinv = mat_inverse(out.right_eigenvectors);
    out.condition_number = out.right_eigenvectors.frobenius_norm() * vinv.frobenius_norm();
  } catch (const Error&) {
    out.condition_number = std::numeric_limits<double>::infinity();
  }
  out.defective = !(out.condition_number <= defective_threshold);
  return out;
}

std::vector<cplx> eigenvalues(const ComplexMatrix& a) { return eig_decompose(a).eigenvalues; }

HermitianEigen hermitian_eig(const ComplexMatrix& a) {
  if (!a.all_finite()) throw Error(ErrorKind::NonFinite, "hermitian_eig: non-finite input");
  if (!a.is_hermitian(kHermitianTol)) {
    throw Error(ErrorKind::NotHermitian, "hermitian_eig: input is not Hermitian within 1e-10");
  }
  const std::size_t n = a.dim();
  ComplexMatrix m = a;
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double total = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(m(p, q));
    if (std::sqrt(off) <= 1e-16 * total) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx b = m(p, q);
        const double ab = std::abs(b);
        if (ab <= 1e-300) continue;
        const cplx ph = b / ab;  // e^{i phi}
        const double app = m(p, p).real(), aqq = m(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * ab, app - aqq);
        const double c = std::cos(theta), s = std::sin(theta);
        const cplx phc = std::conj(ph);
        // m <- m J with J = diag(1, e^{-i phi}) [[c, -s], [s, c]]
        for (std::size_t r = 0; r < n; ++r) {
          const cplx xp = m(r, p), xq = m(r, q);
          m(r, p) = xp * c + xq * phc * s;
          m(r, q) = -xp * s + xq * phc * c;
        }
        // m <- J^dagger m
        for (std::size_t col = 0; col < n; ++col) {
          const cplx xp = m(p, col), xq = m(q, col);
          m(p, col) = c * xp + s * ph * xq;
          m(q, col) = -s * xp + c * ph * xq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const cplx xp = v(r, p), xq = v(r, q);
          v(r, p) = xp * c + xq * phc * s;
          v(r, q) = -xp * s + xq * phc * c;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return m(i, i).real() < m(j, j).real(); });
  HermitianEigen out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = m(order[k], order[k]).real();
    out.eigenvectors.set_column(k, v.column(order[k]));
  }
  return out;
}

ComplexMatrix herm_funct(const ComplexMatrix& a, SpectralFunction f) {
  const HermitianEigen e = hermitian_eig(a);
  for (double lam : e.eigenvalues) {
    if (!(lam > kPositivityThreshold)) {
      std::ostringstream os;
      os << "herm_funct: eigenvalue " << lam << " is not above " << kPositivityThreshold;
      throw Error(ErrorKind::NotPositive, os.str());
    }
  }
  switch (f) {
    case SpectralFunction::Sqrt: return herm_apply(a, [](double x) { return std::sqrt(x); });
    case SpectralFunction::InvSqrt:
      return herm_apply(a, [](double x) { return 1.0 / std::sqrt(x); });
    case SpectralFunction::Inverse: return herm_apply(a, [](double x) { return 1.0 / x; });
  }
  throw Error(ErrorKind::InvalidArgument, "herm_funct: unknown spectral function");
}

}  // namespace nhmetro
