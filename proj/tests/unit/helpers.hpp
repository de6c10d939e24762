#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "nhmetro/matcore.hpp"

namespace testutil {

using nhmetro::ComplexMatrix;
using nhmetro::ComplexVector;
using nhmetro::cplx;

inline constexpr double pi = std::numbers::pi;

inline double dist(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).frobenius_norm(); }
inline double dist(const ComplexVector& a, const ComplexVector& b) { return (a - b).norm(); }

inline ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t d, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) m(r, c) = cplx(g(rng), g(rng));
  return m * cplx(scale / m.frobenius_norm());
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t d, double scale) {
  const ComplexMatrix m = random_matrix(rng, d, 1.0);
  const ComplexMatrix h = (m + m.adjoint()) * cplx(0.5);
  return h * cplx(scale / h.frobenius_norm());
}

inline ComplexVector random_state(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = cplx(g(rng), g(rng));
  return v.normalized();
}

// Textbook Taylor series without scaling; only for small ||A||.
inline ComplexMatrix taylor_exp(const ComplexMatrix& a, int terms = 60) {
  ComplexMatrix term = ComplexMatrix::identity(a.dim());
  ComplexMatrix sum = term;
  for (int k = 1; k < terms; ++k) {
    term = term * a * cplx(1.0 / k);
    sum += term;
  }
  return sum;
}

}  // namespace testutil
