#pragma once

// Reference linear algebra written independently of the simulator: literal
// matrices, explicit Kronecker products and projector-based Born rules.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

using C = std::complex<double>;
using Vec4 = std::array<C, 4>;
using Mat2 = std::array<std::array<C, 2>, 2>;
using Mat4 = std::array<std::array<C, 4>, 4>;

inline const double kH = 1.0 / std::numbers::sqrt2;
inline const C kI{0.0, 1.0};

// Order: Phi+, Phi-, Psi+, Psi-; basis |00>,|01>,|10>,|11>.
inline Vec4 bell(int label) {
  switch (label) {
    case 0: return {kH, 0, 0, kH};
    case 1: return {kH, 0, 0, -kH};
    case 2: return {0, kH, kH, 0};
    default: return {0, kH, -kH, 0};
  }
}

inline const Mat2 kId{{{1, 0}, {0, 1}}};
inline const Mat2 kX{{{0, 1}, {1, 0}}};
inline const Mat2 kISigmaY{{{0, 1}, {-1, 0}}};
inline const Mat2 kZ{{{1, 0}, {0, -1}}};
inline const Mat2 kHad{{{kH, kH}, {kH, -kH}}};

inline Mat2 mul(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) r[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
  return r;
}

inline Vec4 apply(const Mat4& m, const Vec4& v) {
  Vec4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i] += m[i][j] * v[j];
  return r;
}

inline C inner(const Vec4& a, const Vec4& b) {
  C s = 0;
  for (int i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double fidelity(const Vec4& a, const Vec4& b) { return std::norm(inner(a, b)); }

// Projector onto (|0> + s e^{i theta}|1>)/sqrt2.
inline Mat2 projector(double theta, int s) {
  const C e = std::polar(1.0, theta) * static_cast<double>(s);
  return {{{0.5, 0.5 * std::conj(e)}, {0.5 * e, 0.5}}};
}

inline double born(const Vec4& v, const Mat4& p) { return std::real(inner(v, apply(p, v))); }

// E = sum over outcomes of s_a s_b Pr(s_a, s_b).
inline double correlator(const Vec4& v, double ta, double tb) {
  double e = 0;
  for (int sa : {1, -1})
    for (int sb : {1, -1}) e += sa * sb * born(v, kron(projector(ta, sa), projector(tb, sb)));
  return e;
}

}  // namespace oracle
