#pragma once

// Half positive/negative semi-definiteness of square matrices: x^T M x >= 0
// (<= 0) for every non-negative x.  Only the symmetric part of M matters, and
// by homogeneity the cone can be reduced to the standard simplex.
//
// The classifier runs cheap sufficient tests first (diagonal screen,
// non-negative form, PSD, PSD + non-negative decomposition) and falls back to
// an exact minimization of the form over the simplex for n <= 12.  Beyond
// that a seeded sampling falsifier can refute but never confirm.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qpn/error.hpp"

namespace qpn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kExactDimensionCap = 12;
inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct ClassifyOptions {
  double eps = 1e-9;
  std::size_t samples = 100000;
  std::uint64_t seed = kDefaultSeed;
};

// eps scaled by the matrix magnitude.
inline double scaled_tolerance(const Matrix& m, double eps) {
  const double mag = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
  return eps * std::max(1.0, mag);
}

inline Matrix symmetric_part(const Matrix& m) { return (m + m.transpose()) / 2.0; }

inline double quadratic_form(const Matrix& m, const Vector& v) { return v.dot(m * v); }

// All diagonal entries non-negative and every symmetric pair M_ij + M_ji
// non-negative, i.e. the symmetric form is a non-negative matrix.
inline bool nonnegative_form_check(const Matrix& m, double eps = 1e-9) {
  const double tol = scaled_tolerance(m, eps);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m(i, i) < -tol) return false;
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) + m(j, i) < -tol) return false;
  }
  return true;
}

inline bool psd_check(const Matrix& m, double eps = 1e-9) {
  if (!m.allFinite()) throw PreconditionError("psd_check: non-finite matrix entries");
  if (m.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -scaled_tolerance(m, eps);
}

// M = psd + nonneg with psd passing psd_check and nonneg entrywise >= 0.
struct Decomposition {
  Matrix psd;
  Matrix nonneg;
};

// Heuristic search for a PSD + non-negative split.  A nullopt result does not
// prove the matrix fails to be half positive semi-definite except for n <= 2.
inline std::optional<Decomposition> decompose_psd_plus_nonneg(const Matrix& m, double eps = 1e-9) {
  const Eigen::Index n = m.rows();
  const Matrix sym = symmetric_part(m);
  const double tol = scaled_tolerance(m, eps);
  if (psd_check(m, eps)) return Decomposition{m, Matrix::Zero(n, n)};
  if (sym.minCoeff() >= -tol) {
    // The antisymmetric remainder has a zero form and passes psd_check.
    return Decomposition{m - sym.cwiseMax(0.0), sym.cwiseMax(0.0)};
  }
  // Move the positive off-diagonal mass into the non-negative part.
  Matrix nonneg = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) nonneg(i, j) = std::max(sym(i, j), 0.0);
  Matrix psd = m - nonneg;
  if (psd_check(psd, eps)) return Decomposition{std::move(psd), std::move(nonneg)};
  return std::nullopt;
}

struct SimplexMinimum {
  double value = 0.0;
  Vector minimizer;  // on the standard simplex
};

// Exact global minimum of x^T S x over {x >= 0, sum x = 1} by enumerating all
// supports J and solving the stationarity system 2 S_JJ y = mu 1, sum y = 1.
// A minimizer of smallest support always has a nonsingular system there
// (otherwise a null direction keeps the value constant and reaches a smaller
// face), so singular supports can be dropped without losing the optimum.
inline SimplexMinimum simplex_min_exact(const Matrix& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  if (m.rows() != m.cols()) throw PreconditionError("simplex_min_exact: matrix must be square");
  if (n == 0) throw PreconditionError("simplex_min_exact: empty matrix");
  if (n > kExactDimensionCap)
    throw LimitError("simplex_min_exact: dimension " + std::to_string(n) + " exceeds cap of 12");
  const Matrix s = symmetric_part(m);
  const double feas_tol = 1e-12 * std::max(1.0, s.cwiseAbs().maxCoeff());

  SimplexMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> idx;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    idx.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(static_cast<Eigen::Index>(i));
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix kkt = Matrix::Zero(k + 1, k + 1);
    Vector rhs = Vector::Zero(k + 1);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) kkt(r, c) = 2.0 * s(idx[r], idx[c]);
      kkt(r, k) = -1.0;
      kkt(k, r) = 1.0;
    }
    rhs(k) = 1.0;

    Vector sol;
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (lu.isInvertible()) {
      sol = lu.solve(rhs);
    } else {
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kkt);
      sol = cod.solve(rhs);
      if ((kkt * sol - rhs).norm() >= 1e-9) continue;
    }
    Vector y = sol.head(k);
    if (!y.allFinite() || y.minCoeff() < -1e-9) continue;
    y = y.cwiseMax(0.0);
    const double total = y.sum();
    if (!(total > 0.0)) continue;
    y /= total;

    Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < k; ++r) x(idx[r]) = y(r);
    const double value = quadratic_form(s, x);
    if (value < best.value - feas_tol || best.minimizer.size() == 0) {
      best.value = value;
      best.minimizer = std::move(x);
    }
  }
  return best;
}

namespace detail {

// Euclidean projection onto the standard simplex.
inline Vector project_to_simplex(const Vector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

// Projected gradient descent of x^T S x on the simplex.
inline Vector polish_on_simplex(const Matrix& s, Vector x, int iterations = 300) {
  const double lipschitz = 2.0 * std::max(1e-12, s.cwiseAbs().rowwise().sum().maxCoeff());
  const double step = 1.0 / lipschitz;
  for (int it = 0; it < iterations; ++it) x = project_to_simplex(x - step * 2.0 * (s * x));
  return x;
}

}  // namespace detail

struct SampledExtremes {
  double min_value = 0.0, max_value = 0.0;
  Vector argmin, argmax;  // on the simplex
};

// Seeded falsifier: evaluates the form on a mixture of uniform-on-simplex and
// sparse random vectors, then polishes the best candidates by projected
// gradient.  Reports the extreme values found.
inline SampledExtremes sample_extremes(const Matrix& m, std::size_t samples = 100000,
                                       std::uint64_t seed = kDefaultSeed) {
  const Eigen::Index n = m.rows();
  const Matrix s = symmetric_part(m);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_int_distribution<Eigen::Index> support_size(1, n);
  std::bernoulli_distribution sparse(0.5);

  SampledExtremes out;
  out.min_value = std::numeric_limits<double>::infinity();
  out.max_value = -std::numeric_limits<double>::infinity();
  Vector v(n);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  auto consider = [&](const Vector& x) {
    const double q = quadratic_form(s, x);
    if (q < out.min_value) out.min_value = q, out.argmin = x;
    if (q > out.max_value) out.max_value = q, out.argmax = x;
  };
  for (Eigen::Index i = 0; i < n; ++i) consider(Vector::Unit(n, i));
  for (std::size_t t = 0; t < samples; ++t) {
    v.setZero();
    if (sparse(rng)) {
      const Eigen::Index k = support_size(rng);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (Eigen::Index i = 0; i < k; ++i) v(perm[static_cast<std::size_t>(i)]) = expo(rng);
    } else {
      for (Eigen::Index i = 0; i < n; ++i) v(i) = expo(rng);
    }
    v /= v.sum();
    consider(v);
  }
  consider(detail::polish_on_simplex(s, out.argmin));
  consider(detail::polish_on_simplex(-s, out.argmax));
  return out;
}

enum class Definiteness { HalfPosSemiDef, HalfNegSemiDef, ZeroMatrix, Neither, Undetermined };

enum class Method {
  ZeroScreen,
  DiagonalScreen,
  NonnegativeForm,
  PositiveSemiDefinite,
  Decomposition,
  ExactSimplex,
  Sampling,
};

constexpr std::string_view name(Definiteness d) {
  switch (d) {
    case Definiteness::HalfPosSemiDef: return "HalfPosSemiDef";
    case Definiteness::HalfNegSemiDef: return "HalfNegSemiDef";
    case Definiteness::ZeroMatrix: return "ZeroMatrix";
    case Definiteness::Neither: return "Neither";
    case Definiteness::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

constexpr std::string_view name(Method m) {
  switch (m) {
    case Method::ZeroScreen: return "zero-screen";
    case Method::DiagonalScreen: return "diagonal-screen";
    case Method::NonnegativeForm: return "nonnegative-form";
    case Method::PositiveSemiDefinite: return "psd";
    case Method::Decomposition: return "decomposition";
    case Method::ExactSimplex: return "exact-simplex";
    case Method::Sampling: return "sampling";
  }
  return "";
}

// Outcome of testing one side (is A half positive semi-definite?).
struct SideResult {
  enum class Verdict { Yes, No, Unknown };
  Verdict verdict = Verdict::Unknown;
  Method method = Method::Sampling;
  std::optional<Decomposition> decomposition;  // Yes via a sufficient test
  std::optional<SimplexMinimum> simplex;       // exact minimum, when computed
  std::optional<Vector> counterexample;        // No: v >= 0 on the simplex, v^T A v < 0
  double counterexample_value = 0.0;
};

struct HalfDefiniteness {
  Definiteness cls = Definiteness::Undetermined;
  Method method = Method::Sampling;
  bool zero_entries = false;
  bool zero_symmetric_part = false;  // ZeroMatrix reached through sym(M) = 0 only
  SideResult positive;               // tests M
  SideResult negative;               // tests -M

  // v with v^T M v < 0 (refutes HalfPosSemiDef), on the simplex.
  const std::optional<Vector>& negative_witness() const { return positive.counterexample; }
  // v with v^T M v > 0 (refutes HalfNegSemiDef), on the simplex.
  const std::optional<Vector>& positive_witness() const { return negative.counterexample; }
};

namespace detail {

inline SideResult test_half_psd(const Matrix& a, const ClassifyOptions& opt) {
  using V = SideResult::Verdict;
  const Eigen::Index n = a.rows();
  const double tol = scaled_tolerance(a, opt.eps);
  SideResult r;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a(i, i) < -tol) {
      r.verdict = V::No;
      r.method = Method::DiagonalScreen;
      r.counterexample = Vector::Unit(n, i);
      r.counterexample_value = a(i, i);
      return r;
    }
  }
  const Matrix sym = symmetric_part(a);
  if (nonnegative_form_check(a, opt.eps)) {
    r.verdict = V::Yes;
    r.method = Method::NonnegativeForm;
    r.decomposition = Decomposition{a - sym.cwiseMax(0.0), sym.cwiseMax(0.0)};
    return r;
  }
  if (psd_check(a, opt.eps)) {
    r.verdict = V::Yes;
    r.method = Method::PositiveSemiDefinite;
    r.decomposition = Decomposition{a, Matrix::Zero(n, n)};
    return r;
  }
  if (auto d = decompose_psd_plus_nonneg(a, opt.eps)) {
    r.verdict = V::Yes;
    r.method = Method::Decomposition;
    r.decomposition = std::move(d);
    return r;
  }
  if (static_cast<std::size_t>(n) <= kExactDimensionCap) {
    r.method = Method::ExactSimplex;
    r.simplex = simplex_min_exact(a);
    if (r.simplex->value >= -tol) {
      r.verdict = V::Yes;
    } else {
      r.verdict = V::No;
      r.counterexample = r.simplex->minimizer;
      r.counterexample_value = r.simplex->value;
    }
    return r;
  }
  r.method = Method::Sampling;
  const SampledExtremes s = sample_extremes(a, opt.samples, opt.seed);
  if (s.min_value < -tol) {
    r.verdict = V::No;
    r.counterexample = s.argmin;
    r.counterexample_value = s.min_value;
  }
  return r;
}

}  // namespace detail

inline HalfDefiniteness classify_half_definite(const Matrix& m, const ClassifyOptions& opt = {}) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw PreconditionError("classify_half_definite: matrix must be square and non-empty");
  if (!m.allFinite()) throw PreconditionError("classify_half_definite: non-finite entries");
  using V = SideResult::Verdict;
  const double tol = scaled_tolerance(m, opt.eps);
  HalfDefiniteness out;
  out.zero_entries = m.cwiseAbs().maxCoeff() <= tol;
  out.zero_symmetric_part = !out.zero_entries && symmetric_part(m).cwiseAbs().maxCoeff() <= tol;
  if (out.zero_entries || out.zero_symmetric_part) {
    out.cls = Definiteness::ZeroMatrix;
    out.method = Method::ZeroScreen;
    return out;
  }
  out.positive = detail::test_half_psd(m, opt);
  out.negative = detail::test_half_psd(-m, opt);
  const V pos = out.positive.verdict, neg = out.negative.verdict;
  if (pos == V::Yes && neg == V::Yes) {
    out.cls = Definiteness::ZeroMatrix;
    out.method = out.positive.method;
  } else if (pos == V::Yes) {
    out.cls = Definiteness::HalfPosSemiDef;
    out.method = out.positive.method;
  } else if (neg == V::Yes) {
    out.cls = Definiteness::HalfNegSemiDef;
    out.method = out.negative.method;
  } else if (pos == V::No && neg == V::No) {
    out.cls = Definiteness::Neither;
    out.method = out.positive.method;
  } else {
    out.cls = Definiteness::Undetermined;
    out.method = Method::Sampling;
  }
  return out;
}

}  // namespace qpn
