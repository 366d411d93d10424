#include "uscqed/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#ifdef USCQED_HAVE_LAPACKE
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif

namespace uscqed::spectral {
namespace {

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LongComplexMatrix =
    Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

constexpr double kTieTol = 1e-12;   // eigenvalue gap below which order is convention
constexpr double kImagTol = 1e-14;  // relative imaginary part treated as zero

struct DensePair {
  RealVector vals;
  Matrix vecs;
};

inline double real_part(double x) { return x; }
inline double real_part(const Complex& x) { return x.real(); }

void checked_k(Eigen::Index n, int k) {
  if (k < 1 || k > n)
    throw DimensionError("eigensolve: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(n) + "]");
}

bool is_real_dense(const Matrix& m, double scale) {
  return m.imag().cwiseAbs().maxCoeff() <= kImagTol * std::max(scale, 1.0);
}

// ---- dense solvers ---------------------------------------------------------

DensePair dense_real(RealMatrix a, int k) {
  const auto n = a.rows();
#ifdef USCQED_HAVE_LAPACKE
  RealVector vals(n);
  RealMatrix vecs(n, k);
  std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * k));
  lapack_int found = 0;
  const double abstol = LAPACKE_dlamch('S');
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', static_cast<lapack_int>(n), a.data(),
      static_cast<lapack_int>(n), 0.0, 0.0, 1, k, abstol, &found, vals.data(),
      vecs.data(), static_cast<lapack_int>(n), isuppz.data());
  if (info != 0 || found != k)
    throw ResourceError("dsyevr failed (info=" + std::to_string(info) + ")");
  return {vals.head(k), vecs.cast<Complex>()};
#else
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(a);
  if (es.info() != Eigen::Success) throw ResourceError("dense eigensolve failed");
  return {es.eigenvalues().head(k), es.eigenvectors().leftCols(k).cast<Complex>()};
#endif
}

DensePair dense_complex(Matrix a, int k) {
  const auto n = a.rows();
#ifdef USCQED_HAVE_LAPACKE
  RealVector vals(n);
  Matrix vecs(n, k);
  std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * k));
  lapack_int found = 0;
  const double abstol = LAPACKE_dlamch('S');
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', static_cast<lapack_int>(n), a.data(),
      static_cast<lapack_int>(n), 0.0, 0.0, 1, k, abstol, &found, vals.data(),
      vecs.data(), static_cast<lapack_int>(n), isuppz.data());
  if (info != 0 || found != k)
    throw ResourceError("zheevr failed (info=" + std::to_string(info) + ")");
  return {vals.head(k), std::move(vecs)};
#else
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw ResourceError("dense eigensolve failed");
  return {es.eigenvalues().head(k), es.eigenvectors().leftCols(k)};
#endif
}

DensePair dense_long_real(const RealMatrix& a, int k) {
  Eigen::SelfAdjointEigenSolver<LongMatrix> es(a.cast<long double>());
  if (es.info() != Eigen::Success)
    throw ResourceError("long-double eigensolve failed");
  DensePair out;
  out.vals = es.eigenvalues().head(k).cast<double>();
  const RealMatrix v = es.eigenvectors().leftCols(k).cast<double>();
  out.vecs = v.cast<Complex>();
  return out;
}

DensePair dense_long_complex(const Matrix& a, int k) {
  Eigen::SelfAdjointEigenSolver<LongComplexMatrix> es(
      a.cast<std::complex<long double>>());
  if (es.info() != Eigen::Success)
    throw ResourceError("long-double eigensolve failed");
  DensePair out;
  out.vals = es.eigenvalues().head(k).cast<double>();
  out.vecs = es.eigenvectors().leftCols(k).cast<Complex>();
  return out;
}

RealMatrix dense_real_product(const ops::ProductOperator& h) {
  const Eigen::Index dl = h.dim_left(), dr = h.dim_right();
  RealMatrix out = RealMatrix::Zero(dl * dr, dl * dr);
  for (const auto& t : h.terms()) {
    const RealMatrix l = t.left.real(), r = t.right.real();
    for (Eigen::Index il = 0; il < dl; ++il)
      for (Eigen::Index jl = 0; jl < dl; ++jl)
        if (const double c = l(il, jl); c != 0.0)
          out.block(il * dr, jl * dr, dr, dr) += c * r;
  }
  return out;
}

// ---- iterative solver ------------------------------------------------------

// Lanczos with full reorthogonalization. Stops once the Ritz residual
// estimates for the k lowest pairs drop below a quarter of the target, then
// verifies the true residuals explicitly; throws ResourceError if either the
// iteration cap is hit or verification fails (callers retry with a new seed).
template <typename Scalar>
DensePair lanczos_lowest(
    Eigen::Index n, int k, double scale, const EigensolveOptions& opts,
    std::uint64_t seed,
    const std::function<void(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&,
                             Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>& matvec,
    double* residual_out) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  const int m_max = static_cast<int>(std::min<Eigen::Index>(n, opts.lanczos_max_iter));
  if (k + 2 > m_max)
    throw DimensionError("eigensolve: k too large for the iterative path");
  if (opts.sector_mask) {
    if (opts.sector_mask->size() != n)
      throw DimensionError("eigensolve: sector mask length does not match the operator");
    if ((opts.sector_mask->array() != 0.0).count() < k + 2)
      throw DimensionError("eigensolve: sector mask keeps fewer states than requested");
  }
  const double norm_floor = std::max(scale, 1.0);
  const double rtol = opts.residual_tol * norm_floor;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto project = [&](Vec& v) {
    if (opts.sector_mask)
      v.array() *= opts.sector_mask->array().template cast<Scalar>();
  };
  const auto refill = [&](Vec& v) {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Scalar(gauss(rng));
    project(v);
  };

  Mat V(n, m_max);
  RealVector alpha = RealVector::Zero(m_max);
  RealVector beta = RealVector::Zero(m_max);
  Vec w(n), hv(n);

  refill(w);
  w /= w.norm();
  V.col(0) = w;

  Eigen::SelfAdjointEigenSolver<RealMatrix> small;
  int m = 0;
  int next_check = k + 2;
  bool converged = false;

  for (int j = 0; j < m_max; ++j) {
    matvec(V.col(j), hv);
    w = hv;
    w -= V.col(j) * Scalar(alpha(j) = real_part(V.col(j).dot(hv)));
    if (j > 0) w -= V.col(j - 1) * Scalar(beta(j - 1));
    for (int pass = 0; pass < 2; ++pass) {
      const Vec proj = V.leftCols(j + 1).adjoint() * w;
      w.noalias() -= V.leftCols(j + 1) * proj;
    }
    // In-sector V makes the out-of-sector leakage of w orthogonal to V, so
    // masking after reorthogonalization cannot break orthogonality.
    project(w);
    double b = w.norm();
    m = j + 1;
    const bool last = (m == m_max);
    const bool closed = (b <= 1e-13 * norm_floor);

    // The tridiagonal eigensolve behind each check is O(m^3); stretch the
    // check spacing as the space grows to keep the total near O(m_final^3).
    if (m >= k + 2 && (m >= next_check || last || closed)) {
      next_check = m + std::max(8, m / 8);
      small.computeFromTridiagonal(alpha.head(m), beta.head(m - 1),
                                   Eigen::ComputeEigenvectors);
      bool ok = true;
      for (int i = 0; i < k; ++i)
        if (std::abs(b * small.eigenvectors()(m - 1, i)) > 0.25 * rtol) {
          ok = false;
          break;
        }
      if (ok) {
        converged = true;
        break;
      }
    }
    if (last) break;

    if (closed) {
      // invariant subspace closed; restart orthogonally to keep growing
      beta(j) = 0.0;
      refill(w);
      for (int pass = 0; pass < 2; ++pass) {
        const Vec proj = V.leftCols(j + 1).adjoint() * w;
        w.noalias() -= V.leftCols(j + 1) * proj;
      }
      b = w.norm();
      if (b <= 1e-13) throw ResourceError("lanczos: space exhausted after breakdown");
    } else {
      beta(j) = b;
    }
    V.col(j + 1) = w / b;
  }

  if (!converged)
    throw ResourceError("lanczos: no convergence within the iteration cap");

  Mat ritz = V.leftCols(m) * small.eigenvectors().leftCols(k).template cast<Scalar>();
  double worst = 0.0;
  for (int i = 0; i < k; ++i) {
    ritz.col(i) /= ritz.col(i).norm();
    matvec(ritz.col(i), hv);
    worst = std::max(worst, (hv - ritz.col(i) * Scalar(small.eigenvalues()(i))).norm());
  }
  if (worst > rtol) throw ResourceError("lanczos: residual verification failed");
  if (residual_out) *residual_out = worst;

  DensePair out;
  out.vals = small.eigenvalues().head(k);
  if constexpr (std::is_same_v<Scalar, Complex>)
    out.vecs = std::move(ritz);
  else
    out.vecs = ritz.template cast<Complex>();
  return out;
}

template <typename Scalar>
DensePair lanczos_retry(
    Eigen::Index n, int k, double scale, const EigensolveOptions& opts,
    const std::function<void(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&,
                             Eigen::Matrix<Scalar, Eigen::Dynamic, 1>&)>& matvec,
    double* residual_out) {
  for (int attempt = 0;; ++attempt) {
    try {
      return lanczos_lowest<Scalar>(n, k, scale, opts, opts.lanczos_seed + attempt,
                                    matvec, residual_out);
    } catch (const ResourceError&) {
      if (attempt >= 2) throw;
    }
  }
}

// ---- eigenpair conventions ------------------------------------------------

void fix_phase_column(Matrix& vecs, Eigen::Index c) {
  Eigen::Index best = 0;
  double mag = std::abs(vecs(0, c));
  for (Eigen::Index i = 1; i < vecs.rows(); ++i)
    if (const double a = std::abs(vecs(i, c)); a > mag + kTieTol) {
      mag = a;
      best = i;
    }
  const Complex z = vecs(best, c);
  if (std::abs(z) > 0.0) vecs.col(c) *= std::conj(z) / std::abs(z);
}

void fix_phases(Matrix& vecs) {
  for (Eigen::Index c = 0; c < vecs.cols(); ++c) fix_phase_column(vecs, c);
}

double order_key(const Matrix& vecs, Eigen::Index c, const Matrix* parity) {
  if (parity) {
    const Vector pv = (*parity) * vecs.col(c);
    return std::real(vecs.col(c).dot(pv));
  }
  for (Eigen::Index i = 0; i < vecs.rows(); ++i)
    if (std::abs(vecs(i, c)) > 1e-9) return vecs(i, c).real() >= 0.0 ? 1.0 : -1.0;
  return 0.0;
}

void order_degenerate(RealVector& vals, Matrix& vecs, const Matrix* parity) {
  if (parity && parity->rows() != vecs.rows())
    throw DimensionError("eigensolve: parity operator dimension mismatch");
  Eigen::Index i = 0;
  while (i < vals.size()) {
    Eigen::Index j = i + 1;
    while (j < vals.size() && vals(j) - vals(j - 1) < kTieTol) ++j;
    if (j - i > 1 && parity) {
      // A degenerate eigenspace comes back in an arbitrary rotation; project
      // the symmetry into the group and rotate to its eigenvectors, ordered
      // by symmetry eigenvalue descending (even before odd).
      const Eigen::Index g = j - i;
      const Matrix block = vecs.middleCols(i, g);
      const Matrix psub = block.adjoint() * ((*parity) * block);
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (psub + psub.adjoint()));
      const Matrix rotated = block * es.eigenvectors();
      for (Eigen::Index t = 0; t < g; ++t) {
        vecs.col(i + t) = rotated.col(g - 1 - t);
        fix_phase_column(vecs, i + t);
      }
    } else if (j - i > 1) {
      std::vector<Eigen::Index> idx(static_cast<std::size_t>(j - i));
      std::iota(idx.begin(), idx.end(), i);
      std::vector<double> key(idx.size());
      for (std::size_t t = 0; t < idx.size(); ++t) key[t] = order_key(vecs, idx[t], parity);
      std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        return key[static_cast<std::size_t>(a - i)] > key[static_cast<std::size_t>(b - i)];
      });
      const RealVector vblock = vals.segment(i, j - i);
      const Matrix mblock = vecs.middleCols(i, j - i);
      for (std::size_t t = 0; t < idx.size(); ++t) {
        vals(i + static_cast<Eigen::Index>(t)) = vblock(idx[t] - i);
        vecs.col(i + static_cast<Eigen::Index>(t)) = mblock.col(idx[t] - i);
      }
    }
    i = j;
  }
}

double dense_residual(const Matrix& m, const DensePair& p) {
  const Matrix hv = m * p.vecs;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.vecs.cols(); ++i)
    worst = std::max(worst, (hv.col(i) - p.vals(i) * p.vecs.col(i)).norm());
  return worst;
}

double dense_residual(const RealMatrix& m, const DensePair& p) {
  const RealMatrix v = p.vecs.real();
  const RealMatrix hv = m * v;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i)
    worst = std::max(worst, (hv.col(i) - p.vals(i) * v.col(i)).norm());
  return worst;
}

SpectralResult finish(DensePair p, std::vector<int> dims, double residual,
                      const EigensolveOptions& opts) {
  fix_phases(p.vecs);
  order_degenerate(p.vals, p.vecs, opts.parity);
  SpectralResult out;
  out.eigenvalues = std::move(p.vals);
  out.eigenvectors = std::move(p.vecs);
  out.basis_dims = std::move(dims);
  out.residual_norm = residual;
  return out;
}

// Each stored term must be Hermitian (x) Hermitian or anti-Hermitian (x)
// anti-Hermitian so the assembled sum is Hermitian term by term. Stricter
// than necessary for arbitrary sums, but every builder satisfies it and the
// check pins down the offending term when one does not.
void check_product_hermitian(const ops::ProductOperator& h) {
  constexpr double tol = 1e-12;
  for (const auto& t : h.terms()) {
    const double sl = std::max(t.left.cwiseAbs().maxCoeff(), 1.0);
    const double sr = std::max(t.right.cwiseAbs().maxCoeff(), 1.0);
    const double herm_l = (t.left - t.left.adjoint()).cwiseAbs().maxCoeff();
    const double herm_r = (t.right - t.right.adjoint()).cwiseAbs().maxCoeff();
    const double anti_l = (t.left + t.left.adjoint()).cwiseAbs().maxCoeff();
    const double anti_r = (t.right + t.right.adjoint()).cwiseAbs().maxCoeff();
    const bool herm_pair = herm_l <= tol * sl && herm_r <= tol * sr;
    const bool anti_pair = anti_l <= tol * sl && anti_r <= tol * sr;
    if (!herm_pair && !anti_pair)
      throw ContractError("eigensolve: ProductOperator term is neither Hermitian (x) "
                          "Hermitian nor anti-Hermitian (x) anti-Hermitian");
  }
}

}  // namespace

// ---- public API -------------------------------------------------------------

SpectralResult eigensolve(const HermitianOperator& h, int k, const EigensolveOptions& opts) {
  const Matrix& m = h.matrix();
  const Eigen::Index n = m.rows();
  checked_k(n, k);
  if (opts.sector_mask && !(opts.precision == Precision::Double && n > opts.dense_threshold))
    throw ContractError("eigensolve: sector_mask requires the iterative path");
  const double scale = m.cwiseAbs().maxCoeff();
  const bool real = is_real_dense(m, scale);

  DensePair p;
  double residual = 0.0;
  if (opts.precision == Precision::LongDouble) {
    if (n > opts.dense_threshold)
      throw ResourceError("eigensolve: long-double precision is dense-only");
    if (real) {
      const RealMatrix mr = m.real();
      p = dense_long_real(mr, k);
      residual = dense_residual(mr, p);
    } else {
      p = dense_long_complex(m, k);
      residual = dense_residual(m, p);
    }
  } else if (n <= opts.dense_threshold) {
    if (real) {
      const RealMatrix mr = m.real();
      p = dense_real(mr, k);
      residual = dense_residual(mr, p);
    } else {
      p = dense_complex(m, k);
      residual = dense_residual(m, p);
    }
  } else if (real) {
    const RealMatrix mr = m.real();
    const auto mv = [&mr](const RealVector& v, RealVector& out) { out.noalias() = mr * v; };
    p = lanczos_retry<double>(n, k, scale, opts, mv, &residual);
  } else {
    const auto mv = [&m](const Vector& v, Vector& out) { out.noalias() = m * v; };
    p = lanczos_retry<Complex>(n, k, scale, opts, mv, &residual);
  }
  return finish(std::move(p), {static_cast<int>(n)}, residual, opts);
}

SpectralResult eigensolve(const ops::ProductOperator& h, int k, const EigensolveOptions& opts) {
  const Eigen::Index n = h.dim();
  checked_k(n, k);
  if (opts.sector_mask && !(opts.precision == Precision::Double && n > opts.dense_threshold))
    throw ContractError("eigensolve: sector_mask requires the iterative path");
  check_product_hermitian(h);
  const double scale = h.max_norm_bound();
  const bool real = h.is_real();

  DensePair p;
  double residual = 0.0;
  if (opts.precision == Precision::Double && n > opts.dense_threshold) {
    if (real) {
      std::vector<std::pair<RealMatrix, RealMatrix>> terms;
      terms.reserve(h.terms().size());
      for (const auto& t : h.terms()) terms.emplace_back(t.left.real(), t.right.real());
      const Eigen::Index dl = h.dim_left(), dr = h.dim_right();
      RealMatrix tmp(dr, dl);
      const auto mv = [&terms, &tmp, dl, dr](const RealVector& v, RealVector& out) {
        out.setZero(v.size());
        Eigen::Map<const RealMatrix> vm(v.data(), dr, dl);
        Eigen::Map<RealMatrix> om(out.data(), dr, dl);
        for (const auto& [l, r] : terms) {
          tmp.noalias() = vm * l.transpose();
          om.noalias() += r * tmp;
        }
      };
      p = lanczos_retry<double>(n, k, scale, opts, mv, &residual);
    } else {
      const auto mv = [&h](const Vector& v, Vector& out) { h.apply(v, out); };
      p = lanczos_retry<Complex>(n, k, scale, opts, mv, &residual);
    }
  } else if (real) {
    if (opts.precision == Precision::LongDouble && n > opts.dense_threshold)
      throw ResourceError("eigensolve: long-double precision is dense-only");
    const RealMatrix m = dense_real_product(h);
    p = (opts.precision == Precision::LongDouble) ? dense_long_real(m, k) : dense_real(m, k);
    residual = dense_residual(m, p);
  } else {
    if (opts.precision == Precision::LongDouble && n > opts.dense_threshold)
      throw ResourceError("eigensolve: long-double precision is dense-only");
    const Matrix m = h.dense();
    p = (opts.precision == Precision::LongDouble) ? dense_long_complex(m, k)
                                                  : dense_complex(m, k);
    residual = dense_residual(m, p);
  }
  return finish(std::move(p),
                {static_cast<int>(h.dim_left()), static_cast<int>(h.dim_right())}, residual,
                opts);
}

SpectralResult converge_truncation(const Factory& factory, const TruncationPolicy& policy) {
  if (!factory) throw ContractError("converge_truncation: empty factory");
  if (policy.k < 1) throw DomainError("converge_truncation: k must be positive");
  if (policy.step < 1) throw DomainError("converge_truncation: step must be positive");
  if (policy.tol <= 0.0) throw DomainError("converge_truncation: tol must be positive");
  if (policy.start_dims.empty() || policy.start_dims.size() != policy.max_dims.size())
    throw ContractError("converge_truncation: start_dims/max_dims size mismatch");
  for (std::size_t i = 0; i < policy.start_dims.size(); ++i)
    if (policy.start_dims[i] < 1 || policy.start_dims[i] > policy.max_dims[i])
      throw DomainError("converge_truncation: start dim outside [1, max]");

  std::vector<int> dims = policy.start_dims;
  std::vector<ConvergeRecord> history;
  RealVector prev;
  while (true) {
    SpectralResult r = eigensolve(factory(dims), policy.k, policy.solver);
    double drift = std::numeric_limits<double>::infinity();
    if (prev.size() > 0) drift = (r.eigenvalues - prev).cwiseAbs().maxCoeff();
    history.push_back({dims, r.eigenvalues, drift});

    const bool settled = history.size() >= 2 && drift <= policy.tol;
    bool can_grow = false;
    for (std::size_t i = 0; i < dims.size(); ++i)
      if (dims[i] < policy.max_dims[i]) can_grow = true;

    if (settled || !can_grow) {
      r.basis_dims = dims;
      r.converged = settled;
      r.history = std::move(history);
      return r;
    }
    prev = r.eigenvalues;
    for (std::size_t i = 0; i < dims.size(); ++i)
      dims[i] = std::min(dims[i] + policy.step, policy.max_dims[i]);
  }
}

std::vector<Transition> transitions(const SpectralResult& result, const std::vector<int>& from) {
  const int n = static_cast<int>(result.eigenvalues.size());
  std::vector<Transition> out;
  for (const int i : from) {
    if (i < 0 || i >= n) throw DimensionError("transitions: index out of range");
    for (int j = i + 1; j < n; ++j)
      out.push_back({i, j, result.eigenvalues(j) - result.eigenvalues(i)});
  }
  return out;
}

Complex matrix_element(const SpectralResult& result, const Matrix& op, int i, int j) {
  const int n = static_cast<int>(result.eigenvalues.size());
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw DimensionError("matrix_element: eigenstate index out of range");
  if (op.rows() != result.eigenvectors.rows() || op.cols() != op.rows())
    throw DimensionError("matrix_element: operator dimension mismatch");
  return result.eigenvectors.col(i).dot(op * result.eigenvectors.col(j));
}

}  // namespace uscqed::spectral
