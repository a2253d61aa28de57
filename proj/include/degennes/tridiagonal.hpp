#pragma once

// Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for selected
// eigenvalues and inverse iteration (LU with partial pivoting) for vectors.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace degennes {

template <typename Scalar>
struct SymTridiagonal {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector diag;  // size n
  Vector off;   // size n-1, off(i) couples rows i and i+1

  Eigen::Index size() const { return diag.size(); }
};

/// Number of eigenvalues strictly below sigma (negative pivots of T - sigma).
template <typename Scalar>
Eigen::Index sturm_count(const SymTridiagonal<Scalar>& t, Scalar sigma) {
  const Eigen::Index n = t.size();
  const Scalar tiny = std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon();
  Eigen::Index count = 0;
  Scalar q = t.diag(0) - sigma;
  if (q < 0) ++count;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (q == Scalar(0)) q = tiny;
    q = (t.diag(i) - sigma) - t.off(i - 1) * t.off(i - 1) / q;
    if (q < 0) ++count;
  }
  return count;
}

template <typename Scalar>
std::pair<Scalar, Scalar> gershgorin_bounds(const SymTridiagonal<Scalar>& t) {
  using std::abs;
  const Eigen::Index n = t.size();
  Scalar lo = std::numeric_limits<Scalar>::max();
  Scalar hi = std::numeric_limits<Scalar>::lowest();
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar r = 0;
    if (i > 0) r += abs(t.off(i - 1));
    if (i + 1 < n) r += abs(t.off(i));
    lo = std::min(lo, t.diag(i) - r);
    hi = std::max(hi, t.diag(i) + r);
  }
  return {lo, hi};
}

/// Bisection for the k-th smallest eigenvalue (0-based) inside [lo, hi].
/// Requires sturm_count(lo) <= k < sturm_count(hi).
template <typename Scalar>
Scalar bisect_eigenvalue(const SymTridiagonal<Scalar>& t, Eigen::Index k, Scalar lo, Scalar hi,
                         Scalar rel_tol) {
  using std::abs;
  for (int it = 0; it < 256; ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (hi - lo <= rel_tol * std::max(Scalar(1), abs(mid)) || mid == lo || mid == hi) break;
    if (sturm_count(t, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo + (hi - lo) / 2;
}

/// LU factorization of (T - sigma I) with partial pivoting, LAPACK gttrf layout.
template <typename Scalar>
class ShiftedTridiagonalLU {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  ShiftedTridiagonalLU(const SymTridiagonal<Scalar>& t, Scalar sigma) {
    using std::abs;
    const Eigen::Index n = t.size();
    d_ = t.diag.array() - sigma;
    dl_ = t.off;
    du_ = t.off;
    du2_ = Vector::Zero(std::max<Eigen::Index>(n - 2, 0));
    pivot_.assign(static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 0)), 0);

    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (abs(d_(i)) >= abs(dl_(i))) {
        if (d_(i) != Scalar(0)) {
          const Scalar fact = dl_(i) / d_(i);
          dl_(i) = fact;
          d_(i + 1) -= fact * du_(i);
        }
      } else {
        const Scalar fact = d_(i) / dl_(i);
        d_(i) = dl_(i);
        dl_(i) = fact;
        const Scalar temp = du_(i);
        du_(i) = d_(i + 1);
        d_(i + 1) = temp - fact * d_(i + 1);
        if (i + 2 < n) {
          du2_(i) = du_(i + 1);
          du_(i + 1) = -fact * du_(i + 1);
        }
        pivot_[static_cast<std::size_t>(i)] = 1;
      }
    }
    // Exactly singular pivots are nudged; inverse iteration only needs a
    // direction, not an accurate solve.
    Scalar scale = 0;
    for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, abs(d_(i)));
    const Scalar floor = std::numeric_limits<Scalar>::epsilon() * std::max(scale, Scalar(1));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (abs(d_(i)) < floor) d_(i) = d_(i) < 0 ? -floor : floor;
    }
  }

  void solve_in_place(Vector& b) const {
    const Eigen::Index n = d_.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (pivot_[static_cast<std::size_t>(i)] == 0) {
        b(i + 1) -= dl_(i) * b(i);
      } else {
        const Scalar temp = b(i) - dl_(i) * b(i + 1);
        b(i) = b(i + 1);
        b(i + 1) = temp;
      }
    }
    b(n - 1) /= d_(n - 1);
    if (n > 1) b(n - 2) = (b(n - 2) - du_(n - 2) * b(n - 1)) / d_(n - 2);
    for (Eigen::Index i = n - 3; i >= 0; --i) {
      b(i) = (b(i) - du_(i) * b(i + 1) - du2_(i) * b(i + 2)) / d_(i);
    }
  }

 private:
  Vector d_, dl_, du_, du2_;
  std::vector<std::uint8_t> pivot_;
};

/// Inverse iteration from a deterministic start vector; returns a unit vector.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inverse_iteration(const SymTridiagonal<Scalar>& t,
                                                          Scalar sigma, int iterations = 3) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = t.size();
  const ShiftedTridiagonalLU<Scalar> lu(t, sigma);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    using std::sin;
    v(i) = Scalar(1) + Scalar(0.25) * sin(Scalar(0.7) * Scalar(i) + Scalar(0.3));
  }
  v /= v.norm();
  for (int it = 0; it < iterations; ++it) {
    lu.solve_in_place(v);
    v /= v.cwiseAbs().maxCoeff();
    v /= v.norm();
  }
  return v;
}

}  // namespace degennes
