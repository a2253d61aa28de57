#pragma once
// Reference eigensolver kept deliberately unlike the library: cell-centred
// grid (x_i = (i - 1/2) h), reflection ghost for the Neumann condition, full dense
// tridiagonal QR from Eigen, one fixed grid, no extrapolation.
#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>

namespace oracle {

inline constexpr int kN = 8000;
inline constexpr double kL = 20.0;

inline double ground_energy(double xi, int n = kN, double length = kL) {
  const double h = length / n;
  Eigen::VectorXd diag(n), sub(n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * h;
    diag(i) = 2.0 / (h * h) + (xi - x) * (xi - x);
  }
  diag(0) -= 1.0 / (h * h);      // u_0 = u_1
  diag(n - 1) += 1.0 / (h * h);  // u_{n+1} = -u_n, zero at x = L
  sub.setConstant(-1.0 / (h * h));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

struct Minimum {
  double xi0;
  double theta0;
};

// Cubic through five energies around the minimum; its stationary point.
inline Minimum ground_minimum() {
  const std::array<double, 5> xs{0.73, 0.75, 0.77, 0.79, 0.81};
  Eigen::Matrix<double, 5, 4> A;
  Eigen::Matrix<double, 5, 1> y;
  const double c = 0.77;
  for (int i = 0; i < 5; ++i) {
    const double t = xs[i] - c;
    A.row(i) << 1.0, t, t * t, t * t * t;
    y(i) = ground_energy(xs[i]);
  }
  const Eigen::Vector4d p = A.colPivHouseholderQr().solve(y);
  // p1 + 2 p2 t + 3 p3 t^2 = 0, root nearest t = 0
  const double qa = 3.0 * p(3), qb = 2.0 * p(2), qc = p(1);
  const double disc = std::sqrt(qb * qb - 4.0 * qa * qc);
  const double t = (2.0 * qc) / (-qb - std::copysign(disc, qb));
  return {c + t, p(0) + p(1) * t + p(2) * t * t + p(3) * t * t * t};
}

}  // namespace oracle
