#pragma once
// Reference implementations used only by the tests. They deliberately avoid
// the library's embedding and eigen-solver code paths.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) { return Eigen::kroneckerProduct(a, b).eval(); }

inline MatrixXd annihilator(int n_max) {
  MatrixXd a = MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

// |j, m> with m = -j + k, k = 0..N
inline MatrixXd jplus(int N) {
  const double j = 0.5 * N;
  MatrixXd m = MatrixXd::Zero(N + 1, N + 1);
  for (int k = 0; k < N; ++k) {
    const double mm = -j + k;
    m(k + 1, k) = std::sqrt(j * (j + 1) - mm * (mm + 1));
  }
  return m;
}

inline MatrixXd jz(int N) {
  MatrixXd m = MatrixXd::Zero(N + 1, N + 1);
  for (int k = 0; k <= N; ++k) m(k, k) = -0.5 * N + k;
  return m;
}

// Cavity + spin Hamiltonian from plain Kronecker products.
// kind: "dicke", "tc", "hopfield".
inline MatrixXd system_hamiltonian(const std::string& kind, double wc, double w0, double lam, int N, int n_max,
                                   double D) {
  const MatrixXd a = annihilator(n_max);
  const MatrixXd ad = a.transpose();
  const MatrixXd jp = jplus(N);
  const MatrixXd jm = jp.transpose();
  const MatrixXd ib = MatrixXd::Identity(n_max + 1, n_max + 1);
  const MatrixXd is = MatrixXd::Identity(N + 1, N + 1);
  const double c = lam / std::sqrt(double(N));
  MatrixXd h = wc * kron(ad * a, is) + w0 * kron(ib, jz(N));
  if (kind == "tc") {
    h += c * (kron(ad, jm) + kron(a, jp));
  } else {
    h += c * kron(a + ad, jp + jm);
  }
  if (kind == "hopfield") h += D * kron((a + ad) * (a + ad), is);
  return h;
}

inline double jc_energy(int n, int sign, double wc, double w0, double lam) {
  return n * wc - 0.5 * w0 + sign * lam * std::sqrt(double(n));
}

inline double bogoliubov_quad(double wc, double D) { return std::sqrt(wc / (wc + 4.0 * D)); }

// Exact second-order ancilla shift g² Σ_n |<n|X|0>|² 2ωM / (ωM² - (E_n - E_0)²)
// from the spectrum of H_S, X = (a + a†) on the system space.
inline double second_order_shift(const MatrixXd& hs, const MatrixXd& x, double omega_M, double g) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(hs);
  const VectorXd e = es.eigenvalues();
  const MatrixXd v = es.eigenvectors();
  const VectorXd x0 = v.transpose() * (x * v.col(0));
  double s = 0.0;
  for (Eigen::Index n = 0; n < e.size(); ++n) {
    const double d = e(n) - e(0);
    s += x0(n) * x0(n) * 2.0 * omega_M / (omega_M * omega_M - d * d);
  }
  return g * g * s;
}

// Driven, damped two-level atom (rotating frame): Rabi frequency Omega,
// population decay rate Gamma, detuning Delta.
inline double two_level_excited(double Omega, double Gamma, double Delta) {
  return 0.25 * Omega * Omega / (Delta * Delta + 0.25 * Gamma * Gamma + 0.5 * Omega * Omega);
}

}  // namespace oracle
