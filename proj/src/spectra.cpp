#include "vprobe/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace vprobe {

namespace {

double symmetric_tolerance(const Matrix& h) { return 1e-12 * std::max(1.0, max_abs(h)); }

// In-place LAPACK dsyevd on a column-major copy.
void solve_dense(Matrix& a, Vector& w) {
  const auto n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  if (n == 0) return;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
  if (info < 0) {
    throw std::runtime_error("diagonalize: dsyevd rejected argument " + std::to_string(-info));
  }
  if (info > 0) {
    throw std::runtime_error("diagonalize: eigensolver failed to converge (info=" + std::to_string(info) + ")");
  }
}

}  // namespace

EigenDecomposition diagonalize(const OperatorMatrix& H) {
  if (H.entries.rows() != H.entries.cols()) throw std::invalid_argument("diagonalize: matrix is not square");
  const double defect = hermiticity_defect(H);
  if (defect > symmetric_tolerance(H.entries)) {
    throw std::invalid_argument("diagonalize: input is not symmetric (defect " + std::to_string(defect) + ")");
  }
  EigenDecomposition out;
  out.states = H.entries;
  solve_dense(out.states, out.energies);
  return out;
}

EigenDecomposition diagonalize(const OperatorMatrix& H, const OperatorMatrix& parity) {
  const Index dim = H.dim();
  if (parity.dim() != dim) throw std::invalid_argument("diagonalize: parity dimension mismatch");
  const double defect = hermiticity_defect(H);
  const double tol = symmetric_tolerance(H.entries);
  if (defect > tol) {
    throw std::invalid_argument("diagonalize: input is not symmetric (defect " + std::to_string(defect) + ")");
  }

  std::vector<Index> even, odd;
  for (Index i = 0; i < dim; ++i) {
    const double p = parity.entries(i, i);
    if (p == 1.0) {
      even.push_back(i);
    } else if (p == -1.0) {
      odd.push_back(i);
    } else {
      throw std::invalid_argument("diagonalize: parity operator must be diagonal with entries +-1");
    }
  }

  auto block = [&](const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Matrix b(rows.size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (std::size_t r = 0; r < rows.size(); ++r) b(r, c) = H.entries(rows[r], cols[c]);
    }
    return b;
  };

  if (!even.empty() && !odd.empty() && max_abs(block(even, odd)) > tol) {
    throw std::invalid_argument("diagonalize: Hamiltonian does not commute with the parity operator");
  }

  Matrix be = block(even, even);
  Matrix bo = block(odd, odd);
  Vector we, wo;
  solve_dense(be, we);
  solve_dense(bo, wo);

  EigenDecomposition out;
  out.energies.resize(dim);
  out.states = Matrix::Zero(dim, dim);
  out.parity.resize(dim);

  auto place = [&](Index level, const Matrix& vecs, Index col, const std::vector<Index>& idx) {
    for (std::size_t r = 0; r < idx.size(); ++r) out.states(idx[r], level) = vecs(r, col);
  };

  Index ie = 0, io = 0;
  for (Index level = 0; level < dim; ++level) {
    bool take_even;
    if (ie >= we.size()) {
      take_even = false;
    } else if (io >= wo.size()) {
      take_even = true;
    } else {
      const double tie = 1e-12 * std::max(1.0, std::abs(we(ie)));
      take_even = we(ie) <= wo(io) + tie;
    }
    if (take_even) {
      out.energies(level) = we(ie);
      place(level, be, ie, even);
      out.parity[level] = 1;
      ++ie;
    } else {
      out.energies(level) = wo(io);
      place(level, bo, io, odd);
      out.parity[level] = -1;
      ++io;
    }
  }
  return out;
}

Vector spectroscopic_weights(const EigenDecomposition& eig, const OperatorMatrix& sigma_x) {
  if (sigma_x.dim() != eig.dim()) throw std::invalid_argument("spectroscopic_weights: dimension mismatch");
  const Vector x_ground = sigma_x.entries * eig.states.col(0);
  return (eig.states.transpose() * x_ground).array().square();
}

NumericShift lamb_shift_numeric(const EigenDecomposition& eig, const OperatorMatrix& sigma_x, double omega_M) {
  return lamb_shift_numeric(eig, spectroscopic_weights(eig, sigma_x), omega_M);
}

NumericShift lamb_shift_numeric(const EigenDecomposition& eig, const Vector& weights, double omega_M) {
  if (weights.size() != eig.size() || eig.size() < 2) {
    throw std::invalid_argument("lamb_shift_numeric: need weights for at least two levels");
  }
  NumericShift out;
  Index best = -1, second = -1;
  for (Index l = 1; l < weights.size(); ++l) {
    if (best < 0 || weights(l) > weights(best)) {
      second = best;
      best = l;
    } else if (second < 0 || weights(l) > weights(second)) {
      second = l;
    }
  }
  const double e0 = eig.energies(0);
  out.dominant_level = best;
  out.weight = weights(best);
  out.shift = (eig.energies(best) - e0) - omega_M;
  if (second >= 0) {
    out.runner_up_level = second;
    out.runner_up_weight = weights(second);
    out.runner_up_shift = (eig.energies(second) - e0) - omega_M;
    out.avoided_crossing = (out.weight - out.runner_up_weight) < 0.1 * out.weight;
  }
  return out;
}

GroundExpectations ground_expectations(const ModelSpec& model, const SpaceSpec& space,
                                       const EigenDecomposition& eig_S, DickeVConvention convention) {
  if (space.include_ancilla) {
    throw std::invalid_argument("ground_expectations: expects the system space without ancilla");
  }
  if (eig_S.dim() != space.dim()) throw std::invalid_argument("ground_expectations: dimension mismatch");
  if (space.N != model.N) throw std::invalid_argument("ground_expectations: N mismatch");

  const int nb = space.boson_dim();
  const int ns = space.spin_dim();
  const Matrix ib = Matrix::Identity(nb, nb);
  const Matrix is = Matrix::Identity(ns, ns);
  const Matrix none = Matrix::Identity(2, 2);
  const Matrix a = local::boson_annihilator(space.n_max);
  const Matrix ad = a.transpose();
  const Matrix x = a + ad;
  const Matrix jp = local::spin(space.N, SpinOp::Jplus);
  const Matrix jm = jp.transpose();
  const Matrix jx = local::spin(space.N, SpinOp::Jx);

  const Vector g = eig_S.ground_state();
  auto expect = [&](const Matrix& b, const Matrix& s) { return g.dot(apply_embedded(space, b, s, none, g)); };

  GroundExpectations ex;
  const Vector xg = apply_embedded(space, x, is, none, g);
  ex.quad = xg.squaredNorm();
  ex.n_phot = expect(ad * a, is);
  ex.anomalous = expect(ad * ad + a * a, is);
  ex.excitations = ex.n_phot + expect(ib, local::spin(space.N, SpinOp::Jz)) + 0.5 * space.N;

  const double c = model.lambda / std::sqrt(static_cast<double>(model.N));
  const double factor = static_cast<double>(static_cast<int>(convention));
  switch (model.kind) {
    case ModelKind::Dicke:
      ex.V = factor * c * expect(x, jx);
      break;
    case ModelKind::TavisCummings:
      ex.V = c * (expect(a, jp) + expect(ad, jm));
      break;
    case ModelKind::Hopfield:
      ex.V = factor * c * expect(x, jx) + 2.0 * model.D() * ex.quad;
      break;
  }
  return ex;
}

double lamb_shift_analytic(const ModelSpec& model, const AncillaSpec& ancilla, const GroundExpectations& ex) {
  const double wm = ancilla.omega_M;
  const double wc = model.omega_c;
  if (std::abs(wm - wc) < 1e-12 * std::max(1.0, wc)) {
    throw std::invalid_argument("lamb_shift_analytic: omega_M equals omega_c (pole)");
  }
  const double g2 = ancilla.g_M * ancilla.g_M;
  const double minus = wm - wc;
  const double plus = wm + wc;
  return g2 * (1.0 / minus + 1.0 / plus) * ex.quad + g2 * (1.0 / (minus * minus) - 1.0 / (plus * plus)) * ex.V;
}

double ground_state_fidelity(const EigenDecomposition& eig_SM, const EigenDecomposition& eig_S) {
  if (eig_SM.dim() != 2 * eig_S.dim()) {
    throw std::invalid_argument("ground_state_fidelity: joint space must be the system space times a qubit");
  }
  const Vector gs = eig_S.ground_state();
  const Vector gsm = eig_SM.ground_state();
  double overlap_down = 0.0, overlap_up = 0.0;
  for (Index i = 0; i < gs.size(); ++i) {
    overlap_down += gs(i) * gsm(2 * i);
    overlap_up += gs(i) * gsm(2 * i + 1);
  }
  return std::clamp(overlap_down * overlap_down + overlap_up * overlap_up, 0.0, 1.0);
}

double edge_occupancy(const SpaceSpec& space, const Vector& psi) {
  if (psi.size() != space.dim()) throw std::invalid_argument("edge_occupancy: dimension mismatch");
  double sum = 0.0;
  for (int k = 0; k < space.spin_dim(); ++k) {
    for (int s = 0; s < space.ancilla_dim(); ++s) {
      const double v = psi(space.index(space.n_max, k, s));
      sum += v * v;
    }
  }
  return sum;
}

LambShiftResult ProbeSolution::result(double lambda) const {
  LambShiftResult r;
  r.lambda = lambda;
  r.shift_numeric = numeric.shift;
  r.shift_analytic = shift_analytic;
  r.dominant_level = numeric.dominant_level;
  r.weight = numeric.weight;
  r.fidelity_G = fidelity_G;
  r.avoided_crossing = numeric.avoided_crossing;
  return r;
}

namespace {

Vector weights_on_space(const EigenDecomposition& eig, const SpaceSpec& space) {
  const Vector x_ground = apply_embedded(space, Matrix::Identity(space.boson_dim(), space.boson_dim()),
                                         Matrix::Identity(space.spin_dim(), space.spin_dim()),
                                         local::pauli(PauliOp::X), eig.states.col(0));
  return (eig.states.transpose() * x_ground).array().square();
}

}  // namespace

ProbeSolution solve_probe(const ModelSpec& model, const AncillaSpec& ancilla, SpaceSpec space,
                          DickeVConvention convention) {
  space.include_ancilla = true;
  ProbeSolution sol;
  sol.space = space;
  sol.full = diagonalize(build_full_hamiltonian(model, ancilla, space), parity_operator(space));
  const SpaceSpec sys = space.system_only();
  sol.system = diagonalize(build_system_hamiltonian(model, sys), parity_operator(sys));
  sol.weights = weights_on_space(sol.full, space);
  sol.numeric = lamb_shift_numeric(sol.full, sol.weights, ancilla.omega_M);
  sol.expectations = ground_expectations(model, sys, sol.system, convention);
  sol.shift_analytic = lamb_shift_analytic(model, ancilla, sol.expectations);
  sol.fidelity_G = ground_state_fidelity(sol.full, sol.system);
  return sol;
}

TruncationReport validate_truncation(const ModelSpec& model, const AncillaSpec& ancilla, const SpaceSpec& space,
                                     double tolerance, double shift_tolerance, int max_n_max) {
  struct Probe {
    double shift;
    double occupancy;
  };
  std::map<int, Probe> cache;
  auto probe = [&](int n) -> const Probe& {
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    SpaceSpec s = space;
    s.n_max = n;
    s.include_ancilla = true;
    const EigenDecomposition eig = diagonalize(build_full_hamiltonian(model, ancilla, s), parity_operator(s));
    const NumericShift shift = lamb_shift_numeric(eig, weights_on_space(eig, s), ancilla.omega_M);
    return cache.emplace(n, Probe{shift.shift, edge_occupancy(s, eig.ground_state())}).first->second;
  };

  TruncationReport report;
  auto check = [&](int n) {
    TruncationStep step;
    step.n_max = n;
    step.edge_occupancy = probe(n).occupancy;
    step.converged = step.edge_occupancy < tolerance;
    if (step.converged) {
      step.shift_change = std::abs(probe(n + 4).shift - probe(n).shift);
      step.converged = step.shift_change < shift_tolerance;
    } else {
      step.shift_change = std::nan("");
    }
    report.trail.push_back(step);
    return step;
  };
  auto finish = [&](const TruncationStep& step, bool converged) {
    report.converged = converged;
    report.recommended_n_max = step.n_max;
    report.edge_occupancy = step.edge_occupancy;
    report.shift_change = step.shift_change;
    return report;
  };

  int n = std::max(space.n_max, 1);
  TruncationStep step = check(n);
  if (step.converged) return finish(step, true);

  int lo = n;
  while (!step.converged) {
    lo = n;
    n *= 2;
    if (n > max_n_max) return finish(step, false);
    step = check(n);
  }
  int hi = n;
  TruncationStep best = step;
  while (hi - lo > 2) {
    int mid = (lo + hi) / 2;
    mid += mid % 2;
    if (mid >= hi) break;
    const TruncationStep s = check(mid);
    if (s.converged) {
      hi = mid;
      best = s;
    } else {
      lo = mid;
    }
  }
  return finish(best, true);
}

}  // namespace vprobe
