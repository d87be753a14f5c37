#include "vprobe/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <unsupported/Eigen/IterativeSolvers>

namespace vprobe {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix eye(int n) { return Matrix::Identity(n, n); }

// V_K^T (B ⊗ S ⊗ A) V_K without forming the embedded operator.
Matrix project(const SpaceSpec& space, const Matrix& states, const Matrix& boson, const Matrix& spin,
               const Matrix& anc) {
  const Index K = states.cols();
  Matrix applied(states.rows(), K);
  for (Index c = 0; c < K; ++c) {
    applied.col(c) = apply_embedded(space, boson, spin, anc, states.col(c));
  }
  return states.transpose() * applied;
}

// kron(A, B)(i*K + j, k*K + l) = A(i, k) B(j, l)
void add_kron(CMatrix& out, Complex scale, const CMatrix& A, const CMatrix& B) {
  const Index K = A.rows();
  for (Index k = 0; k < K; ++k) {
    for (Index i = 0; i < K; ++i) {
      const Complex a = scale * A(i, k);
      if (a == Complex(0.0)) continue;
      for (Index l = 0; l < K; ++l) {
        for (Index j = 0; j < K; ++j) {
          out(i * K + j, k * K + l) += a * B(j, l);
        }
      }
    }
  }
}

CMatrix commutator(const CMatrix& X, const CMatrix& rho) { return X * rho - rho * X; }

}  // namespace

void DissipationSpec::validate() const {
  if (!(gamma_c >= 0.0 && gamma_0 >= 0.0 && gamma_M >= 0.0)) {
    throw std::invalid_argument("DissipationSpec: rates must be >= 0");
  }
}

void DriveSpec::validate() const {
  if (!(Omega_p >= 0.0)) throw std::invalid_argument("DriveSpec: Omega_p must be >= 0");
  if (!(omega_p >= 0.0)) throw std::invalid_argument("DriveSpec: omega_p must be >= 0");
}

DensityMatrix DensityMatrix::ground(Index K) {
  DensityMatrix rho{CMatrix::Zero(K, K)};
  rho.entries(0, 0) = 1.0;
  return rho;
}

void DensityMatrix::check(double herm_tol, double trace_tol, double pos_tol) const {
  const double herm = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol) {
    throw std::runtime_error("density matrix not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const Complex tr = entries.trace();
  if (std::abs(tr - Complex(1.0)) > trace_tol) {
    std::ostringstream msg;
    msg << "density matrix trace " << tr << " differs from 1";
    throw std::runtime_error(msg.str());
  }
  const CMatrix h = 0.5 * (entries + entries.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  const double lowest = es.eigenvalues().minCoeff();
  if (lowest < -pos_tol) {
    throw std::runtime_error("density matrix has negative eigenvalue " + std::to_string(lowest));
  }
}

double DensityMatrix::trace_distance(const DensityMatrix& other) const {
  if (other.basis_size() != basis_size()) throw std::invalid_argument("trace_distance: size mismatch");
  const CMatrix d = entries - other.entries;
  const CMatrix h = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Matrix lowering_part(const Vector& energies, const Matrix& A, double degeneracy_tol) {
  Matrix out = Matrix::Zero(A.rows(), A.cols());
  for (Index lp = 0; lp < A.cols(); ++lp) {
    for (Index l = 0; l < A.rows(); ++l) {
      if (energies(lp) - energies(l) > degeneracy_tol) out(l, lp) = A(l, lp);
    }
  }
  return out;
}

Matrix dressed_jump_operator(const EigenDecomposition& eig, const OperatorMatrix& A, double degeneracy_tol,
                             Index K) {
  if (A.dim() != eig.dim()) throw std::invalid_argument("dressed_jump_operator: dimension mismatch");
  if (K < 0 || K > eig.size()) K = eig.size();
  const auto vk = eig.states.leftCols(K);
  const Matrix in_basis = vk.transpose() * A.entries * vk;
  return lowering_part(eig.energies.head(K), in_basis, degeneracy_tol);
}

DressedFrame make_frame(const ProbeSolution& probe, Index K) {
  const SpaceSpec& space = probe.space;
  K = std::min<Index>(K, probe.full.size());
  if (K < 2) throw std::invalid_argument("make_frame: need at least 2 levels, got K=" + std::to_string(K));

  const int nb = space.boson_dim();
  const int ns = space.spin_dim();
  const Matrix states = probe.full.states.leftCols(K);
  const Matrix a = local::boson_annihilator(space.n_max);

  DressedFrame f;
  f.energies = probe.full.energies.head(K).array() - probe.full.energies(0);
  f.sigma_x = project(space, states, eye(nb), eye(ns), local::pauli(PauliOp::X));
  f.excited_projector = project(space, states, eye(nb), eye(ns), 0.5 * (eye(2) + local::pauli(PauliOp::Z)));
  f.quadrature = project(space, states, a + a.transpose(), eye(ns), eye(2));
  f.spin_x = project(space, states, eye(nb), local::spin(space.N, SpinOp::Jx), eye(2));
  f.bare_a = project(space, states, a, eye(ns), eye(2));
  f.bare_jminus = project(space, states, eye(nb), local::spin(space.N, SpinOp::Jminus), eye(2));
  f.bare_sminus = project(space, states, eye(nb), eye(ns), local::pauli(PauliOp::Minus));

  // |G_S><G_S| ⊗ 1 = Σ_s u_s u_s^T with u_s = V_K^T (|G_S> ⊗ |s>)
  const Vector gs = probe.system.ground_state();
  Matrix u = Matrix::Zero(K, 2);
  for (Index i = 0; i < gs.size(); ++i) {
    u.col(0) += gs(i) * states.row(2 * i).transpose();
    u.col(1) += gs(i) * states.row(2 * i + 1).transpose();
  }
  f.ground_projector = u * u.transpose();
  return f;
}

Generator::Generator(const DressedFrame& frame, const DissipationSpec& dissipation, double degeneracy_tol)
    : energies_(frame.energies) {
  dissipation.validate();
  if (K() < 2) throw std::invalid_argument("Generator: need at least 2 levels");
  auto add = [&](const char* name, double rate, const Matrix& op) {
    if (rate == 0.0) return;
    Jump j;
    j.name = name;
    j.rate = rate;
    j.op = op.cast<Complex>();
    j.op_dag_op = j.op.adjoint() * j.op;
    jumps_.push_back(std::move(j));
  };
  if (dissipation.mode == JumpMode::Dressed) {
    add("cavity", dissipation.gamma_c, lowering_part(energies_, frame.quadrature, degeneracy_tol));
    add("atoms", dissipation.gamma_0, lowering_part(energies_, frame.spin_x, degeneracy_tol));
    add("ancilla", dissipation.gamma_M, lowering_part(energies_, frame.sigma_x, degeneracy_tol));
  } else {
    add("cavity", dissipation.gamma_c, frame.bare_a);
    add("atoms", dissipation.gamma_0, frame.bare_jminus);
    add("ancilla", dissipation.gamma_M, frame.bare_sminus);
  }
}

double Generator::max_rate() const {
  double r = 0.0;
  for (const auto& j : jumps_) r = std::max(r, j.rate);
  return r;
}

CMatrix Generator::apply(const CMatrix& rho) const {
  const Index K = this->K();
  CMatrix out(K, K);
  for (Index j = 0; j < K; ++j) {
    for (Index i = 0; i < K; ++i) out(i, j) = -kI * (energies_(i) - energies_(j)) * rho(i, j);
  }
  for (const auto& jump : jumps_) {
    const CMatrix lr = jump.op * rho;
    out += (0.5 * jump.rate) *
           (2.0 * lr * jump.op.adjoint() - rho * jump.op_dag_op - jump.op_dag_op * rho);
  }
  return out;
}

CMatrix Generator::superoperator() const {
  const Index K = this->K();
  const Index n = K * K;
  CMatrix L = CMatrix::Zero(n, n);
  for (Index i = 0; i < K; ++i) {
    for (Index j = 0; j < K; ++j) L(i * K + j, i * K + j) = -kI * (energies_(i) - energies_(j));
  }
  const CMatrix id = CMatrix::Identity(K, K);
  for (const auto& jump : jumps_) {
    const double half = 0.5 * jump.rate;
    add_kron(L, 2.0 * half, jump.op, jump.op.conjugate());
    add_kron(L, -half, id, jump.op_dag_op.transpose());
    add_kron(L, -half, jump.op_dag_op, id);
  }
  return L;
}

double ancilla_population(const DensityMatrix& rho, const DressedFrame& frame) {
  return (rho.entries * frame.excited_projector.cast<Complex>()).trace().real();
}

double measurement_fidelity(const DensityMatrix& rho, const DressedFrame& frame) {
  return (rho.entries * frame.ground_projector.cast<Complex>()).trace().real();
}

PropagationResult propagate(const Generator& generator, const DressedFrame& frame, const DriveSpec& drive,
                            const DensityMatrix& rho0, const PropagationSettings& settings) {
  drive.validate();
  const Index K = generator.K();
  if (rho0.basis_size() != K || frame.K() != K) throw std::invalid_argument("propagate: basis size mismatch");

  const double period = drive.omega_p > 0.0 ? 2.0 * std::numbers::pi / drive.omega_p : 2.0 * std::numbers::pi;
  const double fastest = std::max(generator.max_rate(), generator.energies()(K - 1));
  double dt = period / settings.min_steps_per_period;
  if (fastest > 0.0) dt = std::min(dt, settings.step_scale / fastest);
  const long steps_per_period = static_cast<long>(std::ceil(period / dt - 1e-9));
  dt = period / static_cast<double>(steps_per_period);
  const long steps_per_window = steps_per_period * settings.window_periods;

  const CMatrix x = frame.sigma_x.cast<Complex>();
  const CMatrix up = frame.excited_projector.cast<Complex>();
  auto rhs = [&](double t, const CMatrix& rho) {
    CMatrix d = generator.apply(rho);
    if (drive.Omega_p != 0.0) d -= kI * (drive.Omega_p * std::cos(drive.omega_p * t)) * commutator(x, rho);
    return d;
  };

  CMatrix rho = rho0.entries;
  double t = 0.0;
  double previous = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::infinity();
  int windows = 0;
  while (true) {
    CMatrix avg = CMatrix::Zero(K, K);
    for (long s = 0; s < steps_per_window; ++s) {
      avg += rho;
      const CMatrix k1 = rhs(t, rho);
      const CMatrix k2 = rhs(t + 0.5 * dt, rho + (0.5 * dt) * k1);
      const CMatrix k3 = rhs(t + 0.5 * dt, rho + (0.5 * dt) * k2);
      const CMatrix k4 = rhs(t + dt, rho + dt * k3);
      rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += dt;
    }
    avg /= static_cast<double>(steps_per_window);
    ++windows;
    if (settings.check_invariants) DensityMatrix{rho}.check();

    const double current = (avg * up).trace().real();
    if (windows >= 2) {
      residual = std::abs(current - previous);
      if (residual <= settings.rel_tol * std::abs(current) + 1e-14) {
        return {DensityMatrix{0.5 * (avg + avg.adjoint())}, t, residual, windows};
      }
    }
    previous = current;
    if (t >= settings.max_time) {
      throw ConvergenceError("propagate: no convergence by t=" + std::to_string(t) +
                                 " (last residual " + std::to_string(residual) + ")",
                             residual);
    }
  }
}

namespace {

// vec index of ρ(j, i) for the entry ρ(i, j); ρ -> ρ† is v -> conj(v[swap]).
Eigen::VectorXcd adjoint_vec(const Eigen::VectorXcd& v, Index K) {
  Eigen::VectorXcd out(v.size());
  for (Index i = 0; i < K; ++i)
    for (Index j = 0; j < K; ++j) out(i * K + j) = std::conj(v(j * K + i));
  return out;
}

using RowMajorC = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

struct HarmonicSteadyState::Factorization {
  CMatrix lu;
  std::vector<lapack_int> pivots;

  explicit Factorization(CMatrix a) : lu(std::move(a)), pivots(lu.rows()) {
    const lapack_int n = static_cast<lapack_int>(lu.rows());
    const double anorm = lu.cwiseAbs().colwise().sum().maxCoeff();
    const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu.data(), n, pivots.data());
    if (info != 0) throw std::runtime_error("steady_state: singular generator (zgetrf info " + std::to_string(info) + ")");
    double rcond = 0.0;
    LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, lu.data(), n, anorm, &rcond);
    if (!(rcond > 1e-14)) {
      throw std::runtime_error("steady_state: generator has no unique steady state (rcond " + std::to_string(rcond) +
                               ")");
    }
  }

  Eigen::VectorXcd solve(Eigen::VectorXcd b) const {
    const lapack_int n = static_cast<lapack_int>(lu.rows());
    LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lu.data(), n, pivots.data(), b.data(), n);
    return b;
  }
};

namespace {

// Block system for (ρ_{-h}, ..., ρ_h):
//   (L0 - ikω)ρ_k + (Ω/2) L1 (ρ_{k-1} + ρ_{k+1}) = 0,  L1 ρ = -i[σx, ρ],
// with the first row of the k = 0 block replaced by Tr ρ_0 = 1.
struct HarmonicSystem {
  const CMatrix* L0;
  const CMatrix* x;
  Index K;
  int h;
  double omega;
  Complex half_drive;
  const HarmonicSteadyState::Factorization* block0;
  std::vector<const HarmonicSteadyState::Factorization*> blocks;  // k = 1..h

  Index n() const { return K * K; }
  Index size() const { return (2 * h + 1) * n(); }

  Eigen::VectorXcd drive_term(const Eigen::VectorXcd& v) const {
    Eigen::Map<const RowMajorC> r(v.data(), K, K);
    RowMajorC res = (-kI * half_drive) * ((*x) * r - r * (*x));
    return Eigen::Map<const Eigen::VectorXcd>(res.data(), n());
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& in) const {
    const Index m = n();
    Eigen::VectorXcd out(size());
    for (int k = -h; k <= h; ++k) {
      const Index at = (k + h) * m;
      Eigen::VectorXcd acc = (*L0) * in.segment(at, m);
      acc -= kI * (k * omega) * in.segment(at, m);
      Eigen::VectorXcd neighbours = Eigen::VectorXcd::Zero(m);
      if (k > -h) neighbours += in.segment(at - m, m);
      if (k < h) neighbours += in.segment(at + m, m);
      acc += drive_term(neighbours);
      if (k == 0) {
        Complex tr = 0.0;
        for (Index i = 0; i < K; ++i) tr += in(at + i * K + i);
        acc(0) = tr;
      }
      out.segment(at, m) = acc;
    }
    return out;
  }

  // Block-diagonal inverse; negative harmonics reuse the positive factors via
  // (L0 + ikω) = P conj(L0 - ikω) P.
  Eigen::VectorXcd precondition(const Eigen::VectorXcd& in) const {
    const Index m = n();
    Eigen::VectorXcd out(size());
    for (int k = -h; k <= h; ++k) {
      const Index at = (k + h) * m;
      if (k == 0) {
        out.segment(at, m) = block0->solve(in.segment(at, m));
      } else if (k > 0) {
        out.segment(at, m) = blocks[k - 1]->solve(in.segment(at, m));
      } else {
        out.segment(at, m) = adjoint_vec(blocks[-k - 1]->solve(adjoint_vec(in.segment(at, m), K)), K);
      }
    }
    return out;
  }
};

class HarmonicOperator;

}  // namespace
}  // namespace vprobe

namespace Eigen::internal {
template <>
struct traits<vprobe::HarmonicOperator> : public traits<Eigen::SparseMatrix<std::complex<double>>> {};
}  // namespace Eigen::internal

namespace vprobe {
namespace {

class HarmonicOperator : public Eigen::EigenBase<HarmonicOperator> {
 public:
  using Scalar = Complex;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  explicit HarmonicOperator(const HarmonicSystem& system) : system_(&system) {}
  Index rows() const { return system_->size(); }
  Index cols() const { return system_->size(); }

  template <typename Rhs>
  Eigen::Product<HarmonicOperator, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<HarmonicOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  const HarmonicSystem& system() const { return *system_; }

 private:
  const HarmonicSystem* system_;
};

class HarmonicPreconditioner {
 public:
  HarmonicPreconditioner() = default;
  template <typename M>
  HarmonicPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  HarmonicPreconditioner& factorize(const M&) { return *this; }
  HarmonicPreconditioner& compute(const HarmonicOperator& op) {
    system_ = &op.system();
    return *this;
  }
  template <typename Rhs>
  Eigen::VectorXcd solve(const Rhs& b) const { return system_->precondition(b); }
  Eigen::ComputationInfo info() { return Eigen::Success; }

 private:
  const HarmonicSystem* system_ = nullptr;
};

}  // namespace
}  // namespace vprobe

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<vprobe::HarmonicOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<vprobe::HarmonicOperator, Rhs,
                                generic_product_impl<vprobe::HarmonicOperator, Rhs>> {
  using Scalar = typename Product<vprobe::HarmonicOperator, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const vprobe::HarmonicOperator& lhs, const Rhs& rhs, const Scalar& alpha) {
    dst.noalias() += alpha * lhs.system().apply(rhs);
  }
};
}  // namespace Eigen::internal

namespace vprobe {

HarmonicSteadyState::HarmonicSteadyState(const Generator& generator, const Matrix& sigma_x)
    : K_(generator.K()), L0_(generator.superoperator()), x_(sigma_x.cast<Complex>()) {
  if (sigma_x.rows() != K_ || sigma_x.cols() != K_) {
    throw std::invalid_argument("steady_state: drive operator size mismatch");
  }
  CMatrix a = L0_;
  a.row(0).setZero();
  for (Index i = 0; i < K_; ++i) a(0, i * K_ + i) = 1.0;
  undriven_ = std::make_unique<Factorization>(std::move(a));
}

HarmonicSteadyState::~HarmonicSteadyState() = default;
HarmonicSteadyState::HarmonicSteadyState(HarmonicSteadyState&&) noexcept = default;

DensityMatrix HarmonicSteadyState::solve(const DriveSpec& drive, int harmonics) const {
  drive.validate();
  const Index K = K_;
  const Index n = K * K;
  Eigen::VectorXcd rho0;

  if (drive.Omega_p == 0.0 || harmonics <= 0) {
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(0) = 1.0;
    rho0 = undriven_->solve(rhs);
  } else {
    if (!(drive.omega_p > 0.0)) throw std::invalid_argument("steady_state: driven solve needs omega_p > 0");
    std::vector<std::unique_ptr<Factorization>> owned;
    HarmonicSystem system{&L0_, &x_, K, harmonics, drive.omega_p, 0.5 * drive.Omega_p, undriven_.get(), {}};
    for (int k = 1; k <= harmonics; ++k) {
      CMatrix a = L0_;
      a.diagonal().array() -= kI * (k * drive.omega_p);
      owned.push_back(std::make_unique<Factorization>(std::move(a)));
      system.blocks.push_back(owned.back().get());
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(system.size());
    rhs(harmonics * n) = 1.0;

    const HarmonicOperator op(system);
    Eigen::GMRES<HarmonicOperator, HarmonicPreconditioner> gmres;
    gmres.set_restart(60);
    gmres.setTolerance(1e-13);
    gmres.setMaxIterations(2000);
    gmres.compute(op);
    const Eigen::VectorXcd sol = gmres.solve(rhs);
    const double residual = (system.apply(sol) - rhs).cwiseAbs().maxCoeff();
    if (!sol.allFinite() || residual > 1e-9) {
      throw ConvergenceError("steady_state: harmonic solve did not converge (residual " + std::to_string(residual) +
                                 ")",
                             residual);
    }
    rho0 = sol.segment(harmonics * n, n);
  }

  CMatrix rho(K, K);
  for (Index i = 0; i < K; ++i)
    for (Index j = 0; j < K; ++j) rho(i, j) = rho0(i * K + j);
  return DensityMatrix{0.5 * (rho + rho.adjoint())};
}

DensityMatrix steady_state(const Generator& generator, const Matrix& sigma_x, const DriveSpec& drive,
                           int harmonics) {
  return HarmonicSteadyState(generator, sigma_x).solve(drive, harmonics);
}

std::vector<SpectroscopyPoint> spectroscopy_scan(const ProbeSolution& probe, const DissipationSpec& dissipation,
                                                 double Omega_p, const std::vector<double>& omega_p_grid,
                                                 const ScanSettings& settings) {
  const DressedFrame frame = make_frame(probe, settings.K);
  const Generator generator(frame, dissipation, settings.degeneracy_tol);
  std::optional<HarmonicSteadyState> solver;
  if (settings.method == SteadyStateMethod::Harmonic) solver.emplace(generator, frame.sigma_x);
  std::vector<SpectroscopyPoint> out;
  out.reserve(omega_p_grid.size());
  for (double wp : omega_p_grid) {
    const DriveSpec drive{wp, Omega_p};
    DensityMatrix rho = settings.method == SteadyStateMethod::Harmonic
                            ? solver->solve(drive, settings.harmonics)
                            : propagate(generator, frame, drive, DensityMatrix::ground(frame.K()),
                                        settings.propagation)
                                  .rho;
    out.push_back({wp, ancilla_population(rho, frame), measurement_fidelity(rho, frame)});
  }
  return out;
}

std::vector<SpectroscopyPoint> spectroscopy_scan(const ModelSpec& model, const AncillaSpec& ancilla,
                                                 const SpaceSpec& space, const DissipationSpec& dissipation,
                                                 double Omega_p, const std::vector<double>& omega_p_grid,
                                                 const ScanSettings& settings) {
  return spectroscopy_scan(solve_probe(model, ancilla, space), dissipation, Omega_p, omega_p_grid, settings);
}

PeakInfo peak_extract(const std::vector<SpectroscopyPoint>& points) {
  if (points.size() < 5) throw std::invalid_argument("peak_extract: need at least 5 points");
  std::size_t imax = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].n_up > points[imax].n_up) imax = i;
  }
  if (imax == 0 || imax + 1 == points.size()) {
    throw std::invalid_argument("peak_extract: no interior maximum on the grid");
  }
  const double x0 = points[imax - 1].omega_p, x1 = points[imax].omega_p, x2 = points[imax + 1].omega_p;
  const double y0 = points[imax - 1].n_up, y1 = points[imax].n_up, y2 = points[imax + 1].n_up;
  const double d1 = (y1 - y0) / (x1 - x0);
  const double d2 = (y2 - y1) / (x2 - x1);
  const double curv = (d2 - d1) / (x2 - x0);

  PeakInfo peak{x1, y1, std::numeric_limits<double>::quiet_NaN()};
  if (curv < 0.0) {
    // y = y0 + d1 (x - x0) + curv (x - x0)(x - x1)
    const double xv = 0.5 * (x0 + x1 - d1 / curv);
    peak.peak_frequency = xv;
    peak.peak_height = y0 + d1 * (xv - x0) + curv * (xv - x0) * (xv - x1);
  }

  const double half = 0.5 * peak.peak_height;
  auto crossing = [&](std::size_t lo, std::size_t hi) {
    const double t = (half - points[lo].n_up) / (points[hi].n_up - points[lo].n_up);
    return points[lo].omega_p + t * (points[hi].omega_p - points[lo].omega_p);
  };
  double left = std::numeric_limits<double>::quiet_NaN();
  double right = left;
  for (std::size_t i = imax; i > 0; --i) {
    if (points[i - 1].n_up < half) {
      left = crossing(i - 1, i);
      break;
    }
  }
  for (std::size_t i = imax; i + 1 < points.size(); ++i) {
    if (points[i + 1].n_up < half) {
      right = crossing(i, i + 1);
      break;
    }
  }
  peak.linewidth = right - left;
  return peak;
}

}  // namespace vprobe
