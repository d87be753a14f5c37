#pragma once

#include "vprobe/hilbert.hpp"
#include "vprobe/models.hpp"
#include "vprobe/spectra.hpp"

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace vprobe {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

enum class JumpMode { Dressed, Bare };

// Zero-temperature reservoirs. Bare mode swaps the dressed jump operators for
// the undressed lowering operators a, J-, σ-; it exists for diagnostics only.
struct DissipationSpec {
  double gamma_c = 0.0;
  double gamma_0 = 0.0;
  double gamma_M = 0.0;
  JumpMode mode = JumpMode::Dressed;

  void validate() const;
};

// Ω_p cos(ω_p t) σx on the ancilla.
struct DriveSpec {
  double omega_p = 0.0;
  double Omega_p = 0.0;

  void validate() const;
};

struct DensityMatrix {
  CMatrix entries;

  Index basis_size() const { return entries.rows(); }

  static DensityMatrix ground(Index K);

  // Hermitian to herm_tol, unit trace to trace_tol, smallest eigenvalue
  // >= -pos_tol. Throws std::runtime_error naming the violated invariant.
  void check(double herm_tol = 1e-10, double trace_tol = 1e-8, double pos_tol = 1e-8) const;

  double trace_distance(const DensityMatrix& other) const;
};

// 𝒰[A] = Σ Θ(ε_l' - ε_l) <l|A|l'> |l><l'| in the eigenbasis, restricted to
// the lowest K levels (K < 0: all). Transitions with |ε_l' - ε_l| <=
// degeneracy_tol are dropped.
Matrix dressed_jump_operator(const EigenDecomposition& eig, const OperatorMatrix& A, double degeneracy_tol = 1e-9,
                             Index K = -1);

// Keeps only the energy-lowering part of an operator already written in the
// eigenbasis.
Matrix lowering_part(const Vector& energies, const Matrix& A_eigenbasis, double degeneracy_tol);

// Operators of the joint problem written in the lowest K eigenstates of
// H_{S+M}. Energies are measured from the ground level.
struct DressedFrame {
  Vector energies;
  Matrix sigma_x;
  Matrix excited_projector;  // (1 + σz)/2
  Matrix ground_projector;   // |G_S><G_S| ⊗ 1
  Matrix quadrature;         // a + a†
  Matrix spin_x;             // Jx
  Matrix bare_a;
  Matrix bare_jminus;
  Matrix bare_sminus;

  Index K() const { return energies.size(); }
};

// K is clipped to the space dimension; K < 2 throws.
DressedFrame make_frame(const ProbeSolution& probe, Index K);

struct Jump {
  std::string name;
  double rate = 0.0;  // enters as (rate/2) 𝒟[op]
  CMatrix op;
  CMatrix op_dag_op;
};

// ρ̇ = -i[E, ρ] + Σ (γ/2)(2LρL† - ρL†L - L†Lρ), without the drive.
class Generator {
 public:
  Generator(const DressedFrame& frame, const DissipationSpec& dissipation, double degeneracy_tol = 1e-9);

  Index K() const { return energies_.size(); }
  const Vector& energies() const { return energies_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  double max_rate() const;

  CMatrix apply(const CMatrix& rho) const;

  // Matrix of the map on row-major vec(ρ), i.e. vec(ρ)[i*K + j] = ρ(i, j).
  CMatrix superoperator() const;

 private:
  Vector energies_;
  std::vector<Jump> jumps_;
};

inline Generator build_generator(const DressedFrame& frame, const DissipationSpec& dissipation,
                                 double degeneracy_tol = 1e-9) {
  return Generator(frame, dissipation, degeneracy_tol);
}

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct PropagationSettings {
  double max_time = 2e5;
  double rel_tol = 1e-6;
  int window_periods = 10;
  int min_steps_per_period = 64;
  double step_scale = 0.05;  // dt <= step_scale / max(γ, ε_K - ε_G)
  bool check_invariants = true;
};

struct PropagationResult {
  DensityMatrix rho;  // average over the last window
  double time = 0.0;
  double residual = 0.0;
  int windows = 0;
};

// Fixed-step RK4 integration of the driven master equation until the
// window-averaged ancilla population settles. Throws ConvergenceError.
PropagationResult propagate(const Generator& generator, const DressedFrame& frame, const DriveSpec& drive,
                            const DensityMatrix& rho0, const PropagationSettings& settings = {});

// Period-averaged asymptotic state from the Fourier-harmonic expansion
// ρ(t) = Σ_k ρ_k e^{ikω_p t}, |k| <= harmonics, truncated above. With
// Ω_p = 0 this is the kernel of the generator. Throws std::runtime_error when
// the steady state is not unique or the solve does not converge.
DensityMatrix steady_state(const Generator& generator, const Matrix& sigma_x, const DriveSpec& drive,
                           int harmonics = 2);

// Same solution, with the undriven factorization kept across drive settings.
// The coupled harmonic equations are solved by GMRES preconditioned with the
// per-harmonic factorizations of (L0 - ikω_p).
class HarmonicSteadyState {
 public:
  HarmonicSteadyState(const Generator& generator, const Matrix& sigma_x);
  ~HarmonicSteadyState();
  HarmonicSteadyState(HarmonicSteadyState&&) noexcept;

  DensityMatrix solve(const DriveSpec& drive, int harmonics = 2) const;
  Index K() const { return K_; }

  struct Factorization;

 private:
  Index K_;
  CMatrix L0_;
  CMatrix x_;
  std::unique_ptr<Factorization> undriven_;  // L0 with the trace row
};

double ancilla_population(const DensityMatrix& rho, const DressedFrame& frame);
double measurement_fidelity(const DensityMatrix& rho, const DressedFrame& frame);

struct SpectroscopyPoint {
  double omega_p = 0.0;
  double n_up = 0.0;
  double fidelity_F = 1.0;
};

enum class SteadyStateMethod { Harmonic, TimeIntegration };

struct ScanSettings {
  Index K = 24;
  double degeneracy_tol = 1e-9;
  SteadyStateMethod method = SteadyStateMethod::Harmonic;
  int harmonics = 1;
  PropagationSettings propagation;
};

// One steady state per drive frequency, starting from the dressed ground state.
std::vector<SpectroscopyPoint> spectroscopy_scan(const ProbeSolution& probe, const DissipationSpec& dissipation,
                                                 double Omega_p, const std::vector<double>& omega_p_grid,
                                                 const ScanSettings& settings = {});

std::vector<SpectroscopyPoint> spectroscopy_scan(const ModelSpec& model, const AncillaSpec& ancilla,
                                                 const SpaceSpec& space, const DissipationSpec& dissipation,
                                                 double Omega_p, const std::vector<double>& omega_p_grid,
                                                 const ScanSettings& settings = {});

struct PeakInfo {
  double peak_frequency = 0.0;
  double peak_height = 0.0;
  double linewidth = 0.0;  // FWHM; NaN when a half-maximum crossing is off the grid
};

// Parabolic refinement of the n_up maximum. Throws std::invalid_argument for
// fewer than 5 points or a maximum on the grid edge.
PeakInfo peak_extract(const std::vector<SpectroscopyPoint>& points);

}  // namespace vprobe
