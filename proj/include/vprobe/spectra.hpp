#pragma once

#include "vprobe/hilbert.hpp"
#include "vprobe/models.hpp"

#include <vector>

namespace vprobe {

struct EigenDecomposition {
  Vector energies;  // ascending
  Matrix states;    // orthonormal columns
  // ±1 per level when diagonalized by parity blocks, empty otherwise.
  std::vector<int> parity;

  Index dim() const { return states.rows(); }
  Index size() const { return energies.size(); }
  double ground_energy() const { return energies(0); }
  Vector ground_state() const { return states.col(0); }
};

// Dense symmetric eigensolver. Throws std::invalid_argument on a
// non-symmetric input and std::runtime_error if the solver does not converge.
EigenDecomposition diagonalize(const OperatorMatrix& H);

// Same contract, but solves the ±1 blocks of a diagonal parity operator that
// commutes with H separately. Levels closer than 1e-12 (relative) are ordered
// even before odd so ground states in near-degenerate doublets are parity
// eigenstates chosen deterministically.
EigenDecomposition diagonalize(const OperatorMatrix& H, const OperatorMatrix& parity);

// w_l = |<G|σx|l>|² for every level l (sums to 1).
Vector spectroscopic_weights(const EigenDecomposition& eig, const OperatorMatrix& sigma_x);

struct NumericShift {
  double shift = 0.0;  // (ε_l* - ε_G) - ω_M
  Index dominant_level = 0;
  double weight = 0.0;
  // Second strongest excited level, reported alongside the flag.
  Index runner_up_level = -1;
  double runner_up_weight = 0.0;
  double runner_up_shift = 0.0;
  // Set when the two largest weights are within 10% of each other.
  bool avoided_crossing = false;
};

NumericShift lamb_shift_numeric(const EigenDecomposition& eig, const OperatorMatrix& sigma_x, double omega_M);
NumericShift lamb_shift_numeric(const EigenDecomposition& eig, const Vector& weights, double omega_M);

// How V^(Dicke) enters the analytic shift: the printed (λ/√N)(a+a†)Jx, or the
// full interaction term (λ/√N)(a+a†)(J+ + J-). The Hopfield V inherits it.
enum class DickeVConvention { Printed = 1, InteractionTerm = 2 };

struct GroundExpectations {
  double quad = 0.0;         // <(a+a†)²>
  double V = 0.0;            // <V^(S)>
  double n_phot = 0.0;       // <a†a>
  double anomalous = 0.0;    // <a†² + a²>
  double excitations = 0.0;  // <a†a + Jz + N/2>
};

// Expectation values on the ground state of eig_S, which must be built from
// H_S on `space` (no ancilla factor).
GroundExpectations ground_expectations(const ModelSpec& model, const SpaceSpec& space,
                                       const EigenDecomposition& eig_S,
                                       DickeVConvention convention = DickeVConvention::InteractionTerm);

// Second-order dispersive shift
//   g²(1/(ωM-ωc) + 1/(ωM+ωc))<(a+a†)²> + g²(1/(ωM-ωc)² - 1/(ωM+ωc)²)<V>.
// Throws std::invalid_argument at the pole ωM = ωc.
double lamb_shift_analytic(const ModelSpec& model, const AncillaSpec& ancilla, const GroundExpectations& ex);

// F_G = <G_S| Tr_M |G_{S+M}><G_{S+M}| |G_S>, via the 2-component ancilla
// overlap. eig_SM must live on the system space with the ancilla appended.
double ground_state_fidelity(const EigenDecomposition& eig_SM, const EigenDecomposition& eig_S);

// Weight of the highest retained Fock level in psi.
double edge_occupancy(const SpaceSpec& space, const Vector& psi);

struct LambShiftResult {
  double lambda = 0.0;
  double shift_numeric = 0.0;
  double shift_analytic = 0.0;
  Index dominant_level = 0;
  double weight = 0.0;
  double fidelity_G = 1.0;
  bool avoided_crossing = false;
};

// Everything the spectra quantities need for one parameter point.
struct ProbeSolution {
  SpaceSpec space;  // with ancilla
  EigenDecomposition full;
  EigenDecomposition system;
  Vector weights;
  NumericShift numeric;
  GroundExpectations expectations;
  double shift_analytic = 0.0;
  double fidelity_G = 1.0;

  LambShiftResult result(double lambda) const;
};

// Diagonalizes H_{S+M} and H_S by parity blocks and evaluates all of the
// above. space.include_ancilla is forced on.
ProbeSolution solve_probe(const ModelSpec& model, const AncillaSpec& ancilla, SpaceSpec space,
                          DickeVConvention convention = DickeVConvention::InteractionTerm);

struct TruncationStep {
  int n_max = 0;
  double edge_occupancy = 0.0;
  double shift_change = 0.0;
  bool converged = false;
};

struct TruncationReport {
  bool converged = false;
  int recommended_n_max = 0;
  double edge_occupancy = 0.0;
  double shift_change = 0.0;
  std::vector<TruncationStep> trail;
};

// Convergence at a cutoff n: the ground-state weight on Fock level n is below
// `tolerance` and the numeric shift moves by less than `shift_tolerance` when
// the cutoff grows to n + 4. Starting from space.n_max the cutoff doubles
// until converged, then bisects back down to the smallest converged even
// cutoff. Gives up (converged = false) past max_n_max.
TruncationReport validate_truncation(const ModelSpec& model, const AncillaSpec& ancilla, const SpaceSpec& space,
                                     double tolerance = 1e-8, double shift_tolerance = 1e-6,
                                     int max_n_max = 256);

}  // namespace vprobe
