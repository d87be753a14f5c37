#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>

namespace vprobe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Truncated product space: boson Fock levels 0..n_max, the symmetric
// (j = N/2) sector of N two-level atoms, and optionally the ancilla qubit.
//
// Basis ordering is boson ⊗ spin ⊗ ancilla with the last factor fastest:
//   index = (n * (N + 1) + k) * A + s
// where k = m + N/2 in 0..N and s = 0 (|down>) or 1 (|up>).
struct SpaceSpec {
  int n_max = 16;
  int N = 1;
  bool include_ancilla = false;

  int boson_dim() const { return n_max + 1; }
  int spin_dim() const { return N + 1; }
  int ancilla_dim() const { return include_ancilla ? 2 : 1; }
  Index dim() const;

  Index index(int n, int k, int s = 0) const;

  // Same boson and spin factors, ancilla dropped.
  SpaceSpec system_only() const;

  // Throws std::invalid_argument.
  void validate() const;

  bool operator==(const SpaceSpec&) const = default;
};

struct OperatorMatrix {
  Matrix entries;
  std::string label;

  Index dim() const { return entries.rows(); }
};

enum class SpinOp { Jz, Jplus, Jminus, Jx };
enum class PauliOp { X, Z, Plus, Minus };

// Single-factor matrices, before embedding.
namespace local {
Matrix boson_annihilator(int n_max);
Matrix spin(int N, SpinOp which);
Matrix pauli(PauliOp which);
}  // namespace local

// Kronecker product boson ⊗ spin ⊗ ancilla. Factor sizes must match the
// space; the ancilla factor is ignored (treated as 1x1) when the space has
// no ancilla. Zero entries of the factors are skipped.
OperatorMatrix embed(const SpaceSpec& space, const Matrix& boson, const Matrix& spin,
                     const Matrix& ancilla, std::string label);

// (boson ⊗ spin ⊗ ancilla) |psi> without forming the embedded matrix.
Vector apply_embedded(const SpaceSpec& space, const Matrix& boson, const Matrix& spin,
                      const Matrix& ancilla, const Vector& psi);

OperatorMatrix identity(const SpaceSpec& space);
OperatorMatrix boson_annihilator(const SpaceSpec& space);
OperatorMatrix collective_spin(const SpaceSpec& space, SpinOp which);
// Throws std::invalid_argument when the space has no ancilla.
OperatorMatrix ancilla_pauli(const SpaceSpec& space, PauliOp which);

// (-1)^(a†a + Jz + N/2 [+ (σz+1)/2]), diagonal with entries ±1.
OperatorMatrix parity_operator(const SpaceSpec& space);

// a†a + Jz + N/2; the ancilla does not count.
OperatorMatrix excitation_number(const SpaceSpec& space);

double max_abs(const Matrix& m);
double hermiticity_defect(const OperatorMatrix& op);

}  // namespace vprobe
