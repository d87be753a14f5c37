#pragma once

#include "vprobe/hilbert.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace vprobe {

enum class ModelKind { Dicke, TavisCummings, Hopfield };

std::string to_string(ModelKind kind);
// Accepts "dicke", "tc" / "tavis_cummings", "hopfield". Throws std::invalid_argument.
ModelKind parse_model_kind(std::string_view name);

// All frequencies in units of omega_c (hbar = 1).
struct ModelSpec {
  ModelKind kind = ModelKind::Dicke;
  double omega_c = 1.0;
  double omega_0 = 1.0;
  double lambda = 0.0;
  int N = 1;
  // Only meaningful for Hopfield; replaces the default lambda^2 / omega_0.
  std::optional<double> D_override;

  double D() const;
  void validate() const;
};

struct AncillaSpec {
  double omega_M = 2.75;
  double g_M = 0.1;

  void validate() const;
};

// H_Dicke = wc a†a + w0 Jz + (λ/√N)(a†+a)(J+ + J-)
// H_TC    = wc a†a + w0 Jz + (λ/√N)(a†J- + aJ+)
// H_Hop   = H_Dicke + D(a†+a)²
// Acts as identity on the ancilla factor when the space carries one.
OperatorMatrix build_system_hamiltonian(const ModelSpec& model, const SpaceSpec& space);

// H_S + (ωM/2)σz + gM(a†+a)σx. Requires space.include_ancilla.
OperatorMatrix build_full_hamiltonian(const ModelSpec& model, const AncillaSpec& ancilla,
                                      const SpaceSpec& space);

// max |HS - SH|
double check_symmetry(const OperatorMatrix& H, const OperatorMatrix& S);

}  // namespace vprobe
