#include "vprobe/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace vprobe {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Dicke:
      return "dicke";
    case ModelKind::TavisCummings:
      return "tc";
    case ModelKind::Hopfield:
      return "hopfield";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "dicke") return ModelKind::Dicke;
  if (s == "tc" || s == "tavis_cummings" || s == "taviscummings") return ModelKind::TavisCummings;
  if (s == "hopfield") return ModelKind::Hopfield;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

double ModelSpec::D() const {
  if (D_override) return *D_override;
  return kind == ModelKind::Hopfield ? lambda * lambda / omega_0 : 0.0;
}

void ModelSpec::validate() const {
  if (!(omega_c > 0.0)) throw std::invalid_argument("ModelSpec: omega_c must be > 0");
  if (!(omega_0 > 0.0)) throw std::invalid_argument("ModelSpec: omega_0 must be > 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("ModelSpec: lambda must be >= 0");
  if (N < 1) throw std::invalid_argument("ModelSpec: N must be >= 1");
  if (D_override) {
    if (kind != ModelKind::Hopfield) {
      throw std::invalid_argument("ModelSpec: D override is only valid for the Hopfield model");
    }
    if (!(*D_override >= 0.0)) throw std::invalid_argument("ModelSpec: D override must be >= 0");
  }
}

void AncillaSpec::validate() const {
  if (!(omega_M > 0.0)) throw std::invalid_argument("AncillaSpec: omega_M must be > 0");
  if (!(g_M >= 0.0)) throw std::invalid_argument("AncillaSpec: g_M must be >= 0");
}

namespace {

Matrix eye(int n) { return Matrix::Identity(n, n); }

}  // namespace

OperatorMatrix build_system_hamiltonian(const ModelSpec& model, const SpaceSpec& space) {
  model.validate();
  space.validate();
  if (space.N != model.N) {
    throw std::invalid_argument("build_system_hamiltonian: space.N = " + std::to_string(space.N) +
                                " but model.N = " + std::to_string(model.N));
  }
  const int nb = space.boson_dim();
  const int ns = space.spin_dim();
  const Matrix anc = eye(2);

  const Matrix a = local::boson_annihilator(space.n_max);
  const Matrix x = a + a.transpose();
  const Matrix jp = local::spin(space.N, SpinOp::Jplus);
  const Matrix jm = jp.transpose();
  const double c = model.lambda / std::sqrt(static_cast<double>(model.N));

  Matrix local_bare = model.omega_c * (a.transpose() * a);
  Matrix h = embed(space, local_bare, eye(ns), anc, "").entries;
  h += embed(space, eye(nb), model.omega_0 * local::spin(space.N, SpinOp::Jz), anc, "").entries;

  if (c != 0.0) {
    if (model.kind == ModelKind::TavisCummings) {
      h += embed(space, c * a.transpose(), jm, anc, "").entries;
      h += embed(space, c * a, jp, anc, "").entries;
    } else {
      h += embed(space, c * x, jp + jm, anc, "").entries;
    }
  }
  // (a+a†)² as the square of the truncated quadrature.
  const double d = model.kind == ModelKind::Hopfield ? model.D() : 0.0;
  if (d != 0.0) {
    h += embed(space, d * (x * x), eye(ns), anc, "").entries;
  }
  return {std::move(h), "H_" + to_string(model.kind)};
}

OperatorMatrix build_full_hamiltonian(const ModelSpec& model, const AncillaSpec& ancilla,
                                      const SpaceSpec& space) {
  ancilla.validate();
  if (!space.include_ancilla) {
    throw std::invalid_argument("build_full_hamiltonian: space has no ancilla factor");
  }
  OperatorMatrix h = build_system_hamiltonian(model, space);
  const int nb = space.boson_dim();
  const int ns = space.spin_dim();
  const Matrix a = local::boson_annihilator(space.n_max);
  h.entries += embed(space, eye(nb), eye(ns), 0.5 * ancilla.omega_M * local::pauli(PauliOp::Z), "").entries;
  if (ancilla.g_M != 0.0) {
    h.entries += embed(space, ancilla.g_M * (a + a.transpose()), eye(ns), local::pauli(PauliOp::X), "").entries;
  }
  h.label = "H_" + to_string(model.kind) + "+M";
  return h;
}

double check_symmetry(const OperatorMatrix& H, const OperatorMatrix& S) {
  if (H.dim() != S.dim()) throw std::invalid_argument("check_symmetry: dimension mismatch");
  return max_abs(H.entries * S.entries - S.entries * H.entries);
}

}  // namespace vprobe
