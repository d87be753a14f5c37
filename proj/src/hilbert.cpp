#include "vprobe/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace vprobe {

Index SpaceSpec::dim() const {
  return static_cast<Index>(boson_dim()) * spin_dim() * ancilla_dim();
}

Index SpaceSpec::index(int n, int k, int s) const {
  return (static_cast<Index>(n) * spin_dim() + k) * ancilla_dim() + s;
}

SpaceSpec SpaceSpec::system_only() const {
  SpaceSpec out = *this;
  out.include_ancilla = false;
  return out;
}

void SpaceSpec::validate() const {
  if (n_max < 1) {
    throw std::invalid_argument("SpaceSpec: n_max must be >= 1, got " + std::to_string(n_max));
  }
  if (N < 1) {
    throw std::invalid_argument("SpaceSpec: N must be >= 1, got " + std::to_string(N));
  }
}

namespace local {

Matrix boson_annihilator(int n_max) {
  Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

Matrix spin(int N, SpinOp which) {
  const double j = 0.5 * N;
  Matrix jz = Matrix::Zero(N + 1, N + 1);
  Matrix jp = Matrix::Zero(N + 1, N + 1);
  for (int k = 0; k <= N; ++k) {
    const double m = -j + k;
    jz(k, k) = m;
    if (k < N) {
      jp(k + 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
  }
  switch (which) {
    case SpinOp::Jz:
      return jz;
    case SpinOp::Jplus:
      return jp;
    case SpinOp::Jminus:
      return jp.transpose();
    case SpinOp::Jx:
      return 0.5 * (jp + jp.transpose());
  }
  throw std::invalid_argument("unknown spin operator");
}

Matrix pauli(PauliOp which) {
  // index 0 = |down>, 1 = |up>
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case PauliOp::X:
      m(0, 1) = m(1, 0) = 1.0;
      break;
    case PauliOp::Z:
      m(0, 0) = -1.0;
      m(1, 1) = 1.0;
      break;
    case PauliOp::Plus:
      m(1, 0) = 1.0;
      break;
    case PauliOp::Minus:
      m(0, 1) = 1.0;
      break;
  }
  return m;
}

}  // namespace local

OperatorMatrix embed(const SpaceSpec& space, const Matrix& boson, const Matrix& spin,
                     const Matrix& ancilla, std::string label) {
  space.validate();
  const int nb = space.boson_dim();
  const int ns = space.spin_dim();
  const int na = space.ancilla_dim();
  if (boson.rows() != nb || boson.cols() != nb || spin.rows() != ns || spin.cols() != ns) {
    throw std::invalid_argument("embed: factor dimensions do not match the space");
  }
  if (space.include_ancilla && (ancilla.rows() != 2 || ancilla.cols() != 2)) {
    throw std::invalid_argument("embed: ancilla factor must be 2x2");
  }
  const Matrix one = Matrix::Identity(1, 1);
  const Matrix& anc = space.include_ancilla ? ancilla : one;

  OperatorMatrix out{Matrix::Zero(space.dim(), space.dim()), std::move(label)};
  for (int n2 = 0; n2 < nb; ++n2) {
    for (int n1 = 0; n1 < nb; ++n1) {
      const double b = boson(n1, n2);
      if (b == 0.0) continue;
      for (int k2 = 0; k2 < ns; ++k2) {
        for (int k1 = 0; k1 < ns; ++k1) {
          const double bs = b * spin(k1, k2);
          if (bs == 0.0) continue;
          for (int s2 = 0; s2 < na; ++s2) {
            for (int s1 = 0; s1 < na; ++s1) {
              const double v = bs * anc(s1, s2);
              if (v == 0.0) continue;
              out.entries(space.index(n1, k1, s1), space.index(n2, k2, s2)) = v;
            }
          }
        }
      }
    }
  }
  return out;
}

Vector apply_embedded(const SpaceSpec& space, const Matrix& boson, const Matrix& spin,
                      const Matrix& ancilla, const Vector& psi) {
  const int nb = space.boson_dim();
  const int ns = space.spin_dim();
  const int na = space.ancilla_dim();
  if (psi.size() != space.dim()) throw std::invalid_argument("apply_embedded: state dimension mismatch");
  const Matrix one = Matrix::Identity(1, 1);
  const Matrix& anc = space.include_ancilla ? ancilla : one;
  Vector out = Vector::Zero(psi.size());
  for (int n2 = 0; n2 < nb; ++n2) {
    for (int n1 = 0; n1 < nb; ++n1) {
      const double b = boson(n1, n2);
      if (b == 0.0) continue;
      for (int k2 = 0; k2 < ns; ++k2) {
        for (int k1 = 0; k1 < ns; ++k1) {
          const double bs = b * spin(k1, k2);
          if (bs == 0.0) continue;
          for (int s2 = 0; s2 < na; ++s2) {
            for (int s1 = 0; s1 < na; ++s1) {
              const double v = bs * anc(s1, s2);
              if (v != 0.0) out(space.index(n1, k1, s1)) += v * psi(space.index(n2, k2, s2));
            }
          }
        }
      }
    }
  }
  return out;
}

OperatorMatrix identity(const SpaceSpec& space) {
  space.validate();
  return {Matrix::Identity(space.dim(), space.dim()), "1"};
}

OperatorMatrix boson_annihilator(const SpaceSpec& space) {
  space.validate();
  return embed(space, local::boson_annihilator(space.n_max), Matrix::Identity(space.spin_dim(), space.spin_dim()),
               Matrix::Identity(2, 2), "a");
}

OperatorMatrix collective_spin(const SpaceSpec& space, SpinOp which) {
  space.validate();
  static constexpr const char* names[] = {"Jz", "J+", "J-", "Jx"};
  return embed(space, Matrix::Identity(space.boson_dim(), space.boson_dim()), local::spin(space.N, which),
               Matrix::Identity(2, 2), names[static_cast<int>(which)]);
}

OperatorMatrix ancilla_pauli(const SpaceSpec& space, PauliOp which) {
  space.validate();
  if (!space.include_ancilla) {
    throw std::invalid_argument("ancilla_pauli: space has no ancilla factor");
  }
  static constexpr const char* names[] = {"sx_M", "sz_M", "s+_M", "s-_M"};
  return embed(space, Matrix::Identity(space.boson_dim(), space.boson_dim()),
               Matrix::Identity(space.spin_dim(), space.spin_dim()), local::pauli(which),
               names[static_cast<int>(which)]);
}

OperatorMatrix parity_operator(const SpaceSpec& space) {
  space.validate();
  OperatorMatrix out{Matrix::Zero(space.dim(), space.dim()), "parity"};
  for (int n = 0; n < space.boson_dim(); ++n) {
    for (int k = 0; k < space.spin_dim(); ++k) {
      for (int s = 0; s < space.ancilla_dim(); ++s) {
        const Index i = space.index(n, k, s);
        out.entries(i, i) = ((n + k + s) % 2 == 0) ? 1.0 : -1.0;
      }
    }
  }
  return out;
}

OperatorMatrix excitation_number(const SpaceSpec& space) {
  space.validate();
  OperatorMatrix out{Matrix::Zero(space.dim(), space.dim()), "N_exc"};
  for (int n = 0; n < space.boson_dim(); ++n) {
    for (int k = 0; k < space.spin_dim(); ++k) {
      for (int s = 0; s < space.ancilla_dim(); ++s) {
        const Index i = space.index(n, k, s);
        out.entries(i, i) = n + k;
      }
    }
  }
  return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const OperatorMatrix& op) {
  return max_abs(op.entries - op.entries.transpose());
}

}  // namespace vprobe
