#include "oracles.hpp"
#include "vprobe/hilbert.hpp"

#include <doctest.h>

#include <random>

using namespace vprobe;

namespace {

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Vector random_state(Index dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = dist(rng);
  return v.normalized();
}

}  // namespace

TEST_SUITE("hilbert") {
  TEST_CASE("dimension and index layout") {
    const SpaceSpec s{4, 3, true};
    CHECK(s.dim() == 5 * 4 * 2);
    CHECK(s.index(0, 0, 0) == 0);
    CHECK(s.index(0, 0, 1) == 1);
    CHECK(s.index(0, 1, 0) == 2);
    CHECK(s.index(1, 0, 0) == 8);
    CHECK(SpaceSpec{4, 3, false}.dim() == 20);
    CHECK(s.system_only() == SpaceSpec{4, 3, false});
  }

  TEST_CASE("invalid spaces are rejected") {
    CHECK_THROWS_AS(SpaceSpec({0, 1, false}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(SpaceSpec({2, 0, false}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(boson_annihilator(SpaceSpec{0, 1, false}), std::invalid_argument);
  }

  TEST_CASE("boson annihilator entries") {
    const Matrix a1 = boson_annihilator(SpaceSpec{1, 1, false}).entries;
    // single-factor view: N=1 adds a 2-dim spin factor, so look at the local matrix
    const Matrix l1 = local::boson_annihilator(1);
    CHECK(l1.rows() == 2);
    CHECK(l1(0, 1) == doctest::Approx(1.0));
    CHECK(l1.cwiseAbs().sum() == doctest::Approx(1.0));
    CHECK(a1.rows() == 4);

    const Matrix l2 = local::boson_annihilator(2);
    CHECK(l2(1, 2) == doctest::Approx(1.41421356).epsilon(1e-9));

    const Matrix num = l2.transpose() * l2;
    for (int n = 0; n <= 2; ++n) CHECK(num(n, n) == doctest::Approx(n));
  }

  TEST_CASE("number operator on the embedded space") {
    const SpaceSpec s{6, 2, true};
    const Matrix a = boson_annihilator(s).entries;
    const Matrix num = a.transpose() * a;
    for (int n = 0; n <= 6; ++n)
      for (int k = 0; k <= 2; ++k)
        for (int q = 0; q < 2; ++q) CHECK(num(s.index(n, k, q), s.index(n, k, q)) == doctest::Approx(n));
  }

  TEST_CASE("boson commutator defect only in the top Fock level") {
    const int n_max = 7;
    const Matrix a = local::boson_annihilator(n_max);
    const Matrix c = commutator(a, Matrix(a.transpose()));
    Matrix expected = Matrix::Identity(n_max + 1, n_max + 1);
    expected(n_max, n_max) = -n_max;
    CHECK((c - expected).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("spin-1/2 matrices") {
    const Matrix jz = local::spin(1, SpinOp::Jz);
    CHECK(jz(0, 0) == doctest::Approx(-0.5));
    CHECK(jz(1, 1) == doctest::Approx(0.5));
    const Matrix jp = local::spin(1, SpinOp::Jplus);
    CHECK(jp(1, 0) == doctest::Approx(1.0));
    CHECK(jp.cwiseAbs().sum() == doctest::Approx(1.0));
  }

  TEST_CASE("ladder entry for N=3 at m=-3/2") {
    const Matrix jp = local::spin(3, SpinOp::Jplus);
    CHECK(jp(1, 0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK((jp - oracle::jplus(3)).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("su(2) algebra for several N") {
    for (int N : {1, 2, 3, 10, 30}) {
      CAPTURE(N);
      const Matrix jp = local::spin(N, SpinOp::Jplus);
      const Matrix jm = local::spin(N, SpinOp::Jminus);
      const Matrix jz = local::spin(N, SpinOp::Jz);
      const Matrix jx = local::spin(N, SpinOp::Jx);
      CHECK((commutator(jp, jm) - 2.0 * jz).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((commutator(jz, jp) - jp).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((commutator(jz, jm) + jm).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((jx - 0.5 * (jp + jm)).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((jm - Matrix(jp.transpose())).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("embedding matches plain Kronecker products") {
    const SpaceSpec s{3, 2, true};
    const Matrix a = local::boson_annihilator(3);
    const Matrix jp = local::spin(2, SpinOp::Jplus);
    const Matrix sx = local::pauli(PauliOp::X);
    const Matrix expected = oracle::kron(oracle::kron(a, jp), sx);
    CHECK((embed(s, a, jp, sx, "x").entries - expected).cwiseAbs().maxCoeff() == 0.0);

    const SpaceSpec no_anc{3, 2, false};
    CHECK((collective_spin(no_anc, SpinOp::Jplus).entries -
           oracle::kron(Matrix::Identity(4, 4), oracle::jplus(2)))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }

  TEST_CASE("apply_embedded agrees with the embedded matrix") {
    const SpaceSpec s{5, 3, true};
    const Matrix b = local::boson_annihilator(5) + Matrix(local::boson_annihilator(5).transpose());
    const Matrix sp = local::spin(3, SpinOp::Jx);
    const Matrix an = local::pauli(PauliOp::Z);
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const Vector psi = random_state(s.dim(), seed);
      const Vector direct = embed(s, b, sp, an, "op").entries * psi;
      CHECK((apply_embedded(s, b, sp, an, psi) - direct).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("operators on different factors commute exactly") {
    const SpaceSpec s{4, 3, true};
    const Matrix a = boson_annihilator(s).entries;
    const Matrix jp = collective_spin(s, SpinOp::Jplus).entries;
    const Matrix sx = ancilla_pauli(s, PauliOp::X).entries;
    CHECK(commutator(a, jp).cwiseAbs().maxCoeff() == 0.0);
    CHECK(commutator(a, sx).cwiseAbs().maxCoeff() == 0.0);
    CHECK(commutator(jp, sx).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("ancilla Pauli operators") {
    const SpaceSpec s{3, 2, true};
    const Matrix sz = ancilla_pauli(s, PauliOp::Z).entries;
    Eigen::SelfAdjointEigenSolver<Matrix> es(sz);
    int minus = 0, plus = 0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (std::abs(es.eigenvalues()(i) + 1.0) < 1e-12) ++minus;
      if (std::abs(es.eigenvalues()(i) - 1.0) < 1e-12) ++plus;
    }
    CHECK(minus == s.dim() / 2);
    CHECK(plus == s.dim() / 2);

    const Matrix sx = ancilla_pauli(s, PauliOp::X).entries;
    CHECK((sx * sx - Matrix::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() < 1e-14);

    const Matrix sp = local::pauli(PauliOp::Plus);
    CHECK(sp(1, 0) == 1.0);
    CHECK(sp.cwiseAbs().sum() == 1.0);
    CHECK((local::pauli(PauliOp::Minus) - Matrix(sp.transpose())).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(ancilla_pauli(SpaceSpec{3, 2, false}, PauliOp::X), std::invalid_argument);
  }

  TEST_CASE("parity operator") {
    const SpaceSpec s{4, 3, true};
    const Matrix p = parity_operator(s).entries;
    CHECK(p(s.index(0, 0, 0), s.index(0, 0, 0)) == 1.0);
    CHECK(p(s.index(1, 0, 0), s.index(1, 0, 0)) == -1.0);
    CHECK(p(s.index(0, 1, 0), s.index(0, 1, 0)) == -1.0);
    CHECK(p(s.index(0, 0, 1), s.index(0, 0, 1)) == -1.0);
    CHECK(p(s.index(1, 1, 1), s.index(1, 1, 1)) == -1.0);
    CHECK((p * p - Matrix::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p - Matrix(p.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("excitation number") {
    const SpaceSpec s{4, 3, true};
    const Matrix e = excitation_number(s).entries;
    CHECK(e(s.index(0, 0, 0), s.index(0, 0, 0)) == 0.0);
    CHECK(e(s.index(1, 0, 0), s.index(1, 0, 0)) == doctest::Approx(1.0));
    CHECK(e(s.index(0, 0, 1), s.index(0, 0, 1)) == 0.0);  // ancilla does not count
    for (Index i = 0; i < s.dim(); ++i) {
      const double v = e(i, i);
      CHECK(v >= 0.0);
      CHECK(std::abs(v - std::round(v)) < 1e-12);
    }
  }

  TEST_CASE("elementary operators are real and observables symmetric") {
    const SpaceSpec s{6, 4, true};
    const Matrix a = boson_annihilator(s).entries;
    CHECK(hermiticity_defect(OperatorMatrix{a + Matrix(a.transpose()), "x"}) < 1e-12);
    CHECK(hermiticity_defect(collective_spin(s, SpinOp::Jx)) < 1e-12);
    CHECK(hermiticity_defect(collective_spin(s, SpinOp::Jz)) < 1e-12);
    CHECK(hermiticity_defect(ancilla_pauli(s, PauliOp::X)) < 1e-12);
    CHECK(identity(s).dim() == s.dim());
  }
}
