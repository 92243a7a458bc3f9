#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "rks/lattice.hpp"
#include "rks/operators.hpp"

using namespace rks;

namespace {

struct Fixture {
  GaugeSector sector;
  testor::FlatGeometry fg;
  Fixture(int lx, int ly) : fg{lx, ly} { sector = enumerate_gauge_sector(build_geometry(lx, ly)); }
};

}  // namespace

TEST_CASE("hamiltonian matches the from-scratch dense assembly") {
  for (auto [lx, ly] : {std::pair{2, 2}, std::pair{4, 2}}) {
    Fixture f(lx, ly);
    for (double lambda : {0.3, 1.0, 2.5}) {
      auto op = build_hamiltonian(f.sector, lambda);
      Eigen::MatrixXd ref = testor::dense_hamiltonian(f.fg, f.sector.configs, lambda);
      CHECK((op.to_dense() - ref).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(op.lambda == lambda);
      CHECK(op.dim == f.sector.dim());
    }
  }
}

TEST_CASE("kinetic and potential split reproduces the hamiltonian") {
  Fixture f(4, 2);
  auto kin = build_kinetic(f.sector);
  auto pe = build_potential(f.sector, PotentialParity::Even);
  auto po = build_potential(f.sector, PotentialParity::Odd);
  auto pb = build_potential(f.sector, PotentialParity::Both);
  double lambda = 1.7;
  auto h = build_hamiltonian(f.sector, lambda);
  Eigen::MatrixXd sum = kin.to_dense() + lambda * (pe.to_dense() + po.to_dense());
  CHECK((h.to_dense() - sum).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((pb.to_dense() - pe.to_dense() - po.to_dense()).cwiseAbs().maxCoeff() < 1e-14);
  // potential terms are diagonal, kinetic is hollow with -1 entries
  Eigen::MatrixXd kd = kin.to_dense();
  CHECK(kd.diagonal().cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < kd.rows(); ++i)
    for (int j = 0; j < kd.cols(); ++j)
      CHECK((kd(i, j) == 0.0 || kd(i, j) == -1.0));
  CHECK((pe.to_dense() - Eigen::MatrixXd(pe.to_dense().diagonal().asDiagonal()))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("operators are symmetric with the documented traces") {
  Fixture f(4, 2);
  auto kin = build_kinetic(f.sector);
  auto pb = build_potential(f.sector, PotentialParity::Both);
  Eigen::MatrixXd kd = kin.to_dense();
  CHECK((kd - kd.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(kin.trace() == 0.0);
  double flips = 0;
  for (Word w : f.sector.configs)
    for (int py = 0; py < f.fg.ly; ++py)
      for (int px = 0; px < f.fg.lx; ++px)
        if (f.fg.plaquette_pattern(w, px, py) >= 0) flips += 1.0;
  CHECK(pb.trace() == doctest::Approx(flips).epsilon(1e-14));
  CHECK(kin.frobenius_norm() == doctest::Approx(kd.norm()).epsilon(1e-13));
}

TEST_CASE("kinetic and potential do not commute globally") {
  Fixture f(4, 2);
  Eigen::MatrixXd k = build_kinetic(f.sector).to_dense();
  Eigen::MatrixXd v = build_potential(f.sector, PotentialParity::Both).to_dense();
  CHECK((k * v - v * k).norm() > 1.0);
}

TEST_CASE("apply agrees with the dense matrix on vectors and matrices") {
  Fixture f(4, 2);
  auto h = build_hamiltonian(f.sector, 0.9);
  Eigen::MatrixXd hd = h.to_dense();
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(f.sector.dim());
  for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  CHECK((h.apply(v) - hd * v).norm() < 1e-12 * v.norm());
  Eigen::MatrixXd m(f.sector.dim(), 3);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = gauss(rng);
  CHECK((h.apply(m) - hd * m).norm() < 1e-12 * m.norm());
  Eigen::VectorXd u = v.normalized();
  CHECK(expectation(h, u) == doctest::Approx(u.dot(hd * u)).epsilon(1e-12));
}

TEST_CASE("diagonalize matches an independent eigensolve") {
  for (auto [lx, ly] : {std::pair{2, 2}, std::pair{4, 2}}) {
    Fixture f(lx, ly);
    double lambda = 1.0;
    auto h = build_hamiltonian(f.sector, lambda);
    auto spec = diagonalize(h);
    REQUIRE(spec.dim() == f.sector.dim());
    CHECK(spec.lambda == lambda);
    CHECK(std::is_sorted(spec.eigenvalues.data(), spec.eigenvalues.data() + spec.dim()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        testor::dense_hamiltonian(f.fg, f.sector.configs, lambda));
    CHECK((spec.eigenvalues - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    // orthonormal eigenbasis with tight residuals
    Eigen::MatrixXd vtv = spec.eigenvectors.transpose() * spec.eigenvectors;
    CHECK((vtv - Eigen::MatrixXd::Identity(spec.dim(), spec.dim())).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(max_eigenpair_residual(h, spec) < 1e-10 * std::max(1.0, h.frobenius_norm()));
    // RK point: H is a sum of projectors, so the spectrum starts at zero
    CHECK(spec.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(spec.eigenvalues(0) > -1e-12);
  }
}

TEST_CASE("expectation demands a normalized state") {
  Fixture f(2, 2);
  auto h = build_hamiltonian(f.sector, 1.0);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(f.sector.dim());
  CHECK_THROWS_AS(expectation(h, v), std::invalid_argument);
}
