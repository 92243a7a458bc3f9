#include "rks/operators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rks {

Eigen::VectorXd SectorOperator::apply(const Eigen::VectorXd& v) const {
  if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("operator/vector dimension mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    double acc = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += val[k] * v[col[k]];
    out[i] = acc;
  }
  return out;
}

Eigen::MatrixXd SectorOperator::apply(const Eigen::MatrixXd& m) const {
  if (static_cast<int>(m.rows()) != dim) throw std::invalid_argument("operator/matrix dimension mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, m.cols());
  for (int i = 0; i < dim; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      out.row(i) += val[k] * m.row(col[k]);
    }
  }
  return out;
}

Eigen::MatrixXd SectorOperator::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) m(i, col[k]) += val[k];
  }
  return m;
}

double SectorOperator::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col[k] == i) t += val[k];
    }
  }
  return t;
}

double SectorOperator::frobenius_norm() const {
  double s = 0.0;
  for (double x : val) s += x * x;
  return std::sqrt(s);
}

namespace {

SectorOperator from_rows(SectorOperator::Kind kind, double lambda, int dim,
                         std::vector<std::vector<std::pair<int, double>>>&& rows) {
  SectorOperator op;
  op.kind = kind;
  op.lambda = lambda;
  op.dim = dim;
  op.row_ptr.assign(static_cast<std::size_t>(dim) + 1, 0);
  std::size_t nnz = 0;
  for (auto& row : rows) nnz += row.size();
  op.col.reserve(nnz);
  op.val.reserve(nnz);
  for (int i = 0; i < dim; ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    std::sort(row.begin(), row.end());
    for (const auto& [j, x] : row) {
      op.col.push_back(j);
      op.val.push_back(x);
    }
    op.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<int>(op.col.size());
  }
  return op;
}

std::vector<std::vector<std::pair<int, double>>> kinetic_rows(const GaugeSector& s) {
  const auto& g = s.geometry;
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(s.dim()));
  for (int i = 0; i < s.dim(); ++i) {
    const Word c = s.configs[static_cast<std::size_t>(i)];
    for (int p = 0; p < g.num_plaquettes(); ++p) {
      if (!plaquette_flippable(g, c, p)) continue;
      const int j = s.index_of(flip_plaquette(g, c, p));
      if (j < 0) throw std::logic_error("plaquette flip left the gauge sector");
      rows[static_cast<std::size_t>(i)].emplace_back(j, -1.0);
    }
  }
  return rows;
}

std::vector<std::vector<std::pair<int, double>>> potential_rows(const GaugeSector& s,
                                                                PotentialParity parity) {
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(s.dim()));
  for (int i = 0; i < s.dim(); ++i) {
    const auto [even, odd] = flippable_counts(s.geometry, s.configs[static_cast<std::size_t>(i)]);
    double d = 0.0;
    if (parity == PotentialParity::Even) d = even;
    else if (parity == PotentialParity::Odd) d = odd;
    else d = even + odd;
    if (d != 0.0) rows[static_cast<std::size_t>(i)].emplace_back(i, d);
  }
  return rows;
}

}  // namespace

SectorOperator build_kinetic(const GaugeSector& s) {
  if (s.dim() == 0) throw std::invalid_argument("empty gauge sector");
  return from_rows(SectorOperator::Kind::Kinetic, 0.0, s.dim(), kinetic_rows(s));
}

SectorOperator build_potential(const GaugeSector& s, PotentialParity parity) {
  SectorOperator::Kind kind = SectorOperator::Kind::PotentialBoth;
  if (parity == PotentialParity::Even) kind = SectorOperator::Kind::PotentialEven;
  if (parity == PotentialParity::Odd) kind = SectorOperator::Kind::PotentialOdd;
  return from_rows(kind, 0.0, s.dim(), potential_rows(s, parity));
}

SectorOperator build_hamiltonian(const GaugeSector& s, double lambda) {
  auto rows = kinetic_rows(s);
  const auto diag = potential_rows(s, PotentialParity::Both);
  for (int i = 0; i < s.dim(); ++i) {
    for (const auto& [j, d] : diag[static_cast<std::size_t>(i)]) {
      rows[static_cast<std::size_t>(i)].emplace_back(j, lambda * d);
    }
  }
  return from_rows(SectorOperator::Kind::Hamiltonian, lambda, s.dim(), std::move(rows));
}

double max_eigenpair_residual(const SectorOperator& op, const Spectrum& spec) {
  const Eigen::MatrixXd hv = op.apply(spec.eigenvectors);
  double worst = 0.0;
  for (int k = 0; k < spec.dim(); ++k) {
    worst = std::max(worst, (hv.col(k) - spec.eigenvalues[k] * spec.eigenvectors.col(k)).norm());
  }
  return worst;
}

Spectrum diagonalize(const SectorOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.to_dense());
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "symmetric eigensolver did not converge (dim " << op.dim << ", ||A||_F "
        << op.frobenius_norm() << ")";
    throw std::runtime_error(msg.str());
  }
  Spectrum spec{solver.eigenvalues(), solver.eigenvectors(), op.lambda};

  const double residual = max_eigenpair_residual(op, spec);
  const double scale = std::max(op.frobenius_norm(), 1.0);
  const double ortho = (spec.eigenvectors.transpose() * spec.eigenvectors -
                        Eigen::MatrixXd::Identity(op.dim, op.dim))
                           .cwiseAbs()
                           .maxCoeff();
  if (residual > 1e-10 * scale || ortho > 1e-10) {
    std::ostringstream msg;
    msg << "eigendecomposition out of tolerance: residual " << residual << " (limit "
        << 1e-10 * scale << "), orthonormality defect " << ortho;
    throw std::runtime_error(msg.str());
  }
  return spec;
}

double expectation(const SectorOperator& op, const Eigen::VectorXd& v) {
  if (std::abs(v.norm() - 1.0) > 1e-12) throw std::invalid_argument("state vector must be normalized");
  return v.dot(op.apply(v));
}

}  // namespace rks
