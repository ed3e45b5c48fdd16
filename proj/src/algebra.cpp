#include "tdfs/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tdfs {
namespace {

void require_same_dim(std::span<const Ket> kets, const char* what) {
  if (kets.empty()) return;
  const auto n = kets.front().size();
  for (const auto& k : kets) {
    if (k.size() != n) throw DimensionMismatch(std::string(what) + ": kets of different dimension");
  }
}

// Removes the components of w along every vector in basis, twice.
void project_out(Ket& w, std::span<const Ket> basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) w -= q * q.dot(w);
  }
}

// Single-linkage clusters of complex values closer than radius.
std::vector<std::vector<Complex>> cluster(std::vector<Complex> values, double radius) {
  std::vector<std::vector<Complex>> groups;
  std::vector<bool> used(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (used[i]) continue;
    std::vector<Complex> group{values[i]};
    used[i] = true;
    for (std::size_t g = 0; g < group.size(); ++g) {
      for (std::size_t j = 0; j < values.size(); ++j) {
        if (!used[j] && std::abs(values[j] - group[g]) <= radius) {
          used[j] = true;
          group.push_back(values[j]);
        }
      }
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

Complex mean(const std::vector<Complex>& v) {
  Complex s{0.0, 0.0};
  for (const auto& x : v) s += x;
  return s / static_cast<double>(v.size());
}

bool contained_in(std::span<const Ket> candidate, std::span<const Ket> space) {
  for (const auto& v : candidate) {
    Ket w = v;
    project_out(w, space);
    if (w.norm() > 1e-6) return false;
  }
  return true;
}

}  // namespace

ComplexMatrix as_columns(std::span<const Ket> kets) {
  require_same_dim(kets, "as_columns");
  if (kets.empty()) return ComplexMatrix(0, 0);
  ComplexMatrix m(kets.front().size(), static_cast<Eigen::Index>(kets.size()));
  for (std::size_t j = 0; j < kets.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = kets[j];
  return m;
}

std::vector<Ket> columns_of(const ComplexMatrix& m) {
  std::vector<Ket> out;
  out.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.emplace_back(m.col(j));
  return out;
}

ComplexMatrix outer(const Ket& a, const Ket& b) { return a * b.adjoint(); }

double hermiticity_deviation(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw NonSquare("hermiticity_deviation: matrix is not square");
  return (a - a.adjoint()).norm();
}

void fix_phase(Ket& v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  double best_mag = std::abs(v(0));
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > best_mag * (1.0 + 1e-12)) {
      best = i;
      best_mag = mag;
    }
  }
  if (best_mag == 0.0) return;
  v *= std::conj(v(best)) / best_mag;
  v(best) = Complex(std::abs(v(best)), 0.0);
}

std::vector<Ket> gram_schmidt(std::span<const Ket> vectors, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("gram_schmidt: tol must be positive");
  require_same_dim(vectors, "gram_schmidt");
  double largest = 0.0;
  for (const auto& v : vectors) largest = std::max(largest, v.norm());
  const double threshold = tol * largest;

  std::vector<Ket> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    Ket w = v;
    project_out(w, out);
    const double n = w.norm();
    if (!(n > threshold)) throw DegenerateSet("gram_schmidt: input vectors are linearly dependent");
    out.emplace_back(w / n);
  }
  return out;
}

std::vector<Ket> complete_basis(std::span<const Ket> orthonormal, std::size_t dim) {
  require_same_dim(orthonormal, "complete_basis");
  if (!orthonormal.empty() && static_cast<std::size_t>(orthonormal.front().size()) != dim) {
    throw DimensionMismatch("complete_basis: ket dimension does not match target dimension");
  }
  if (orthonormal.size() > dim) throw DegenerateSet("complete_basis: more vectors than dimensions");

  std::vector<Ket> all(orthonormal.begin(), orthonormal.end());
  std::vector<Ket> extra;
  const auto n = static_cast<Eigen::Index>(dim);
  while (all.size() < dim) {
    Ket best;
    double best_norm = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Ket w = Ket::Unit(n, i);
      project_out(w, all);
      const double wn = w.norm();
      if (wn > best_norm * (1.0 + 1e-12)) {
        best_norm = wn;
        best = std::move(w);
      }
    }
    best /= best_norm;
    all.push_back(best);
    extra.push_back(std::move(best));
  }
  return extra;
}

ComplexMatrix matrix_exponential(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw NonSquare("matrix_exponential: matrix is not square");
  const auto n = a.rows();
  if (n == 0) return a;
  if (!a.allFinite()) throw InvalidArgument("matrix_exponential: non-finite entries");

  // Higham (2005) degree-13 coefficients and scaling threshold.
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const ComplexMatrix as = a / std::ldexp(1.0, squarings);

  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix a2 = as * as;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a4 * a2;

  const ComplexMatrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                                b[3] * a2 + b[1] * id;
  const ComplexMatrix u = as * u_inner;
  const ComplexMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                          b[2] * a2 + b[0] * id;

  ComplexMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

std::vector<Ket> canonical_basis(const ComplexMatrix& q, double pivot_tol) {
  ComplexMatrix b = q;
  const auto rows = b.rows();
  const auto cols = b.cols();
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < cols; ++i) {
    // First component (in index order) that is still significant among the
    // unreduced columns becomes the next pivot.
    Eigen::Index pivot_col = -1;
    for (; row < rows && pivot_col < 0; ++row) {
      double best = pivot_tol;
      for (Eigen::Index j = i; j < cols; ++j) {
        if (std::abs(b(row, j)) > best) {
          best = std::abs(b(row, j));
          pivot_col = j;
        }
      }
      if (pivot_col >= 0) break;
    }
    if (pivot_col < 0) break;
    b.col(i).swap(b.col(pivot_col));
    b.col(i) /= b(row, i);
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (j != i) b.col(j) -= b(row, j) * b.col(i);
    }
    ++row;
  }

  std::vector<Ket> out;
  out.reserve(static_cast<std::size_t>(cols));
  for (Eigen::Index j = 0; j < cols; ++j) {
    Ket w = b.col(j);
    project_out(w, out);
    const double n = w.norm();
    if (n < 1e-12) throw DegenerateSet("canonical_basis: input columns are rank deficient");
    w /= n;
    fix_phase(w);
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<Ket> null_space(const ComplexMatrix& a, double tol) {
  const auto n = a.cols();
  if (n == 0) return {};
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i >= sv.size() || sv(i) <= tol) idx.push_back(i);
  }
  if (idx.empty()) return {};
  ComplexMatrix q(n, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) q.col(static_cast<Eigen::Index>(k)) = svd.matrixV().col(idx[k]);
  return canonical_basis(q);
}

std::vector<Ket> joint_eigenspace(std::span<const ComplexMatrix> ops, std::span<const Complex> eigenvalues,
                                  double tol) {
  if (ops.empty()) throw InvalidArgument("joint_eigenspace: no operators");
  if (ops.size() != eigenvalues.size()) throw DimensionMismatch("joint_eigenspace: one eigenvalue per operator");
  const auto n = ops.front().rows();
  for (const auto& op : ops) {
    if (op.rows() != op.cols()) throw NonSquare("joint_eigenspace: operator is not square");
    if (op.rows() != n) throw DimensionMismatch("joint_eigenspace: operators of different dimension");
  }
  ComplexMatrix stacked(n * static_cast<Eigen::Index>(ops.size()), n);
  for (std::size_t k = 0; k < ops.size(); ++k) {
    stacked.middleRows(static_cast<Eigen::Index>(k) * n, n) =
        ops[k] - eigenvalues[k] * ComplexMatrix::Identity(n, n);
  }
  return null_space(stacked, tol);
}

std::vector<JointEigenspace> joint_eigenspaces(std::span<const ComplexMatrix> ops, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("joint_eigenspaces: tol must be positive");
  if (ops.empty()) return {};
  const auto n = ops.front().rows();
  for (const auto& op : ops) {
    if (op.rows() != op.cols()) throw NonSquare("joint_eigenspaces: operator is not square");
    if (op.rows() != n) throw DimensionMismatch("joint_eigenspaces: operators of different dimension");
  }

  std::vector<JointEigenspace> current{{{}, columns_of(ComplexMatrix::Identity(n, n))}};
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto prefix = ops.subspan(0, k + 1);
    std::vector<JointEigenspace> next;
    for (const auto& parent : current) {
      const ComplexMatrix q = as_columns(parent.basis);
      const ComplexMatrix compressed = q.adjoint() * ops[k] * q;
      Eigen::ComplexEigenSolver<ComplexMatrix> es(compressed, false);
      std::vector<Complex> values(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());

      // Eigenvalues of a defective block scatter by ~eps^(1/m); the mean of a
      // loose cluster recovers them, while tight clusters handle ordinary
      // (numerically split) degeneracy.
      const double scale = std::max(1.0, compressed.norm());
      std::vector<Complex> candidates;
      for (const auto& g : cluster(values, tol)) candidates.push_back(mean(g));
      for (const auto& g : cluster(values, 1e-3 * scale)) {
        if (g.size() > 1) candidates.push_back(mean(g));
      }

      std::vector<JointEigenspace> found;
      for (const auto& c : candidates) {
        std::vector<Complex> tuple = parent.eigenvalues;
        tuple.push_back(c);
        auto basis = joint_eigenspace(prefix, tuple, tol);
        if (basis.empty()) continue;
        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const JointEigenspace& f) {
          return std::abs(f.eigenvalues.back() - c) <= 1e-3 * scale && contained_in(basis, f.basis);
        });
        if (duplicate) continue;
        // Rayleigh-quotient estimate of each eigenvalue over the found space.
        for (std::size_t m = 0; m <= k; ++m) {
          Complex acc{0.0, 0.0};
          for (const auto& v : basis) acc += v.dot(ops[m] * v);
          tuple[m] = acc / static_cast<double>(basis.size());
        }
        found.push_back({std::move(tuple), std::move(basis)});
      }
      for (auto& f : found) next.push_back(std::move(f));
    }
    current = std::move(next);
  }

  std::sort(current.begin(), current.end(), [](const JointEigenspace& a, const JointEigenspace& b) {
    for (std::size_t m = 0; m < a.eigenvalues.size(); ++m) {
      if (a.eigenvalues[m].real() != b.eigenvalues[m].real()) return a.eigenvalues[m].real() < b.eigenvalues[m].real();
      if (a.eigenvalues[m].imag() != b.eigenvalues[m].imag()) return a.eigenvalues[m].imag() < b.eigenvalues[m].imag();
    }
    return false;
  });
  return current;
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw NonSquare("hermitian_eigenvalues: matrix is not square");
  const ComplexMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace tdfs
