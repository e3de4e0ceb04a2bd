#include "netgrad/elliptic.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace netgrad {

namespace {

using Triplet = Eigen::Triplet<double>;
using Vector = Eigen::VectorXd;

double face_average(double a, double b, FaceAveraging mode) {
  if (mode == FaceAveraging::harmonic) {
    const double s = a + b;
    return s > 0.0 ? 2.0 * a * b / s : 0.0;
  }
  return 0.5 * (a + b);
}

void add_edge(std::vector<Triplet>& t, std::size_t p, std::size_t q, double c) {
  const auto ip = static_cast<int>(p);
  const auto iq = static_cast<int>(q);
  t.emplace_back(ip, ip, c);
  t.emplace_back(iq, iq, c);
  t.emplace_back(ip, iq, -c);
  t.emplace_back(iq, ip, -c);
}

std::vector<Triplet> stiffness_triplets(const SymTensorField& a, FaceAveraging mode) {
  const Domain& d = a.domain();
  std::vector<Triplet> t;
  const int nx = d.nodes(0);
  const double hx = d.spacing(0);
  if (d.dim() == 1) {
    t.reserve(4 * static_cast<std::size_t>(nx));
    for (int i = 0; i + 1 < nx; ++i) {
      const double af = face_average(a.at(i).xx, a.at(i + 1).xx, mode);
      add_edge(t, i, i + 1, af / hx);
    }
    return t;
  }

  const int ny = d.nodes(1);
  const double hy = d.spacing(1);
  t.reserve(24 * d.size());
  for (int j = 0; j < ny; ++j) {
    const double row_factor = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i + 1 < nx; ++i) {
      const std::size_t p = d.index(i, j);
      const std::size_t q = d.index(i + 1, j);
      add_edge(t, p, q, row_factor * face_average(a.at(p).xx, a.at(q).xx, mode) * hy / hx);
    }
  }
  for (int i = 0; i < nx; ++i) {
    const double col_factor = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
    for (int j = 0; j + 1 < ny; ++j) {
      const std::size_t p = d.index(i, j);
      const std::size_t q = d.index(i, j + 1);
      add_edge(t, p, q, col_factor * face_average(a.at(p).yy, a.at(q).yy, mode) * hx / hy);
    }
  }
  // Cross term: corners c0=(i,j), c1=(i+1,j), c2=(i,j+1), c3=(i+1,j+1).
  const std::array<double, 4> gx{-0.5 / hx, 0.5 / hx, -0.5 / hx, 0.5 / hx};
  const std::array<double, 4> gy{-0.5 / hy, -0.5 / hy, 0.5 / hy, 0.5 / hy};
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const std::array<std::size_t, 4> c{d.index(i, j), d.index(i + 1, j), d.index(i, j + 1),
                                         d.index(i + 1, j + 1)};
      const double axy = 0.25 * (a.at(c[0]).xy + a.at(c[1]).xy + a.at(c[2]).xy + a.at(c[3]).xy);
      if (axy == 0.0) continue;
      const double scale = axy * hx * hy;
      for (int r = 0; r < 4; ++r) {
        for (int s = 0; s < 4; ++s) {
          t.emplace_back(static_cast<int>(c[r]), static_cast<int>(c[s]),
                         scale * (gx[r] * gy[s] + gy[r] * gx[s]));
        }
      }
    }
  }
  return t;
}

// b . (D grad u) with centered differences, rows at interior nodes only.
void drift_triplets(const SymTensorField& D, const VectorField& b, std::vector<Triplet>& t) {
  const Domain& d = D.domain();
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d.on_boundary(k)) continue;
    const auto bk = b.at(k);
    const Sym2 a = D.at(k);
    const double cx = d.dim() == 1 ? a.xx * bk[0] : a.xx * bk[0] + a.xy * bk[1];
    const int row = static_cast<int>(k);
    const double hx = d.spacing(0);
    t.emplace_back(row, static_cast<int>(k + 1), cx / (2.0 * hx));
    t.emplace_back(row, static_cast<int>(k - 1), -cx / (2.0 * hx));
    if (d.dim() == 2) {
      const double cy = a.xy * bk[0] + a.yy * bk[1];
      const auto stride = static_cast<std::size_t>(d.nodes(0));
      const double hy = d.spacing(1);
      t.emplace_back(row, static_cast<int>(k + stride), cy / (2.0 * hy));
      t.emplace_back(row, static_cast<int>(k - stride), -cy / (2.0 * hy));
    }
  }
}

struct InteriorMap {
  std::vector<int> slot;  // node -> interior slot, -1 on boundary
  std::vector<std::size_t> nodes;
};

InteriorMap interior_map(const Domain& d) {
  InteriorMap m;
  m.slot.assign(d.size(), -1);
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!d.on_boundary(k)) {
      m.slot[k] = static_cast<int>(m.nodes.size());
      m.nodes.push_back(k);
    }
  }
  return m;
}

SymTensorField effective_coefficient(const EllipticProblem& p) {
  if (!p.weight) return p.coefficient;
  if (p.weight->min() <= 0.0) throw NonSPDCoefficient("elliptic weight must be positive");
  return multiply(*p.weight, p.coefficient);
}

// Full node-by-node operator (K / vol + drift); rows on boundary nodes are unused.
SparseMatrix full_operator(const EllipticProblem& p, FaceAveraging mode) {
  const Domain& d = p.coefficient.domain();
  const auto n = static_cast<int>(d.size());
  std::vector<Triplet> t = stiffness_triplets(effective_coefficient(p), mode);
  const double inv_vol = 1.0 / d.cell_volume();
  for (auto& e : t) e = Triplet(e.row(), e.col(), e.value() * inv_vol);
  if (p.drift) drift_triplets(p.coefficient, *p.drift, t);
  SparseMatrix L(n, n);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

double boundary_value(const EllipticProblem& p, std::size_t k) {
  if (const auto* c = std::get_if<double>(&p.boundary)) return *c;
  return std::get<ScalarField>(p.boundary)[k];
}

std::pair<Vector, LinearSolveReport> solve_sparse(const SparseMatrix& A, const Vector& b, const SolverOptions& opts) {
  LinearSolveReport report;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    report.method = "trivial";
    return {Vector::Zero(b.size()), report};
  }
  Vector x;
  if (static_cast<std::size_t>(A.rows()) <= opts.direct_limit) {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) throw SolverDiverged("sparse LU factorization failed: " + lu.lastErrorMessage());
    x = lu.solve(b);
    report.iterations = 1;
    // Two rounds of iterative refinement cover mildly ill-conditioned systems.
    for (int pass = 0; pass < 2 && (A * x - b).norm() > opts.tol * bnorm; ++pass) {
      x += lu.solve(Vector(b - A * x));
      ++report.iterations;
    }
    report.method = "sparse-lu";
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(opts.tol);
    solver.setMaxIterations(opts.max_iterations);
    solver.compute(A);
    x = solver.solve(b);
    report.iterations = static_cast<int>(solver.iterations());
    report.method = "bicgstab-jacobi";
  }
  report.residual = (A * x - b).norm() / bnorm;
  if (!x.allFinite() || report.residual > opts.tol) {
    std::ostringstream msg;
    msg << report.method << " stopped at relative residual " << report.residual << " (tol " << opts.tol << ")";
    throw SolverDiverged(msg.str());
  }
  return {std::move(x), report};
}

}  // namespace

SparseMatrix stiffness_matrix(const SymTensorField& a, FaceAveraging averaging) {
  const auto n = static_cast<int>(a.node_count());
  const auto t = stiffness_triplets(a, averaging);
  SparseMatrix K(n, n);
  K.setFromTriplets(t.begin(), t.end());
  return K;
}

ScalarField apply_diffusion_operator(const SymTensorField& a, const ScalarField& u, FaceAveraging averaging) {
  detail::require_same_domain(a.domain(), u.domain(), "apply_diffusion_operator");
  const Domain& d = a.domain();
  const SparseMatrix K = stiffness_matrix(a, averaging);
  const Eigen::Map<const Vector> x(u.values().data(), static_cast<Eigen::Index>(d.size()));
  const Vector y = K * x;
  ScalarField out(d);
  const double inv_vol = 1.0 / d.cell_volume();
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!d.on_boundary(k)) out[k] = y[static_cast<Eigen::Index>(k)] * inv_vol;
  }
  return out;
}

double dirichlet_form(const SymTensorField& a, const ScalarField& f, const ScalarField& g, FaceAveraging averaging) {
  detail::require_same_domain(a.domain(), f.domain(), "dirichlet_form");
  detail::require_same_domain(a.domain(), g.domain(), "dirichlet_form");
  const auto n = static_cast<Eigen::Index>(a.node_count());
  const SparseMatrix K = stiffness_matrix(a, averaging);
  const Eigen::Map<const Vector> x(f.values().data(), n);
  const Eigen::Map<const Vector> y(g.values().data(), n);
  return x.dot(K * y);
}

void require_spd(const SymTensorField& a, const char* what) {
  const Domain& d = a.domain();
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double lam = min_eigenvalue(a.at(k), d.dim());
    if (!(lam > 0.0)) {
      std::ostringstream msg;
      msg << what << ": coefficient not positive definite at node " << k << " (min eigenvalue " << lam << ")";
      throw NonSPDCoefficient(msg.str());
    }
  }
}

SparseMatrix assemble_interior_operator(const EllipticProblem& p, FaceAveraging averaging) {
  const Domain& d = p.coefficient.domain();
  const InteriorMap map = interior_map(d);
  const SparseMatrix L = full_operator(p, averaging);
  std::vector<Triplet> t;
  for (int col = 0; col < L.outerSize(); ++col) {
    if (map.slot[col] < 0) continue;
    for (SparseMatrix::InnerIterator it(L, col); it; ++it) {
      const int r = map.slot[it.row()];
      if (r >= 0) t.emplace_back(r, map.slot[col], it.value());
    }
  }
  const auto n = static_cast<int>(map.nodes.size());
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

EllipticSolution solve_elliptic(const EllipticProblem& p, const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  const Domain& d = p.coefficient.domain();
  detail::require_same_domain(d, p.rhs.domain(), "solve_elliptic");
  if (p.drift) detail::require_same_domain(d, p.drift->domain(), "solve_elliptic");
  if (!p.rhs.all_finite()) throw InvalidArgument("solve_elliptic: right-hand side is not finite");
  require_spd(effective_coefficient(p), "solve_elliptic");

  const InteriorMap map = interior_map(d);
  const SparseMatrix L = full_operator(p, opts.averaging);
  const auto n = static_cast<int>(map.nodes.size());

  Vector b(n);
  for (int r = 0; r < n; ++r) b[r] = p.rhs[map.nodes[r]];
  std::vector<Triplet> t;
  for (int col = 0; col < L.outerSize(); ++col) {
    const int c = map.slot[col];
    const double g = c < 0 ? boundary_value(p, static_cast<std::size_t>(col)) : 0.0;
    for (SparseMatrix::InnerIterator it(L, col); it; ++it) {
      const int r = map.slot[it.row()];
      if (r < 0) continue;
      if (c >= 0) {
        t.emplace_back(r, c, it.value());
      } else {
        b[r] -= it.value() * g;
      }
    }
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());

  auto [x, report] = solve_sparse(A, b, opts);
  ScalarField u(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    u[k] = map.slot[k] < 0 ? boundary_value(p, k) : x[map.slot[k]];
  }
  return {std::move(u), report};
}

BlockSolution solve_block_sigma_eta(const SymTensorField& D, const ScalarField& u, const ScalarField& phi, double z,
                                    const ScalarField& rhs, const SolverOptions& opts) {
  const Domain& d = D.domain();
  detail::require_same_domain(d, u.domain(), "solve_block_sigma_eta");
  detail::require_same_domain(d, phi.domain(), "solve_block_sigma_eta");
  detail::require_same_domain(d, rhs.domain(), "solve_block_sigma_eta");
  require_spd(D, "solve_block_sigma_eta");
  if (!(u.min() > 0.0)) throw PositivityLost("solve_block_sigma_eta: density must be positive");

  const InteriorMap map = interior_map(d);
  const auto n = static_cast<int>(map.nodes.size());
  const double inv_vol = 1.0 / d.cell_volume();

  // Full-node blocks, then restricted to interior rows and columns.
  std::vector<Triplet> t11 = stiffness_triplets(D, opts.averaging);
  for (auto& e : t11) e = Triplet(e.row(), e.col(), e.value() * inv_vol);
  if (z != 0.0) drift_triplets(D, z * gradient(phi), t11);
  std::vector<Triplet> t21 = stiffness_triplets(multiply(u, D), opts.averaging);
  std::vector<Triplet> t22 = stiffness_triplets(SymTensorField::identity(d), opts.averaging);

  std::vector<Triplet> t;
  t.reserve(t11.size() + t21.size() + t22.size() + static_cast<std::size_t>(n));
  auto place = [&](const std::vector<Triplet>& src, double scale, int row_off, int col_off) {
    for (const auto& e : src) {
      const int r = map.slot[e.row()];
      const int c = map.slot[e.col()];
      if (r >= 0 && c >= 0) t.emplace_back(row_off + r, col_off + c, scale * e.value());
    }
  };
  place(t11, 1.0, 0, 0);
  place(t21, inv_vol, n, 0);
  place(t22, inv_vol, n, n);
  for (int r = 0; r < n; ++r) t.emplace_back(r, n + r, -z * z);

  SparseMatrix A(2 * n, 2 * n);
  A.setFromTriplets(t.begin(), t.end());
  Vector b = Vector::Zero(2 * n);
  for (int r = 0; r < n; ++r) b[r] = rhs[map.nodes[r]];

  auto [x, report] = solve_sparse(A, b, opts);
  BlockSolution out{ScalarField(d), ScalarField(d), report};
  for (int r = 0; r < n; ++r) {
    out.sigma[map.nodes[r]] = x[r];
    out.eta[map.nodes[r]] = x[n + r];
  }
  return out;
}

}  // namespace netgrad
