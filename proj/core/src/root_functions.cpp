#include "slspec/root_functions.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "slspec/parallel.hpp"

namespace slspec {

namespace {

using Mat2 = Eigen::Matrix<cplx, 2, 2>;

SolutionTrace combine(const SolutionTrace& a, cplx ca, const SolutionTrace& b, cplx cb) {
  SolutionTrace out;
  out.lambda = a.lambda;
  out.x = a.x;
  out.u.resize(a.x.size());
  out.up.resize(a.x.size());
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    out.u[i] = ca * a.u[i] + cb * b.u[i];
    out.up[i] = ca * a.up[i] + cb * b.up[i];
  }
  return out;
}

SolutionTrace scaled(SolutionTrace t, cplx f) {
  for (auto& v : t.u) v *= f;
  for (auto& v : t.up) v *= f;
  return t;
}

void axpy(SolutionTrace& y, cplx a, const SolutionTrace& x) {
  for (std::size_t i = 0; i < y.u.size(); ++i) {
    y.u[i] += a * x.u[i];
    y.up[i] += a * x.up[i];
  }
}

SolutionTrace zero_like(const SolutionTrace& t) {
  SolutionTrace z;
  z.lambda = t.lambda;
  z.x = t.x;
  z.u.assign(t.x.size(), 0.0);
  z.up.assign(t.x.size(), 0.0);
  return z;
}

cplx apply_bc(const BcMatrix& a, int row, const SolutionTrace& t) {
  return a.apply(row, t.up.front(), t.up.back(), t.u.front(), t.u.back());
}

double sup(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const cplx& z : v) m = std::max(m, std::abs(z));
  return m;
}

// Unit L2 norm; first significant sample made real and positive.
cplx normalizer(const SolutionTrace& u) {
  const double n = l2_norm(u);
  if (!(n > 0.0)) fail(ErrorCode::NumericalFailure, "root function vanishes identically");
  const double big = sup(u.u);
  cplx phase = 1.0;
  for (const cplx& z : u.u) {
    if (std::abs(z) >= 1e-3 * big) {
      phase = std::conj(z) / std::abs(z);
      break;
    }
  }
  return phase / n;
}

double boundary_scale(const BcMatrix& a, const SolutionTrace& u) {
  double rows = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) rows = std::max(rows, std::abs(a(i, j)));
  }
  return rows * std::max(sup(u.u), sup(u.up));
}

Mat2 boundary_matrix(const BcMatrix& a, const SolutionTrace& c, const SolutionTrace& s) {
  Mat2 m;
  for (int i = 0; i < 2; ++i) {
    m(i, 0) = apply_bc(a, i, c);
    m(i, 1) = apply_bc(a, i, s);
  }
  return m;
}

double matrix_scale(const BcMatrix& a, const SolutionTrace& c, const SolutionTrace& s) {
  double rows = 0.0;
  for (int i = 0; i < 2; ++i) {
    double r = 0.0;
    for (int j = 0; j < 4; ++j) r += std::abs(a(i, j));
    rows = std::max(rows, r);
  }
  const double ends = std::max({1.0, std::abs(c.u.back()), std::abs(c.up.back()),
                                std::abs(s.u.back()), std::abs(s.up.back())});
  return rows * ends;
}

int rank_of(const Eigen::JacobiSVD<Mat2>& svd, double scale, double tol) {
  const auto& sv = svd.singularValues();
  if (sv(0) <= tol * scale) return 0;
  if (sv(1) <= tol * scale) return 1;
  return 2;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Second solution orthonormalized against the first (both unit norm).
std::pair<SolutionTrace, SolutionTrace> orthonormal_pair(const SolutionTrace& c,
                                                         const SolutionTrace& s) {
  SolutionTrace e1 = scaled(c, normalizer(c));
  SolutionTrace e2 = s;
  axpy(e2, -inner_product(s, e1), e1);
  e2 = scaled(e2, normalizer(e2));
  return {e1, e2};
}

void finish_residuals(RootChain& ch, const Potential& q, const BcMatrix& a) {
  ch.boundary_residual = 0.0;
  ch.ode_residual = 0.0;
  for (std::size_t p = 0; p < ch.chain.size(); ++p) {
    const auto br = boundary_residual(a, ch.chain[p]);
    ch.boundary_residual = std::max({ch.boundary_residual, br[0], br[1]});
    const SolutionTrace* rhs = p == 0 ? nullptr : &ch.chain[p - 1];
    ch.ode_residual = std::max(ch.ode_residual, ode_residual(q, ch.chain[p], rhs));
  }
}

// Particular solution of L u + lambda u = rhs corrected by the least-squares
// combination of c and s that best meets the boundary forms. Singular values
// below cutoff are dropped.
SolutionTrace corrected_solve(const Potential& q, const BcMatrix& a, cplx lambda,
                              const SolutionTrace& rhs, const SolutionTrace& c,
                              const SolutionTrace& s, double cutoff, const OdeOptions& ode) {
  SolutionTrace w = solve_inhomogeneous(q, lambda, rhs, 0.0, 0.0, ode);
  const Mat2 m = boundary_matrix(a, c, s);
  Eigen::JacobiSVD<Mat2> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix<cplx, 2, 1> b;
  b << -apply_bc(a, 0, w), -apply_bc(a, 1, w);
  Eigen::Matrix<cplx, 2, 1> g = Eigen::Matrix<cplx, 2, 1>::Zero();
  for (int k = 0; k < 2; ++k) {
    const double sv = svd.singularValues()(k);
    if (sv > cutoff) {
      g += svd.matrixV().col(k) * (svd.matrixU().col(k).dot(b) / sv);
    }
  }
  axpy(w, g(0), c);
  axpy(w, g(1), s);
  return w;
}

}  // namespace

cplx inner_product(const SolutionTrace& u, const SolutionTrace& v) {
  const std::size_t n = u.x.size();
  if (n < 2 || v.x.size() != n) fail(ErrorCode::InvalidInput, "traces on different grids");
  const double h = (u.x.back() - u.x.front()) / static_cast<double>(n - 1);
  bool uniform = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(u.x[i] - u.x[i - 1] - h) > 1e-9 * h) {
      uniform = false;
      break;
    }
  }
  auto f = [&](std::size_t i) { return u.u[i] * std::conj(v.u[i]); };
  cplx acc = 0.0;
  if (!uniform || n < 3) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      acc += 0.5 * (u.x[i + 1] - u.x[i]) * (f(i) + f(i + 1));
    }
    return acc;
  }
  // Simpson over an even number of intervals, trapezoid on a leftover one
  const std::size_t last = (n % 2 == 1) ? n - 1 : n - 2;
  for (std::size_t i = 0; i < last; i += 2) {
    acc += h / 3.0 * (f(i) + 4.0 * f(i + 1) + f(i + 2));
  }
  if (last != n - 1) acc += 0.5 * h * (f(n - 2) + f(n - 1));
  return acc;
}

double l2_norm(const SolutionTrace& u) {
  return std::sqrt(std::max(0.0, inner_product(u, u).real()));
}

std::array<double, 2> boundary_residual(const BcMatrix& a, const SolutionTrace& u) {
  return {std::abs(apply_bc(a, 0, u)), std::abs(apply_bc(a, 1, u))};
}

Eigenfunctions eigenfunction(const Potential& q, const BcMatrix& a,
                             const EigenvalueRecord& rec, const RootOptions& opt) {
  const std::vector<double> grid = uniform_grid(opt.grid_points);
  const FundamentalTraces ft = fundamental_traces(q, rec.mu, 0, grid, opt.ode);
  const SolutionTrace& c = ft.c[0];
  const SolutionTrace& s = ft.s[0];
  const Mat2 m = boundary_matrix(a, c, s);
  Eigen::JacobiSVD<Mat2> svd(m, Eigen::ComputeFullV);
  const int rank = rank_of(svd, matrix_scale(a, c, s), opt.rank_tol);
  Eigenfunctions out;
  if (rank == 2) {
    fail(ErrorCode::NotAnEigenvalue, "boundary matrix of the fundamental system is regular");
  }
  if (rank == 0) {
    auto [e1, e2] = orthonormal_pair(c, s);
    out.traces = {e1, e2};
    out.geometric_two = true;
    return out;
  }
  const auto v = svd.matrixV().col(1);
  SolutionTrace u = combine(c, v(0), s, v(1));
  out.traces.push_back(scaled(u, normalizer(u)));
  return out;
}

std::vector<RootChain> associated_chain(const Potential& q, const BcMatrix& a,
                                        const EigenvalueRecord& rec, int p_max,
                                        const RootOptions& opt) {
  if (rec.multiplicity < 1) fail(ErrorCode::InvalidInput, "multiplicity must be positive");
  if (p_max < 0) fail(ErrorCode::InvalidInput, "p_max must be nonnegative");
  const cplx mu = rec.mu;
  const cplx lambda = mu * mu;
  const int top = std::min(p_max, rec.multiplicity);
  const std::vector<double> grid = uniform_grid(opt.grid_points);
  const FundamentalTraces ft = fundamental_traces(q, mu, top, grid, opt.ode);
  const SolutionTrace& c0 = ft.c[0];
  const SolutionTrace& s0 = ft.s[0];
  const Mat2 m = boundary_matrix(a, c0, s0);
  Eigen::JacobiSVD<Mat2> svd(m);
  const double cutoff = opt.rank_tol * matrix_scale(a, c0, s0);
  const int rank = rank_of(svd, matrix_scale(a, c0, s0), opt.rank_tol);
  if (rank == 2) {
    fail(ErrorCode::NotAnEigenvalue, "boundary matrix of the fundamental system is regular");
  }

  auto accepts = [&](const SolutionTrace& u) {
    const auto br = boundary_residual(a, u);
    return std::max(br[0], br[1]) <= opt.boundary_tol * boundary_scale(a, u);
  };

  std::vector<RootChain> chains;
  if (rank == 0) {
    auto [e1, e2] = orthonormal_pair(c0, s0);
    int branch = 0;
    int links = 2;
    for (const SolutionTrace& e : {e1, e2}) {
      RootChain ch;
      ch.eigen = rec;
      ch.branch = branch++;
      ch.chain.push_back(e);
      while (ch.order() < p_max && links < rec.multiplicity) {
        SolutionTrace next =
            corrected_solve(q, a, lambda, ch.chain.back(), c0, s0, cutoff, opt.ode);
        if (!accepts(next)) break;
        ch.chain.push_back(std::move(next));
        ++links;
      }
      ch.note = "geometric multiplicity 2: one chain per eigenfunction";
      finish_residuals(ch, q, a);
      chains.push_back(std::move(ch));
    }
    return chains;
  }

  // phi(lambda) = B_r(s) c - B_r(c) s keeps B_r(phi) = 0 for every lambda
  const int r = m.row(0).squaredNorm() >= m.row(1).squaredNorm() ? 0 : 1;
  std::vector<cplx> alpha, beta;
  for (int j = 0; j <= top; ++j) {
    alpha.push_back(apply_bc(a, r, ft.s[static_cast<std::size_t>(j)]));
    beta.push_back(-apply_bc(a, r, ft.c[static_cast<std::size_t>(j)]));
  }
  std::vector<SolutionTrace> links;
  double factorial = 1.0;
  for (int p = 0; p <= top; ++p) {
    if (p > 0) factorial *= p;
    SolutionTrace phi = zero_like(c0);
    for (int k = 0; k <= p; ++k) {
      const double w = binomial(p, k);
      const auto idx = static_cast<std::size_t>(p - k);
      axpy(phi, w * alpha[static_cast<std::size_t>(k)], ft.c[idx]);
      axpy(phi, w * beta[static_cast<std::size_t>(k)], ft.s[idx]);
    }
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    links.push_back(scaled(std::move(phi), sign / factorial));
  }

  RootChain ch;
  ch.eigen = rec;
  const cplx norm = normalizer(links[0]);
  for (std::size_t p = 0; p < links.size(); ++p) {
    SolutionTrace u = scaled(links[p], norm);
    if (!accepts(u)) break;
    ch.chain.push_back(std::move(u));
  }
  if (ch.chain.empty()) {
    fail(ErrorCode::NotAnEigenvalue, "eigenfunction misses the boundary conditions");
  }
  if (ch.order() + 1 < rec.multiplicity && ch.order() == p_max) {
    ch.note = "chain truncated at p_max";
  }

  // independent route: inhomogeneous solve plus boundary correction; the
  // two constructions may differ by a multiple of the eigenfunction
  const SolutionTrace& u0 = ch.chain[0];
  for (std::size_t p = 1; p < ch.chain.size(); ++p) {
    SolutionTrace alt = corrected_solve(q, a, lambda, ch.chain[p - 1], c0, s0, cutoff, opt.ode);
    axpy(alt, -1.0, ch.chain[p]);
    axpy(alt, -inner_product(alt, u0), u0);
    ch.cross_check = std::max(ch.cross_check, l2_norm(alt) / l2_norm(ch.chain[p]));
  }
  finish_residuals(ch, q, a);
  chains.push_back(std::move(ch));
  return chains;
}

BcMatrix adjoint_bc(const BcMatrix& a) {
  Eigen::Matrix<cplx, 2, 4> m;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = a(i, j);
  }
  Eigen::JacobiSVD<Eigen::Matrix<cplx, 2, 4>> svd(m, Eigen::ComputeFullV);
  const Eigen::Matrix<cplx, 4, 2> n = svd.matrixV().rightCols<2>();
  // (v'(0), v'(pi), v(0), v(pi)) -> (-v(0), v(pi), v'(0), -v'(pi))
  Eigen::Matrix4cd p = Eigen::Matrix4cd::Zero();
  p(0, 2) = -1.0;
  p(1, 3) = 1.0;
  p(2, 0) = 1.0;
  p(3, 1) = -1.0;
  const Eigen::Matrix<cplx, 2, 4> star = n.adjoint() * p;
  BcMatrix::Row r0, r1;
  for (int j = 0; j < 4; ++j) {
    r0[static_cast<std::size_t>(j)] = star(0, j);
    r1[static_cast<std::size_t>(j)] = star(1, j);
  }
  return BcMatrix(r0, r1).rref();
}

BiorthogonalPair dual_system(const Potential& q, const BcMatrix& a,
                             const std::vector<RootChain>& chains, const RootOptions& opt) {
  if (chains.size() < 2) fail(ErrorCode::InvalidInput, "dual system needs at least two chains");
  const BcMatrix astar = adjoint_bc(a);
  const Potential qstar = q.conjugated();

  // group chains sharing an eigenvalue
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    if (!groups.empty()) {
      const auto& prev = chains[groups.back().front()].eigen;
      if (std::abs(prev.lambda - chains[i].eigen.lambda) <=
          1e-9 * (1.0 + std::abs(prev.lambda))) {
        groups.back().push_back(i);
        continue;
      }
    }
    groups.push_back({i});
  }

  struct GroupOut {
    std::vector<SolutionTrace> u, v;
    std::vector<RootLabel> labels;
    std::vector<std::string> notes;
  };
  std::vector<GroupOut> outs(groups.size());
  parallel_for(groups.size(), [&](std::size_t g) {
    GroupOut& o = outs[g];
    const RootChain& head = chains[groups[g].front()];
    for (std::size_t idx : groups[g]) {
      const RootChain& ch = chains[idx];
      for (std::size_t p = 0; p < ch.chain.size(); ++p) {
        o.u.push_back(ch.chain[p]);
        o.labels.push_back({idx, ch.branch, static_cast<int>(p), ch.eigen.mu});
      }
    }
    EigenvalueRecord rs = head.eigen;
    rs.mu = std::conj(head.eigen.mu);
    rs.lambda = rs.mu * rs.mu;
    std::vector<SolutionTrace> w;
    for (const RootChain& ch : associated_chain(qstar, astar, rs, rs.multiplicity, opt)) {
      for (const auto& t : ch.chain) w.push_back(t);
    }
    const std::size_t k = o.u.size();
    if (w.size() != k) {
      o.notes.push_back("adjoint root subspace size differs from the primal one at mu = " +
                        std::to_string(head.eigen.mu.real()) + " " +
                        std::to_string(head.eigen.mu.imag()) + "i");
      w.resize(std::min(w.size(), k), zero_like(o.u.front()));
      while (w.size() < k) w.push_back(zero_like(o.u.front()));
    }
    Eigen::MatrixXcd gram(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            inner_product(o.u[i], w[j]);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
    if (!lu.isInvertible()) {
      fail(ErrorCode::NumericalFailure, "root functions and adjoint root functions do not pair");
    }
    // v_l = sum_j C_jl w_j with C = conj(G^{-1}) gives <u_k, v_l> = delta_kl
    const Eigen::MatrixXcd cmat = lu.inverse().conjugate();
    for (std::size_t l = 0; l < k; ++l) {
      SolutionTrace v = zero_like(o.u.front());
      v.lambda = std::conj(o.u.front().lambda);
      for (std::size_t j = 0; j < k; ++j) {
        axpy(v, cmat(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)), w[j]);
      }
      o.v.push_back(std::move(v));
    }
  });

  BiorthogonalPair pair;
  for (auto& o : outs) {
    for (auto& t : o.u) pair.u.push_back(std::move(t));
    for (auto& t : o.v) pair.v.push_back(std::move(t));
    for (auto& l : o.labels) pair.labels.push_back(l);
    for (auto& n : o.notes) pair.notes.push_back(std::move(n));
  }
  const std::size_t n = pair.u.size();
  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      const cplx g = inner_product(pair.u[i], pair.v[j]);
      rows[i] = std::max(rows[i], std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  });
  for (double r : rows) pair.gram_residual = std::max(pair.gram_residual, r);
  return pair;
}

BasisDiagnostics basis_diagnostics(const BiorthogonalPair& pair, std::size_t n) {
  if (n == 0 || n > pair.u.size()) {
    fail(ErrorCode::InvalidInput, "N must lie between 1 and the number of computed pairs");
  }
  BasisDiagnostics d;
  std::vector<SolutionTrace> unit;
  for (std::size_t i = 0; i < n; ++i) {
    const double nu = l2_norm(pair.u[i]);
    const double nv = l2_norm(pair.v[i]);
    unit.push_back(scaled(pair.u[i], 1.0 / nu));
    d.norm_products.push_back(nu * nv);
    d.kernel_sup.push_back(sup(pair.u[i].u) * sup(pair.v[i].u));
  }
  Eigen::MatrixXcd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const cplx g = inner_product(unit[i], unit[j]);
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g;
      h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(g);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  d.gram_cond = lo > 0.0 ? ev.maxCoeff() / lo : std::numeric_limits<double>::infinity();
  return d;
}

std::vector<RootChain> root_system(const Potential& q, const BcMatrix& a,
                                   const SpectrumReport& report, const RootOptions& opt) {
  std::vector<std::vector<RootChain>> per(report.records.size());
  parallel_for(report.records.size(), [&](std::size_t i) {
    const auto& rec = report.records[i];
    per[i] = associated_chain(q, a, rec, rec.multiplicity, opt);
  });
  std::vector<RootChain> out;
  for (auto& v : per) {
    for (auto& c : v) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace slspec
