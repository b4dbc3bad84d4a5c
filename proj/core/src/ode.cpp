#include "slspec/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

#include "dop853.hpp"

namespace slspec {

namespace {

void check_options(const OdeOptions& opt) {
  if (!(opt.tol >= 1e-13 && opt.tol <= 1e-4)) {
    fail(ErrorCode::InvalidInput, "integrator tolerance must lie in [1e-13, 1e-4]");
  }
}

void check_mu(cplx mu, const OdeOptions& opt) {
  if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag())) {
    fail(ErrorCode::InvalidInput, "mu must be finite");
  }
  if (std::abs(mu) > opt.mu_cap) {
    fail(ErrorCode::InvalidInput, "|mu| exceeds the configured cap");
  }
}

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2 || grid.front() != 0.0 ||
      std::abs(grid.back() - kPi) > 1e-12) {
    fail(ErrorCode::InvalidInput, "trace grid must run from 0 to pi");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      fail(ErrorCode::InvalidInput, "trace grid must be strictly increasing");
    }
  }
}

// Cubic Hermite interpolant of a sampled solution, used as forcing term.
class Forcing {
 public:
  Forcing(const SolutionTrace& t, cplx scale) : t_(t), scale_(scale) {}

  cplx operator()(double x) const {
    const auto& g = t_.x;
    auto it = std::upper_bound(g.begin(), g.end(), x);
    std::size_t i = it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
    i = std::min(i, g.size() - 2);
    const double h = g[i + 1] - g[i];
    const double t = (x - g[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const cplx v = (2 * t3 - 3 * t2 + 1) * t_.u[i] + (t3 - 2 * t2 + t) * h * t_.up[i] +
                   (-2 * t3 + 3 * t2) * t_.u[i + 1] + (t3 - t2) * h * t_.up[i + 1];
    return scale_ * v;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& v : t_.u) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  const SolutionTrace& t_;
  cplx scale_;
};

// Rescaled linear system. For column c and lambda-order j the state holds
//   w = e^{-kappa x} sigma^j v_j,   z = e^{-kappa x} sigma^{j-1} v_j'
// where v_j = d^j u / dlambda^j, so every component stays O(1).
struct LinearRhs {
  const Potential& q;
  std::optional<cplx> q_const;
  cplx lambda;
  double kappa;
  double sigma;
  int columns;
  int orders;
  const Forcing* forcing = nullptr;
  bool reflect = false;  // evaluate q(pi - x)

  void operator()(double x, const cplx* y, cplx* dy) const {
    const cplx qx = q_const ? *q_const : q(reflect ? kPi - x : x);
    const cplx a = (qx - lambda) / sigma;
    for (int c = 0; c < columns; ++c) {
      for (int j = 0; j < orders; ++j) {
        const std::size_t idx = 2 * static_cast<std::size_t>(c * orders + j);
        const cplx w = y[idx];
        const cplx z = y[idx + 1];
        dy[idx] = -kappa * w + sigma * z;
        cplx dz = -kappa * z + a * w;
        if (j > 0) dz -= static_cast<double>(j) * y[idx - 2];
        dy[idx + 1] = dz;
      }
    }
    if (forcing != nullptr) dy[1] += std::exp(-kappa * x) * (*forcing)(x) / sigma;
  }
};

struct Scaling {
  double kappa;
  double sigma;
};

Scaling scaling_for(cplx lambda) {
  const cplx mu = std::sqrt(lambda);
  const double kappa = std::abs(mu.imag());
  if (kappa * kPi > 700.0) {
    throw IntegrationError(0.0, "solution magnitude e^{|Im mu| pi} overflows");
  }
  return {kappa, std::max(1.0, std::abs(mu))};
}

// Runs the system from 0 to end, stopping at every breakpoint and output
// node. on_node(k, y) fires at output node k (including x = 0 when listed).
template <class OnNode>
void integrate(LinearRhs& rhs, std::vector<cplx>& y,
               std::span<const double> outputs, std::vector<double> breaks,
               const OdeOptions& opt, OnNode&& on_node, double end = kPi) {
  std::vector<double> stops(outputs.begin(), outputs.end());
  for (double b : breaks) {
    if (b < end) stops.push_back(b);
  }
  stops.push_back(end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  detail::StepControl ctl{opt.tol, opt.tol, opt.max_steps};
  detail::Dop853<LinearRhs> stepper(rhs, y.size(), ctl);
  double h = 0.0;
  double x = 0.0;
  std::size_t k = 0;
  if (!outputs.empty() && outputs[0] == 0.0) on_node(k++, y);
  for (double stop : stops) {
    if (stop <= x) continue;
    stepper.advance(x, stop, y, h);
    x = stop;
    while (k < outputs.size() && outputs[k] <= x) on_node(k++, y);
  }
  for (const cplx& v : y) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw IntegrationError(end, "integration produced non-finite values");
    }
  }
}

SolutionTrace single_column(const Potential& q, cplx lambda, cplx u0, cplx up0,
                            std::span<const double> grid,
                            const SolutionTrace* forcing, const OdeOptions& opt) {
  check_options(opt);
  check_grid(grid);
  check_mu(std::sqrt(lambda), opt);
  const Scaling sc = scaling_for(lambda);

  SolutionTrace out;
  out.lambda = lambda;
  out.x.assign(grid.begin(), grid.end());
  out.u.assign(grid.size(), 0.0);
  out.up.assign(grid.size(), 0.0);

  double size = std::max(std::abs(u0), std::abs(up0) / sc.sigma);
  if (forcing != nullptr) {
    size = std::max(size, Forcing(*forcing, 1.0).max_abs() / (sc.sigma * sc.sigma));
  }
  if (size == 0.0) return out;
  const double scale = 1.0 / size;

  std::optional<Forcing> g;
  std::vector<double> breaks = q.breakpoints();
  LinearRhs rhs{q, q.constant_value(), lambda, sc.kappa, sc.sigma, 1, 1, nullptr};
  if (forcing != nullptr) {
    g.emplace(*forcing, scale);
    rhs.forcing = &*g;
    breaks.insert(breaks.end(), forcing->x.begin(), forcing->x.end());
  }

  std::vector<cplx> y{scale * u0, scale * up0 / sc.sigma};
  integrate(rhs, y, grid, breaks, opt, [&](std::size_t k, const std::vector<cplx>& s) {
    const double grow = std::exp(sc.kappa * grid[k]) / scale;
    out.u[k] = grow * s[0];
    out.up[k] = grow * sc.sigma * s[1];
  });
  return out;
}

}  // namespace

cplx sinc_pi(cplx mu) {
  if (std::abs(mu) < 1e-4) {
    const cplx z = kPi * mu;
    return kPi * (1.0 - z * z / 6.0 + z * z * z * z / 120.0);
  }
  return std::sin(kPi * mu) / mu;
}

std::array<cplx, 4> FundamentalValues::order(int j) const {
  if (j == 0) return {c, cp, s, sp};
  if (j < 0 || static_cast<std::size_t>(j) > dlambda.size()) {
    fail(ErrorCode::InvalidInput, "requested lambda-derivative was not computed");
  }
  return dlambda[static_cast<std::size_t>(j) - 1];
}

std::vector<double> uniform_grid(std::size_t n) {
  if (n < 2) fail(ErrorCode::InvalidInput, "grid needs at least two nodes");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = kPi * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  x.back() = kPi;
  return x;
}

FundamentalValues free_fundamental(cplx mu) {
  FundamentalValues f;
  f.mu = mu;
  f.c = std::cos(kPi * mu);
  f.cp = -mu * std::sin(kPi * mu);
  f.s = sinc_pi(mu);
  f.sp = f.c;
  return f;
}

FundamentalValues fundamental_at_pi(const Potential& q, cplx mu, int m,
                                    const OdeOptions& opt) {
  check_options(opt);
  check_mu(mu, opt);
  if (m < 0) fail(ErrorCode::InvalidInput, "derivative order must be nonnegative");
  const cplx lambda = mu * mu;
  const Scaling sc = scaling_for(lambda);
  const int orders = m + 1;
  const std::size_t no = static_cast<std::size_t>(orders);
  const double mid = 0.5 * kPi;

  // Two-sided shooting: the transfer matrix over [0, pi/2] for q(x) and for
  // q(pi - x), matched at the midpoint. In the scaled variables
  // N = [[c, sigma s], [c'/sigma, s']] e^{-kappa x} this reads
  //   N(pi) = R adj(P) R N(pi/2),   R = diag(1, -1),
  // with P the half transfer of the reflected problem (det P = 1).
  auto half = [&](bool reflect) {
    LinearRhs rhs{q, q.constant_value(), lambda, sc.kappa, sc.sigma, 2, orders, nullptr};
    rhs.reflect = reflect;
    std::vector<double> breaks = q.breakpoints();
    if (reflect) {
      for (double& b : breaks) b = kPi - b;
    }
    std::vector<cplx> y(4 * no, 0.0);
    y[0] = 1.0;           // c(0) = 1
    y[2 * no + 1] = 1.0;  // the s column carries sigma * s
    integrate(rhs, y, {}, breaks, opt, [](std::size_t, const std::vector<cplx>&) {}, mid);
    // order-j matrices [[n11, n12], [n21, n22]]
    std::vector<std::array<cplx, 4>> mats(no);
    for (std::size_t j = 0; j < no; ++j) {
      mats[j] = {y[2 * j], y[2 * (no + j)], y[2 * j + 1], y[2 * (no + j) + 1]};
    }
    return mats;
  };
  const auto left = half(false);
  const auto right = half(true);

  // R adj(P) R = [[p22, p12], [p21, p11]], linear in P, so its lambda
  // derivatives are the same rearrangement of those of P.
  auto flipped = [](const std::array<cplx, 4>& p) {
    return std::array<cplx, 4>{p[3], p[1], p[2], p[0]};
  };
  auto product = [](const std::array<cplx, 4>& a, const std::array<cplx, 4>& b) {
    return std::array<cplx, 4>{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                               a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
  };

  const double grow = std::exp(sc.kappa * kPi);
  FundamentalValues f;
  f.mu = mu;
  double sig_j = 1.0;
  for (int j = 0; j < orders; ++j) {
    std::array<cplx, 4> n{};
    double binom = 1.0;
    for (int i = 0; i <= j; ++i) {
      const auto term = product(flipped(right[static_cast<std::size_t>(i)]),
                                left[static_cast<std::size_t>(j - i)]);
      for (int e = 0; e < 4; ++e) n[e] += binom * term[e];
      binom = binom * (j - i) / (i + 1);
    }
    const double g = grow / sig_j;
    const std::array<cplx, 4> v{g * n[0], g * sc.sigma * n[2], g * n[1] / sc.sigma, g * n[3]};
    if (j == 0) {
      f.c = v[0];
      f.cp = v[1];
      f.s = v[2];
      f.sp = v[3];
    } else {
      f.dlambda.push_back(v);
    }
    sig_j *= sc.sigma;
  }
  return f;
}

SolutionTrace solve_ivp(const Potential& q, cplx lambda, cplx u0, cplx up0,
                        std::span<const double> grid, const OdeOptions& opt) {
  return single_column(q, lambda, u0, up0, grid, nullptr, opt);
}

SolutionTrace solve_inhomogeneous(const Potential& q, cplx lambda,
                                  const SolutionTrace& rhs, cplx u0, cplx up0,
                                  const OdeOptions& opt) {
  if (rhs.u.size() != rhs.x.size() || rhs.up.size() != rhs.x.size()) {
    fail(ErrorCode::InvalidInput, "forcing trace is inconsistent");
  }
  return single_column(q, lambda, u0, up0, rhs.x, &rhs, opt);
}

FundamentalTraces fundamental_traces(const Potential& q, cplx mu, int m,
                                     std::span<const double> grid,
                                     const OdeOptions& opt) {
  check_options(opt);
  check_mu(mu, opt);
  check_grid(grid);
  if (m < 0) fail(ErrorCode::InvalidInput, "derivative order must be nonnegative");
  const cplx lambda = mu * mu;
  const Scaling sc = scaling_for(lambda);
  const int orders = m + 1;

  FundamentalTraces out;
  for (int j = 0; j < orders; ++j) {
    SolutionTrace t;
    t.lambda = lambda;
    t.x.assign(grid.begin(), grid.end());
    t.u.resize(grid.size());
    t.up.resize(grid.size());
    out.c.push_back(t);
    out.s.push_back(t);
  }

  LinearRhs rhs{q, q.constant_value(), lambda, sc.kappa, sc.sigma, 2, orders, nullptr};
  std::vector<cplx> y(4 * static_cast<std::size_t>(orders), 0.0);
  y[0] = 1.0;
  y[2 * static_cast<std::size_t>(orders) + 1] = 1.0;
  integrate(rhs, y, grid, q.breakpoints(), opt, [&](std::size_t k, const std::vector<cplx>& s) {
    const double grow = std::exp(sc.kappa * grid[k]);
    double sig_j = 1.0;
    for (int j = 0; j < orders; ++j) {
      const std::size_t ic = 2 * static_cast<std::size_t>(j);
      const std::size_t is = 2 * static_cast<std::size_t>(orders + j);
      const double g = grow / sig_j;
      auto& c = out.c[static_cast<std::size_t>(j)];
      auto& sv = out.s[static_cast<std::size_t>(j)];
      c.u[k] = g * s[ic];
      c.up[k] = g * sc.sigma * s[ic + 1];
      sv.u[k] = g * s[is] / sc.sigma;
      sv.up[k] = g * s[is + 1];
      sig_j *= sc.sigma;
    }
  });
  return out;
}

double ode_residual(const Potential& q, const SolutionTrace& u,
                    const SolutionTrace* rhs) {
  const std::size_t n = u.x.size();
  if (n < 8) fail(ErrorCode::InvalidInput, "trace too short for a residual check");
  if (rhs != nullptr && rhs->u.size() != n) {
    fail(ErrorCode::InvalidInput, "forcing trace has a different grid");
  }
  const double h = (u.x.back() - u.x.front()) / static_cast<double>(n - 1);
  bool uniform = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(u.x[i] - u.x[i - 1] - h) > 1e-9 * h) {
      uniform = false;
      break;
    }
  }
  auto point = [&](std::size_t i, cplx upp) {
    const cplx g = rhs != nullptr ? rhs->u[i] : cplx{};
    return std::abs(upp - (q(u.x[i]) - u.lambda) * u.u[i] - g);
  };
  double worst = 0.0;
  if (uniform) {
    const auto& p = u.up;
    for (std::size_t i = 3; i + 3 < n; ++i) {
      const cplx upp = (-p[i - 3] + 9.0 * p[i - 2] - 45.0 * p[i - 1] + 45.0 * p[i + 1] -
                        9.0 * p[i + 2] + p[i + 3]) /
                       (60.0 * h);
      worst = std::max(worst, point(i, upp));
    }
    return worst;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = u.x[i] - u.x[i - 1];
    const double h1 = u.x[i + 1] - u.x[i];
    const cplx upp = (h0 * h0 * u.up[i + 1] - h1 * h1 * u.up[i - 1] +
                      (h1 * h1 - h0 * h0) * u.up[i]) /
                     (h0 * h1 * (h0 + h1));
    worst = std::max(worst, point(i, upp));
  }
  return worst;
}

void write_trace_csv(std::ostream& os, const SolutionTrace& t) {
  os << "x,re_u,im_u,re_up,im_up\n";
  char buf[160];
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", t.x[i],
                  t.u[i].real(), t.u[i].imag(), t.up[i].real(), t.up[i].imag());
    os << buf;
  }
}

}  // namespace slspec
