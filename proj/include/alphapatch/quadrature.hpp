#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace alphapatch {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tail integral requested with a non-integrable decay exponent.
struct DivergentTailError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 50;  // max bisection depth per integral
  double singular_split_radius_factor = 1.0;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw std::invalid_argument("QuadratureSpec: tolerances must be > 0");
    if (max_subdivisions < 10)
      throw std::invalid_argument("QuadratureSpec: max_subdivisions < 10");
  }
};

namespace detail {

// Gauss-Kronrod 15(7) rule on [-1,1] (QUADPACK dqk15 constants).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGk15WeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGk15WeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
void gk15(const F& f, double a, double b, double& integral, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kGk15Nodes[i];
    double v;
    if (i == 7) {
      v = f(c);
      resk += kGk15WeightsK[7] * v;
      resg += kGk15WeightsG[3] * v;
    } else {
      v = f(c - dx) + f(c + dx);
      resk += kGk15WeightsK[i] * v;
      if (i % 2 == 1) resg += kGk15WeightsG[i / 2] * v;
    }
  }
  integral = resk * h;
  err = std::abs((resk - resg) * h);
}

// Global adaptivity: always split the segment carrying the largest error
// estimate. Unlike per-branch tolerance halving, a long one-sided refinement
// chain (steep near-singular edges) does not starve its error budget.
template <typename F>
double adaptive_global(const F& f, double a, double b,
                       const QuadratureSpec& spec) {
  struct Seg {
    double a, b, integral, err;
    int depth;
    bool refinable;
  };
  std::vector<Seg> segs;
  segs.reserve(64);
  double I, E;
  gk15(f, a, b, I, E);
  segs.push_back({a, b, I, E, 0, true});
  const double scale = std::abs(a) + std::abs(b) + 1.0;
  for (int iter = 0; iter < 100000; ++iter) {
    double total = 0.0, total_err = 0.0;
    std::size_t worst = segs.size();
    double worst_err = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].integral;
      total_err += segs[i].err;
      if (segs[i].refinable && segs[i].err > worst_err) {
        worst_err = segs[i].err;
        worst = i;
      }
    }
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
    if (total_err <= tol) return total;
    if (worst == segs.size())
      throw QuadratureError(
          "adaptive quadrature stalled at machine resolution (err=" +
          std::to_string(total_err) + ", tol=" + std::to_string(tol) + ")");
    Seg s = segs[worst];
    if (s.depth >= spec.max_subdivisions)
      throw QuadratureError("adaptive quadrature failed to converge on [" +
                            std::to_string(s.a) + "," + std::to_string(s.b) +
                            "] after " + std::to_string(s.depth) +
                            " subdivisions (err=" + std::to_string(s.err) +
                            ")");
    const double m = 0.5 * (s.a + s.b);
    Seg left{s.a, m, 0, 0, s.depth + 1, true};
    Seg right{m, s.b, 0, 0, s.depth + 1, true};
    gk15(f, left.a, left.b, left.integral, left.err);
    gk15(f, right.a, right.b, right.integral, right.err);
    // a segment narrower than machine resolution cannot be improved further
    if (m - s.a <= 1e-15 * scale) left.refinable = right.refinable = false;
    segs[worst] = left;
    segs.push_back(right);
  }
  throw QuadratureError("adaptive quadrature exceeded the segment budget");
}

}  // namespace detail

// Adaptive integral of a smooth integrand on [a,b].
template <typename F>
double integrate_smooth(const F& g, double a, double b,
                        const QuadratureSpec& spec = {}) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate_smooth: requires a < b");
  }
  return detail::adaptive_global(g, a, b, spec);
}

// Integral of g(y) * |y-s|^{-gamma} over [a,b], where the singular endpoint s
// is a or b and g is smooth and bounded. The substitution u = |y-s|^{1-gamma}
// absorbs the singular factor exactly; the transformed integrand is bounded.
template <typename F>
double integrate_endpoint_singular(const F& g, double a, double b, double s,
                                   double gamma,
                                   const QuadratureSpec& spec = {}) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate_endpoint_singular: requires a < b");
  }
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument(
        "integrate_endpoint_singular: gamma must lie in (0,1)");
  const double span = b - a;
  const double snap = 1e-12 * span;
  bool at_left;
  if (std::abs(s - a) <= snap)
    at_left = true;
  else if (std::abs(s - b) <= snap)
    at_left = false;
  else
    throw std::invalid_argument(
        "integrate_endpoint_singular: singular point must be an endpoint");
  const double one_m_g = 1.0 - gamma;
  const double m = 1.0 / one_m_g;
  const double upper = std::pow(span, one_m_g);
  auto transformed = [&](double u) {
    double dy = std::pow(u, m);
    if (dy > span) dy = span;
    return g(at_left ? a + dy : b - dy);
  };
  return integrate_smooth(transformed, 0.0, upper, spec) / one_m_g;
}

// Integral of g over [R, infinity) where g(y) * y^beta stays bounded for some
// beta > 1. Substituting y = R/t maps the tail onto t in (0,1]; for
// beta < 2 the remaining t^{beta-2} endpoint factor is handed to
// integrate_endpoint_singular.
template <typename F>
double integrate_tail(const F& g, double R, double beta,
                      const QuadratureSpec& spec = {}) {
  if (!(beta > 1.0))
    throw DivergentTailError(
        "integrate_tail: decay exponent beta must exceed 1 (got " +
        std::to_string(beta) + ")");
  if (!(R > 0.0))
    throw std::invalid_argument("integrate_tail: requires R > 0");
  if (beta >= 2.0) {
    auto h = [&](double t) { return g(R / t) * R / (t * t); };
    return integrate_smooth(h, 0.0, 1.0, spec);
  }
  auto h = [&](double t) { return g(R / t) * R * std::pow(t, -beta); };
  return integrate_endpoint_singular(h, 0.0, 1.0, 0.0, 2.0 - beta, spec);
}

}  // namespace alphapatch
