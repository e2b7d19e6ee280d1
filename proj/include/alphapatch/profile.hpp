#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace alphapatch {

struct ProfileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One term of an algebraic tail: coef * (y + shift)^exponent.
struct TailTerm {
  double coef = 0.0;
  double shift = 0.0;
  double exponent = 0.0;
};

// Tail model for y >= cutoff. The (exponent, coefficient) pair describes the
// leading power law A*y^q used for decay-class bookkeeping; `terms` carries
// the exact evaluator, which defaults to that single power.
struct TailModel {
  double exponent = 0.0;     // q
  double coefficient = 0.0;  // A
  std::vector<TailTerm> terms;

  static TailModel power_law(double q, double A) {
    TailModel t;
    t.exponent = q;
    t.coefficient = A;
    t.terms = {{A, 0.0, q}};
    return t;
  }

  static TailModel from_terms(double q, double A, std::vector<TailTerm> ts) {
    TailModel t;
    t.exponent = q;
    t.coefficient = A;
    t.terms = std::move(ts);
    return t;
  }

  bool is_pure_power() const {
    return terms.size() == 1 && terms[0].shift == 0.0 &&
           terms[0].exponent == exponent;
  }

  double eval(double y) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.coef * std::pow(y + t.shift, t.exponent);
    return v;
  }

  // Tail model for the derivative of this tail.
  TailModel derivative() const {
    TailModel d;
    d.exponent = exponent - 1.0;
    d.coefficient = coefficient * exponent;
    for (const auto& t : terms)
      if (t.exponent != 0.0)
        d.terms.push_back({t.coef * t.exponent, t.shift, t.exponent - 1.0});
    if (d.terms.empty()) d.terms.push_back({0.0, 0.0, 0.0});
    return d;
  }
};

namespace detail {

// Fritsch-Carlson slopes: weighted harmonic means in the interior, shape-
// limited three-point formulas at the ends. Preserves monotonicity and keeps
// the interpolant inside the local data range.
inline std::vector<double> pchip_slopes(std::span<const double> x,
                                        std::span<const double> v) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (v[1] - v[0]) / (x[1] - x[0]);
    return d;
  }
  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    del[i] = (v[i + 1] - v[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (del[i - 1] == 0.0 || del[i] == 0.0 ||
        (del[i - 1] > 0) != (del[i] > 0)) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
    }
  }
  auto edge = [](double h0, double h1, double del0, double del1) {
    double d0 = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d0 == 0.0) return 0.0;
    if ((d0 > 0) != (del0 > 0))
      d0 = 0.0;
    else if ((del0 > 0) != (del1 > 0) && std::abs(d0) > 3.0 * std::abs(del0))
      d0 = 3.0 * del0;
    return d0;
  };
  d[0] = edge(h[0], h[1], del[0], del[1]);
  d[n - 1] = edge(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  return d;
}

}  // namespace detail

// Monotonicity-preserving piecewise cubic over a strictly increasing grid.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> nodes, std::vector<double> values)
      : x_(std::move(nodes)), v_(std::move(values)) {
    if (x_.size() != v_.size() || x_.size() < 2)
      throw ProfileError("MonotoneCubic: need >= 2 matching nodes/values");
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
      if (!(x_[i] < x_[i + 1]))
        throw ProfileError("MonotoneCubic: nodes must be strictly increasing");
    d_ = detail::pchip_slopes(x_, v_);
  }

  double eval(double y) const {
    const std::size_t i = locate(y);
    const double t = y - x_[i];
    const double h = x_[i + 1] - x_[i];
    double c2, c3;
    coeffs_tail(i, h, c2, c3);
    return v_[i] + t * (d_[i] + t * (c2 + t * c3));
  }

  double eval_derivative(double y) const {
    const std::size_t i = locate(y);
    const double t = y - x_[i];
    const double h = x_[i + 1] - x_[i];
    double c2, c3;
    coeffs_tail(i, h, c2, c3);
    return d_[i] + t * (2.0 * c2 + 3.0 * t * c3);
  }

  // Cubic coefficients of piece i about its left node.
  void piece(std::size_t i, double& c0, double& c1, double& c2,
             double& c3) const {
    const double h = x_[i + 1] - x_[i];
    c0 = v_[i];
    c1 = d_[i];
    coeffs_tail(i, h, c2, c3);
  }

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return v_; }
  const std::vector<double>& slopes() const { return d_; }

 private:
  std::size_t locate(double y) const {
    if (y <= x_.front()) return 0;
    if (y >= x_.back()) return x_.size() - 2;
    const auto it = std::upper_bound(x_.begin(), x_.end(), y);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
  }

  void coeffs_tail(std::size_t i, double h, double& c2, double& c3) const {
    const double del = (v_[i + 1] - v_[i]) / h;
    c2 = (3.0 * del - 2.0 * d_[i] - d_[i + 1]) / h;
    c3 = (d_[i] + d_[i + 1] - 2.0 * del) / (h * h);
  }

  std::vector<double> x_, v_;
  std::vector<double> d_;
};

// Whether a profile must join its tail law continuously at x_N. Transported
// states keep the initial tail law while the last particle drifts, so they
// legitimately carry a far-field jump.
enum class TailContinuity { checked, relaxed };

// Sampled odd function on x >= 0 with an algebraic tail beyond the last node.
// The odd extension omega(-x) = -omega(x) is implied, never stored.
class OddProfile {
 public:
  OddProfile() = default;
  OddProfile(std::vector<double> nodes, std::vector<double> values,
             TailModel tail, TailContinuity mode = TailContinuity::checked)
      : tail_(std::move(tail)) {
    if (nodes.size() < 9)
      throw ProfileError("OddProfile: need at least 9 nodes (N >= 8)");
    if (nodes.size() != values.size())
      throw ProfileError("OddProfile: nodes/values size mismatch");
    if (nodes.front() != 0.0)
      throw ProfileError("OddProfile: first node must be x = 0");
    if (values.front() != 0.0)
      throw ProfileError("OddProfile: odd data must vanish at the origin");
    if (mode == TailContinuity::checked) {
      const double vN = values.back();
      const double tail_at_xN = tail_.eval(nodes.back());
      if (std::abs(tail_at_xN - vN) > 1e-6 * (1.0 + std::abs(vN)))
        throw ProfileError("OddProfile: tail discontinuous at x_N (tail=" +
                           std::to_string(tail_at_xN) +
                           ", value=" + std::to_string(vN) + ")");
    }
    interp_ = MonotoneCubic(std::move(nodes), std::move(values));
  }

  double eval(double y) const {
    if (y < 0.0) return -eval(-y);
    if (y > x_max()) return tail_.eval(y);
    return interp_.eval(y);
  }

  double x_max() const { return interp_.nodes().back(); }
  std::size_t node_count() const { return interp_.nodes().size(); }
  const std::vector<double>& nodes() const { return interp_.nodes(); }
  const std::vector<double>& values() const { return interp_.values(); }
  const MonotoneCubic& interpolant() const { return interp_; }
  const TailModel& tail() const { return tail_; }
  double tail_exponent() const { return tail_.exponent; }
  double tail_coefficient() const { return tail_.coefficient; }

  bool nonnegative() const {
    for (double v : interp_.values())
      if (v < 0.0) return false;
    return tail_.coefficient >= 0.0;
  }

 private:
  MonotoneCubic interp_;
  TailModel tail_;
};

// Sampled even function on x >= 0 (e.g. the derivative of an odd profile);
// unlike OddProfile it may take any value at the origin.
class EvenProfile {
 public:
  EvenProfile() = default;
  EvenProfile(std::vector<double> nodes, std::vector<double> values,
              TailModel tail)
      : tail_(std::move(tail)) {
    if (nodes.size() < 2 || nodes.size() != values.size())
      throw ProfileError("EvenProfile: bad nodes/values");
    if (nodes.front() != 0.0)
      throw ProfileError("EvenProfile: first node must be x = 0");
    interp_ = MonotoneCubic(std::move(nodes), std::move(values));
  }

  double eval(double y) const {
    y = std::abs(y);
    if (y > x_max()) return tail_.eval(y);
    return interp_.eval(y);
  }

  double x_max() const { return interp_.nodes().back(); }
  const std::vector<double>& nodes() const { return interp_.nodes(); }
  const std::vector<double>& values() const { return interp_.values(); }
  const MonotoneCubic& interpolant() const { return interp_; }
  const TailModel& tail() const { return tail_; }

 private:
  MonotoneCubic interp_;
  TailModel tail_;
};

// Derivative samples of an odd profile, as an even function on x >= 0.
inline EvenProfile derivative_profile(const OddProfile& omega) {
  const auto& interp = omega.interpolant();
  std::vector<double> vals(interp.nodes().size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    vals[i] = interp.slopes()[i];
  return EvenProfile(interp.nodes(), vals, omega.tail().derivative());
}

namespace detail {

// sup over y >= cutoff of |A y^q| (1+y)^{-s} for a pure power tail.
inline double power_tail_weighted_sup(double A, double q, double s,
                                      double cutoff) {
  const double absA = std::abs(A);
  if (absA == 0.0) return 0.0;
  if (q > s) return std::numeric_limits<double>::infinity();
  auto val = [&](double y) {
    return absA * std::pow(y, q) * std::pow(1.0 + y, -s);
  };
  if (q == s) return std::max(val(cutoff), absA);
  // q < s: unique interior maximum at y* = q/(s-q) when q > 0.
  double sup = val(cutoff);
  if (q > 0.0) {
    const double ystar = q / (s - q);
    if (ystar > cutoff) sup = std::max(sup, val(ystar));
  }
  return sup;
}

}  // namespace detail

// Weighted sup norm sup_{x>=0} |omega(x)| (1+x)^{-s} over the nodes and the
// algebraic tail. Returns +infinity when the tail makes the sup unbounded
// (s < tail exponent).
inline double weighted_norm(const OddProfile& omega, double s) {
  const auto& xs = omega.nodes();
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    sup = std::max(sup, std::abs(omega.values()[i]) * std::pow(1.0 + xs[i], -s));
  const auto& tail = omega.tail();
  if (tail.is_pure_power()) {
    sup = std::max(sup, detail::power_tail_weighted_sup(
                            tail.coefficient, tail.exponent, s, omega.x_max()));
  } else {
    if (tail.exponent > s) return std::numeric_limits<double>::infinity();
    for (double y = omega.x_max(); y <= 1e6 * (1.0 + omega.x_max()); y *= 1.25)
      sup = std::max(sup, std::abs(tail.eval(y)) * std::pow(1.0 + y, -s));
    if (tail.exponent == s)
      sup = std::max(sup, std::abs(tail.coefficient));
  }
  return sup;
}

// Same norm for even (derivative) profiles.
inline double weighted_norm(const EvenProfile& w, double s) {
  const auto& xs = w.nodes();
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    sup = std::max(sup, std::abs(w.values()[i]) * std::pow(1.0 + xs[i], -s));
  const auto& tail = w.tail();
  if (tail.is_pure_power())
    return std::max(sup, detail::power_tail_weighted_sup(
                             tail.coefficient, tail.exponent, s, w.x_max()));
  if (tail.exponent > s) return std::numeric_limits<double>::infinity();
  for (double y = w.x_max(); y <= 1e6 * (1.0 + w.x_max()); y *= 1.25)
    sup = std::max(sup, std::abs(tail.eval(y)) * std::pow(1.0 + y, -s));
  return sup;
}

// Graded node set x_i = x_max * (i/N)^m concentrating resolution at x = 0.
inline std::vector<double> graded_nodes(std::size_t n_nodes, double x_max,
                                        double grading_power) {
  if (n_nodes < 2) throw ProfileError("graded_nodes: need >= 2 nodes");
  std::vector<double> xs(n_nodes);
  const double N = static_cast<double>(n_nodes - 1);
  for (std::size_t i = 0; i < n_nodes; ++i)
    xs[i] = x_max * std::pow(static_cast<double>(i) / N, grading_power);
  xs[0] = 0.0;
  xs[n_nodes - 1] = x_max;
  return xs;
}

}  // namespace alphapatch
