#include "elo/quadrature.hpp"

#include <map>
#include <queue>
#include <utility>

namespace elo {

namespace {

GaussLegendreRule build_rule(unsigned points) {
  using boost::multiprecision::abs;
  using boost::multiprecision::cos;
  GaussLegendreRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const Real eps = ldexp(Real(1), -static_cast<int>(precision_bits()) + 4);
  const Real pi_value = pi();
  for (unsigned i = 0; i < points; ++i) {
    Real x = cos(pi_value * (Real(i) + Real(0.75)) / (Real(points) + Real(0.5)));
    Real derivative;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1;
      Real p1 = x;
      for (unsigned k = 2; k <= points; ++k) {
        Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      derivative = points * (x * p1 - p0) / (x * x - 1);
      const Real step = p1 / derivative;
      x -= step;
      if (abs(step) <= eps) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2 / ((1 - x * x) * derivative * derivative);
  }
  return rule;
}

struct Panel {
  Real a;
  Real b;
  Real coarse;
  Real fine;
  Real left;
  Real right;
  Real error;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

}  // namespace

const GaussLegendreRule& gauss_legendre_rule(unsigned points) {
  thread_local std::map<std::pair<unsigned, unsigned>, GaussLegendreRule> cache;
  const auto key = std::make_pair(points, precision_bits());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_rule(points)).first;
  return it->second;
}

QuadResult integrate_adaptive(const std::function<Real(const Real&)>& f, std::span<const Real> breakpoints,
                              const Real& tol, std::size_t max_evaluations) {
  using boost::multiprecision::abs;
  if (breakpoints.size() < 2) throw std::invalid_argument("quadrature needs at least one panel");
  if (!(tol > 0)) throw std::invalid_argument("quadrature tolerance must be positive");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i - 1] < breakpoints[i])) throw std::invalid_argument("breakpoints must increase");

  const GaussLegendreRule& rule = gauss_legendre_rule(kPanelPoints);
  std::size_t evaluations = 0;

  auto gauss = [&](const Real& a, const Real& b) {
    const Real half = (b - a) / 2;
    const Real mid = (a + b) / 2;
    Real sum = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    evaluations += rule.nodes.size();
    return Real(sum * half);
  };

  auto make_panel = [&](Real a, Real b, Real coarse) {
    const Real m = (a + b) / 2;
    Panel panel{std::move(a), std::move(b), std::move(coarse), 0, 0, 0, 0};
    panel.left = gauss(panel.a, m);
    panel.right = gauss(m, panel.b);
    panel.fine = panel.left + panel.right;
    panel.error = abs(panel.fine - panel.coarse);
    return panel;
  };

  std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    Real coarse = gauss(breakpoints[i - 1], breakpoints[i]);
    queue.push(make_panel(breakpoints[i - 1], breakpoints[i], std::move(coarse)));
  }

  auto totals = [&]() {
    auto copy = queue;
    QuadResult result{0, 0, evaluations};
    while (!copy.empty()) {
      result.value += copy.top().fine;
      result.abs_error_estimate += copy.top().error;
      copy.pop();
    }
    return result;
  };

  Real total_error = 0;
  {
    auto copy = queue;
    while (!copy.empty()) {
      total_error += copy.top().error;
      copy.pop();
    }
  }

  while (total_error > tol) {
    if (evaluations + 4 * rule.nodes.size() > max_evaluations)
      throw QuadratureError("quadrature did not reach the requested tolerance within the evaluation budget", totals());
    Panel worst = queue.top();
    queue.pop();
    const Real m = (worst.a + worst.b) / 2;
    if (!(worst.a < m && m < worst.b))
      throw QuadratureError("quadrature panel collapsed below working precision", totals());
    Panel left = make_panel(worst.a, m, worst.left);
    Panel right = make_panel(m, worst.b, worst.right);
    total_error += left.error + right.error - worst.error;
    queue.push(std::move(left));
    queue.push(std::move(right));
  }
  return totals();
}

}  // namespace elo
