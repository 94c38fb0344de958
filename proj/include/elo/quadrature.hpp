#pragma once

#include "elo/real.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace elo {

struct QuadResult {
  Real value;
  Real abs_error_estimate;
  std::size_t evaluations = 0;
};

/// Thrown when the evaluation budget runs out; carries the best estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadResult best) : std::runtime_error(what), best_(std::move(best)) {}
  const QuadResult& best() const { return best_; }

 private:
  QuadResult best_;
};

/// Gauss-Legendre nodes and weights on [-1, 1] at the current precision.
struct GaussLegendreRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

/// Cached per thread, per (points, precision).
const GaussLegendreRule& gauss_legendre_rule(unsigned points);

inline constexpr unsigned kPanelPoints = 20;
inline constexpr std::size_t kDefaultEvaluationBudget = 2'000'000;

/// Globally adaptive quadrature over the consecutive panels given by
/// `breakpoints` (at least two, increasing). Each panel's error estimate is
/// |G(a,b) - G(a,m) - G(m,b)| for a fixed Gauss-Legendre rule G; the panel
/// with the largest estimate is bisected until the summed estimate is
/// <= tol.
QuadResult integrate_adaptive(const std::function<Real(const Real&)>& f, std::span<const Real> breakpoints,
                              const Real& tol, std::size_t max_evaluations = kDefaultEvaluationBudget);

}  // namespace elo
