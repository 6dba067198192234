#pragma once

// Limited-memory BFGS with a backtracking (Armijo) line search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "shallowlab/crf.hpp"
#include "shallowlab/error.hpp"

namespace shallowlab::optim {

struct LbfgsOptions {
  std::size_t history = 10;
  std::size_t max_iterations = 200;
  /// Stop once (f_prev - f) / max(1, |f|) falls below this.
  double tolerance = 1e-5;
  std::size_t max_line_search = 60;
  double armijo = 1e-4;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Objective after every accepted step, starting with the initial point.
  std::vector<double> trace;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Correction {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion: returns -H * g.
inline std::vector<double> direction(const std::deque<Correction>& memory,
                                     std::span<const double> g) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * dot(memory[i].s, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[i] * memory[i].y[j];
  }
  if (!memory.empty()) {
    const auto& last = memory.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * dot(memory[i].y, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += memory[i].s[j] * (alpha[i] - beta);
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace detail

/// Minimizes `evaluate`, a callable (std::span<const double>) -> ObjectiveValue.
/// Throws NonFiniteObjective if the starting point evaluates to NaN/inf.
template <class Objective>
LbfgsResult minimize_lbfgs(Objective&& evaluate, std::vector<double> x,
                           const LbfgsOptions& options) {
  using detail::dot;
  auto current = evaluate(std::span<const double>(x));
  if (!std::isfinite(current.value)) {
    throw Error(ErrorKind::non_finite_objective, "objective is not finite at the start point");
  }
  LbfgsResult result;
  result.trace.push_back(current.value);

  std::deque<detail::Correction> memory;
  std::vector<double> trial(x.size());

  while (result.iterations < options.max_iterations) {
    const double gnorm = std::sqrt(dot(current.gradient, current.gradient));
    if (!(gnorm > 1e-12)) {
      result.converged = true;
      break;
    }

    auto d = detail::direction(memory, current.gradient);
    double slope = dot(d, current.gradient);
    if (!(slope < 0.0)) {
      memory.clear();
      d = detail::direction(memory, current.gradient);
      slope = -gnorm * gnorm;
    }
    double step = memory.empty() ? 1.0 / gnorm : 1.0;

    bool accepted = false;
    crf::ObjectiveValue next;
    for (std::size_t ls = 0; ls < options.max_line_search; ++ls) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + step * d[i];
      next = evaluate(std::span<const double>(trial));
      if (std::isfinite(next.value) &&
          next.value <= current.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (memory.empty()) break;  // no progress possible along -g
      memory.clear();
      continue;
    }

    detail::Correction c{std::vector<double>(x.size()), std::vector<double>(x.size()), 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
      c.s[i] = trial[i] - x[i];
      c.y[i] = next.gradient[i] - current.gradient[i];
    }
    const double sy = dot(c.s, c.y);
    if (sy > 1e-10) {
      c.rho = 1.0 / sy;
      memory.push_back(std::move(c));
      if (memory.size() > options.history) memory.pop_front();
    }

    const double decrease = current.value - next.value;
    x.swap(trial);
    current = std::move(next);
    ++result.iterations;
    result.trace.push_back(current.value);
    if (decrease / std::max(1.0, std::abs(current.value)) < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(x);
  result.value = current.value;
  return result;
}

}  // namespace shallowlab::optim
