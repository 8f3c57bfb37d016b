#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature over a union of pieces.
// Infinite end points are handled by the map x = a + (1 - u) / u, u in (0, 1].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "levyclt/errors.hpp"

namespace levyclt::quad {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  std::size_t max_intervals = 20000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class Map { identity, upper, lower };

struct Piece {
  Map map;
  double anchor;  // finite end of a mapped piece
  double lo;      // bounds in the integration variable
  double hi;
};

template <class F>
double eval_mapped(F& f, const Piece& p, double u) {
  switch (p.map) {
    case Map::identity:
      return f(u);
    case Map::upper: {
      const double s = (1.0 - u) / u;
      return f(p.anchor + s) / (u * u);
    }
    case Map::lower: {
      const double s = (1.0 - u) / u;
      return f(p.anchor - s) / (u * u);
    }
  }
  return 0.0;
}

struct Cell {
  Piece piece;
  double value;
  double error;
  bool operator<(const Cell& other) const { return error < other.error; }
};

// QUADPACK qk15 with its error heuristic.
template <class F>
Cell gk15(F& f, const Piece& piece) {
  const double centre = 0.5 * (piece.lo + piece.hi);
  const double half = 0.5 * (piece.hi - piece.lo);
  const double abs_half = std::fabs(half);

  const double fc = eval_mapped(f, piece, centre);
  double result_gauss = fc * gauss_weights[3];
  double result_kronrod = fc * kronrod_weights[7];
  double result_abs = std::fabs(result_kronrod);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    f1[j] = eval_mapped(f, piece, centre - dx);
    f2[j] = eval_mapped(f, piece, centre + dx);
    const double sum = f1[j] + f2[j];
    result_kronrod += kronrod_weights[j] * sum;
    result_abs += kronrod_weights[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) result_gauss += gauss_weights[j / 2] * sum;
  }
  const double mean = result_kronrod * 0.5;
  double result_asc = kronrod_weights[7] * std::fabs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    result_asc += kronrod_weights[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
  }
  result_kronrod *= half;
  result_abs *= abs_half;
  result_asc *= abs_half;

  double err = std::fabs((result_kronrod - result_gauss * half));
  if (result_asc != 0.0 && err != 0.0) {
    err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  if (result_abs > tiny / (50.0 * eps)) err = std::max(eps * 50.0 * result_abs, err);

  if (!std::isfinite(result_kronrod)) {
    throw NumericalError("quadrature: non-finite integrand value");
  }
  return {piece, result_kronrod, err};
}

inline std::vector<Piece> make_pieces(std::span<const double> points) {
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    if (!(a < b)) continue;
    const bool inf_a = std::isinf(a);
    const bool inf_b = std::isinf(b);
    if (!inf_a && !inf_b) {
      pieces.push_back({Map::identity, 0.0, a, b});
    } else if (!inf_a) {
      pieces.push_back({Map::upper, a, 0.0, 1.0});
    } else if (!inf_b) {
      pieces.push_back({Map::lower, b, 0.0, 1.0});
    } else {
      pieces.push_back({Map::lower, 0.0, 0.0, 1.0});
      pieces.push_back({Map::upper, 0.0, 0.0, 1.0});
    }
  }
  return pieces;
}

}  // namespace detail

/// Integrates f over [points.front(), points.back()], with the interior points
/// treated as known kinks or discontinuities. End points may be infinite.
template <class F>
Result integrate(F&& f, std::span<const double> points, const Options& opts = {}) {
  Result out;
  std::vector<double> sorted(points.begin(), points.end());
  if (sorted.size() < 2) return out;
  if (!std::is_sorted(sorted.begin(), sorted.end())) {
    throw DomainError("quadrature: break points must be ordered");
  }
  const auto pieces = detail::make_pieces(sorted);
  if (pieces.empty()) {
    out.converged = true;
    return out;
  }

  std::priority_queue<detail::Cell> heap;
  double total = 0.0;
  double error = 0.0;
  for (const auto& p : pieces) {
    auto cell = detail::gk15(f, p);
    total += cell.value;
    error += cell.error;
    heap.push(cell);
  }
  out.evaluations = 15 * pieces.size();

  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::fabs(total)); };
  std::size_t iterations = 0;
  while (error > tolerance() && heap.size() < opts.max_intervals) {
    auto worst = heap.top();
    const double mid = 0.5 * (worst.piece.lo + worst.piece.hi);
    if (!(mid > worst.piece.lo && mid < worst.piece.hi)) break;  // interval exhausted
    heap.pop();
    auto left_piece = worst.piece;
    auto right_piece = worst.piece;
    left_piece.hi = mid;
    right_piece.lo = mid;
    const auto left = detail::gk15(f, left_piece);
    const auto right = detail::gk15(f, right_piece);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    out.evaluations += 30;
    if (++iterations % 64 == 0) {
      // Refresh the running sums to stop cancellation drift.
      auto copy = heap;
      total = 0.0;
      error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }

  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = error;
  out.converged = error <= tolerance();
  return out;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opts = {}) {
  const std::array<double, 2> pts{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts), opts);
}

/// Like integrate(), but throws NumericalError unless the error estimate meets
/// `accept_rel` (a looser acceptance bound than the refinement target).
template <class F>
double integrate_value(F&& f, std::span<const double> points, const Options& opts = {},
                       double accept_rel = 1e-7) {
  const auto r = integrate(std::forward<F>(f), points, opts);
  if (!r.converged && r.error > std::max(opts.abs_tol, accept_rel * std::fabs(r.value))) {
    throw NumericalError("quadrature did not converge: estimate " + std::to_string(r.value) +
                         ", error " + std::to_string(r.error));
  }
  return r.value;
}

template <class F>
double integrate_value(F&& f, double a, double b, const Options& opts = {},
                       double accept_rel = 1e-7) {
  const std::array<double, 2> pts{a, b};
  return integrate_value(std::forward<F>(f), std::span<const double>(pts), opts, accept_rel);
}

}  // namespace levyclt::quad
