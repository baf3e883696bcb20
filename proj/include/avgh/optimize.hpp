#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace avgh {

/// Minimiser of a unimodal function on [lo, hi] by golden-section search.
template <class F>
double golden_min(F&& f, double lo, double hi, int iterations = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iterations && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

/// Nelder-Mead minimisation in the plane from start with initial edge length step.
template <class F>
Point2 nelder_mead_2d(F&& f, double x0, double y0, double step, int max_iter = 400, double ftol = 1e-15) {
  std::array<Point2, 3> s{Point2{x0, y0, f(x0, y0)}, Point2{x0 + step, y0, f(x0 + step, y0)},
                          Point2{x0, y0 + step, f(x0, y0 + step)}};
  auto eval = [&](double x, double y) { return Point2{x, y, f(x, y)}; };
  for (int it = 0; it < max_iter; ++it) {
    std::sort(s.begin(), s.end(), [](const Point2& a, const Point2& b) { return a.value < b.value; });
    if (std::abs(s[2].value - s[0].value) <= ftol * (std::abs(s[0].value) + 1e-300) &&
        std::hypot(s[2].x - s[0].x, s[2].y - s[0].y) < 1e-12 * (1.0 + std::abs(s[0].x) + std::abs(s[0].y)))
      break;
    const double cx = 0.5 * (s[0].x + s[1].x), cy = 0.5 * (s[0].y + s[1].y);
    const Point2 r = eval(2.0 * cx - s[2].x, 2.0 * cy - s[2].y);
    if (r.value < s[0].value) {
      const Point2 e = eval(3.0 * cx - 2.0 * s[2].x, 3.0 * cy - 2.0 * s[2].y);
      s[2] = e.value < r.value ? e : r;
    } else if (r.value < s[1].value) {
      s[2] = r;
    } else {
      const bool outside = r.value < s[2].value;
      const Point2 c = outside ? eval(cx + 0.5 * (r.x - cx), cy + 0.5 * (r.y - cy))
                               : eval(cx + 0.5 * (s[2].x - cx), cy + 0.5 * (s[2].y - cy));
      if (c.value < std::min(r.value, s[2].value)) {
        s[2] = c;
      } else {
        for (int k = 1; k < 3; ++k) s[k] = eval(0.5 * (s[0].x + s[k].x), 0.5 * (s[0].y + s[k].y));
      }
    }
  }
  std::sort(s.begin(), s.end(), [](const Point2& a, const Point2& b) { return a.value < b.value; });
  return s[0];
}

}  // namespace avgh
