#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace avgh {

/// Which one-sided limit to take when a family jumps at a node.
enum class Side { left, center, right };

/// A block of consecutive panels integrated by one closed Newton-Cotes rule:
/// Simpson (2 panels), Simpson 3/8 (3 panels) or trapezoid (1 panel).
struct PanelGroup {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t panels() const { return last - first; }
};

/// Splits nodes [first, last] into groups. An even panel count is all Simpson;
/// an odd count >= 3 opens with one 3/8 group; a single panel is a trapezoid.
std::vector<PanelGroup> panel_groups(std::size_t first, std::size_t last);

/// Weights of group g at its nodes g.first..g.last, scaled by the step h.
std::vector<double> group_weights(const PanelGroup& g, double h);

/// Side at which node j is evaluated inside group g.
inline Side group_side(const PanelGroup& g, std::size_t j) {
  if (j == g.first) return Side::right;
  if (j == g.last) return Side::left;
  return Side::center;
}

/// Composite rule over nodes [first, last] of a uniform grid with step h.
/// f(node, side) supplies the integrand; zero is the additive identity of T.
template <class T, class F>
T integrate_nodes(std::size_t first, std::size_t last, double h, T zero, F&& f) {
  T acc = zero;
  if (last <= first) return acc;
  for (const PanelGroup& g : panel_groups(first, last)) {
    const auto w = group_weights(g, h);
    for (std::size_t j = g.first; j <= g.last; ++j) acc += w[j - g.first] * f(j, group_side(g, j));
  }
  return acc;
}

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points (Golub-Welsch).
const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, int panels = 64,
                 int order = 10);

}  // namespace avgh
