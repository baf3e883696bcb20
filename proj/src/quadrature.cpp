#include "avgh/quadrature.hpp"

#include <map>
#include <mutex>

#include <Eigen/Dense>

namespace avgh {

std::vector<PanelGroup> panel_groups(std::size_t first, std::size_t last) {
  std::vector<PanelGroup> out;
  if (last <= first) return out;
  const std::size_t count = last - first;
  if (count == 1) return {{first, last}};
  std::size_t j = first;
  if (count % 2 == 1) {
    out.push_back({j, j + 3});
    j += 3;
  }
  for (; j < last; j += 2) out.push_back({j, j + 2});
  return out;
}

std::vector<double> group_weights(const PanelGroup& g, double h) {
  switch (g.panels()) {
    case 1: return {h / 2, h / 2};
    case 2: return {h / 3, 4 * h / 3, h / 3};
    case 3: return {3 * h / 8, 9 * h / 8, 9 * h / 8, 3 * h / 8};
    default: return {};
  }
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussRule rule;
  for (int k = 0; k < n; ++k) {
    rule.nodes.push_back(es.eigenvalues()(k));
    const double v = es.eigenvectors()(0, k);
    rule.weights.push_back(2.0 * v * v);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double part = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      part += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
    acc += 0.5 * h * part;
  }
  return acc;
}

}  // namespace avgh
