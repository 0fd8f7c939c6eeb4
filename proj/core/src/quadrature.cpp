#include "corrlasso/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "corrlasso/scalar_kernels.hpp"

namespace corrlasso {
namespace {

constexpr double kTruncation = 12.0;
constexpr double kMaxPanelWidth = 1.0;
constexpr std::size_t kPanelNodes = 20;

const std::vector<QuadratureNode>& panel_rule() {
  static const std::vector<QuadratureNode> rule = legendre_nodes(kPanelNodes);
  return rule;
}

}  // namespace

double gaussian_expectation(const std::function<double(double)>& f,
                            std::span<const double> breakpoints) {
  std::vector<double> cuts{-kTruncation, kTruncation};
  for (double b : breakpoints) {
    if (std::isfinite(b) && b > -kTruncation && b < kTruncation) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto& rule = panel_rule();
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s];
    const double hi = cuts[s + 1];
    const auto panels = static_cast<int>(std::ceil((hi - lo) / kMaxPanelWidth));
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + p * width;
      const double mid = a + 0.5 * width;
      const double half = 0.5 * width;
      double panel = 0.0;
      for (const auto& q : rule) {
        const double z = mid + half * q.node;
        panel += q.weight * f(z) * gauss_pdf(z);
      }
      total += half * panel;
    }
  }
  return total;
}

}  // namespace corrlasso
