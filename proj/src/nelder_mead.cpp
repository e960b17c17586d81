#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace etpsim {

namespace {

struct Simplex {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> values;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& start, const NelderMeadOptions& options) {
  const Eigen::Index n = start.size();
  const double dn = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dn;
  const double contract = 0.75 - 1.0 / (2.0 * dn);
  const double shrink = 1.0 - 1.0 / dn;

  NelderMeadResult out;
  out.x = start;
  out.value = f(start);
  out.evaluations = 1;
  if (n == 0) {
    out.converged = true;
    return out;
  }

  auto eval = [&](const Eigen::VectorXd& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  for (int round = 0; round <= options.reinitializations; ++round) {
    const double before = out.value;
    Simplex s;
    s.points.push_back(out.x);
    s.values.push_back(out.value);
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd p = out.x;
      p(j) += options.initial_step;
      s.points.push_back(p);
      s.values.push_back(eval(p));
    }
    std::vector<std::size_t> order(static_cast<std::size_t>(n) + 1);
    bool converged = false;

    while (out.evaluations < options.max_evaluations) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
      const std::size_t best = order.front(), worst = order.back(),
                        second = order[order.size() - 2];

      double diameter = 0.0;
      for (std::size_t k = 1; k < order.size(); ++k) {
        diameter = std::max(diameter, (s.points[order[k]] - s.points[best]).lpNorm<Eigen::Infinity>());
      }
      if (s.values[worst] - s.values[best] <= options.f_tolerance ||
          diameter <= options.x_tolerance) {
        converged = true;
        break;
      }

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += s.points[order[k]];
      centroid /= dn;

      const Eigen::VectorXd xr = centroid + reflect * (centroid - s.points[worst]);
      const double fr = eval(xr);
      if (fr < s.values[best]) {
        const Eigen::VectorXd xe = centroid + expand * (xr - centroid);
        const double fe = eval(xe);
        if (fe < fr) {
          s.points[worst] = xe;
          s.values[worst] = fe;
        } else {
          s.points[worst] = xr;
          s.values[worst] = fr;
        }
        continue;
      }
      if (fr < s.values[second]) {
        s.points[worst] = xr;
        s.values[worst] = fr;
        continue;
      }
      const bool outside = fr < s.values[worst];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + contract * (xr - centroid))
                                         : Eigen::VectorXd(centroid - contract * (centroid - s.points[worst]));
      const double fc = eval(xc);
      if (fc < (outside ? fr : s.values[worst])) {
        s.points[worst] = xc;
        s.values[worst] = fc;
        continue;
      }
      for (std::size_t k = 1; k < order.size(); ++k) {
        const std::size_t idx = order[k];
        s.points[idx] = s.points[best] + shrink * (s.points[idx] - s.points[best]);
        s.values[idx] = eval(s.points[idx]);
      }
    }

    const auto it = std::min_element(s.values.begin(), s.values.end());
    const auto idx = static_cast<std::size_t>(std::distance(s.values.begin(), it));
    if (*it < out.value) {
      out.value = *it;
      out.x = s.points[idx];
    }
    out.converged = converged;
    if (!converged || before - out.value <= options.f_tolerance) break;
  }
  return out;
}

}  // namespace etpsim
