#include "polyopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace polyopt {

namespace {

constexpr double kFeasTol = 1e-9;

bool feasible(const PopInstance& inst, const Eigen::VectorXd& x) {
  for (const auto& c : inst.constraints) {
    if (evaluate(c.poly, x) < -kFeasTol) return false;
  }
  return true;
}

// c - sum a_i x_i^2 >= 0 with c, a_i > 0 for every variable
std::optional<std::vector<std::array<double, 2>>> ball_box(const PopInstance& inst) {
  for (const auto& c : inst.constraints) {
    const double constant = c.poly.coefficient(Monomial::constant(inst.n));
    if (!(constant > 0.0)) continue;
    std::vector<double> weight(static_cast<size_t>(inst.n), 0.0);
    bool pattern = true;
    for (const auto& [mon, coef] : c.poly.terms()) {
      if (mon.degree() == 0) continue;
      int var = -1;
      for (int i = 0; i < inst.n && pattern; ++i) {
        const int e = mon.exponent(i);
        if (e == 0) continue;
        if (e != 2 || var >= 0) pattern = false;
        var = i;
      }
      if (!pattern || var < 0 || !(coef < 0.0)) {
        pattern = false;
        break;
      }
      weight[static_cast<size_t>(var)] = -coef;
    }
    if (!pattern) continue;
    if (std::any_of(weight.begin(), weight.end(), [](double w) { return !(w > 0.0); }))
      continue;
    std::vector<std::array<double, 2>> box;
    for (int i = 0; i < inst.n; ++i) {
      const double r = std::sqrt(constant / weight[static_cast<size_t>(i)]);
      box.push_back({-r, r});
    }
    return box;
  }
  return std::nullopt;
}

struct GridPoint {
  double f = 0.0;
  long index = 0;  // linear grid index, deterministic tie-break
  Eigen::VectorXd x;
};

// Axis-aligned descent with halving steps; only accepts feasible strict
// improvements, so the incumbent never worsens.
int refine(const PopInstance& inst, const std::vector<std::array<double, 2>>& box,
           double initial_step, GridPoint& point) {
  int accepted = 0;
  double step = initial_step;
  Eigen::VectorXd trial = point.x;
  while (step > 1e-10) {
    bool improved = false;
    for (int i = 0; i < inst.n; ++i) {
      for (const double dir : {1.0, -1.0}) {
        trial = point.x;
        trial[i] = std::clamp(point.x[i] + dir * step, box[static_cast<size_t>(i)][0],
                              box[static_cast<size_t>(i)][1]);
        if (trial[i] == point.x[i]) continue;
        if (!feasible(inst, trial)) continue;
        const double f = evaluate(inst.objective, trial);
        if (f < point.f) {
          point.x = trial;
          point.f = f;
          ++accepted;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return accepted;
}

}  // namespace

std::optional<std::vector<std::array<double, 2>>> bounding_box(const PopInstance& inst) {
  if (inst.box) return inst.box;
  return ball_box(inst);
}

OracleResult grid_multistart(const PopInstance& inst,
                             const std::vector<std::array<double, 2>>& box, int resolution) {
  if (inst.n > 4) throw std::invalid_argument("oracle: supported up to 4 variables");
  if (static_cast<int>(box.size()) != inst.n)
    throw std::invalid_argument("oracle: box dimension mismatch");
  if (resolution < 2) throw std::invalid_argument("oracle: resolution must be >= 2");

  const int n = inst.n;
  double max_spacing = 0.0;
  for (const auto& b : box) {
    max_spacing = std::max(max_spacing, (b[1] - b[0]) / (resolution - 1));
  }

  // dense scan, keeping the ten best feasible points
  std::vector<GridPoint> best;
  std::vector<int> ticks(static_cast<size_t>(n), 0);
  Eigen::VectorXd x(n);
  long linear = 0;
  while (true) {
    for (int i = 0; i < n; ++i) {
      const auto& b = box[static_cast<size_t>(i)];
      x[i] = b[0] + (b[1] - b[0]) * ticks[static_cast<size_t>(i)] / (resolution - 1);
    }
    if (feasible(inst, x)) {
      GridPoint p{evaluate(inst.objective, x), linear, x};
      auto at = std::upper_bound(best.begin(), best.end(), p, [](const auto& a, const auto& b) {
        return std::tie(a.f, a.index) < std::tie(b.f, b.index);
      });
      best.insert(at, std::move(p));
      if (best.size() > 10) best.pop_back();
    }
    ++linear;
    int axis = 0;
    while (axis < n && ++ticks[static_cast<size_t>(axis)] == resolution) {
      ticks[static_cast<size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == n) break;
  }
  if (best.empty()) throw std::runtime_error("oracle: no feasible grid point");

  OracleResult result;
  result.grid_resolution = resolution;
  GridPoint incumbent = best.front();
  for (auto& start : best) {
    result.refinements += refine(inst, box, max_spacing, start);
    if (std::tie(start.f, start.index) < std::tie(incumbent.f, incumbent.index)) {
      incumbent = start;
    }
  }
  result.x_best = incumbent.x;
  result.f_best = incumbent.f;
  return result;
}

std::string oracle_to_json(const OracleResult& result, int indent) {
  nlohmann::ordered_json doc;
  doc["x_best"] = std::vector<double>(result.x_best.begin(), result.x_best.end());
  doc["f_best"] = result.f_best;
  doc["grid_resolution"] = result.grid_resolution;
  doc["refinements"] = result.refinements;
  return doc.dump(indent);
}

Eigen::VectorXd dirac_moments(const Eigen::Ref<const Eigen::VectorXd>& x_hat,
                              const MomentIndex& idx) {
  if (x_hat.size() != idx.dimension())
    throw std::invalid_argument("dirac_moments: dimension mismatch");
  Eigen::VectorXd y(idx.size());
  for (int i = 0; i < idx.size(); ++i) {
    const Monomial& mon = idx.monomial(i);
    double v = 1.0;
    for (int j = 0; j < idx.dimension(); ++j) {
      for (int e = 0; e < mon.exponent(j); ++e) v *= x_hat[j];
    }
    y[i] = v;
  }
  return y;
}

}  // namespace polyopt
