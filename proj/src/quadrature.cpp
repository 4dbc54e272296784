#include "homokin/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace homokin::quad {

namespace {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

// Nodes by Newton iteration on the Legendre recurrence.
GaussRule make_gauss_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

const GaussRule& gauss_rule(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_rule(n)).first;
  return it->second;
}

double composite_pass(const std::function<double(double)>& f, double a, double b,
                      int panels, const GaussRule& rule) {
  const double w = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    const double mid = lo + 0.5 * w;
    double acc = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      const double s = mid + 0.5 * w * rule.nodes[i];
      const double v = f(s);
      if (!std::isfinite(v)) throw QuadratureError("integrand not finite inside the domain");
      acc += rule.weights[i] * v;
    }
    total += 0.5 * w * acc;
  }
  return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt) {
  if (a == b) return 0.0;
  const GaussRule& rule = gauss_rule(opt.points);
  int panels = 1;
  double prev = composite_pass(f, a, b, panels, rule);
  for (int level = 1; level <= opt.max_doublings; ++level) {
    panels *= 2;
    const double cur = composite_pass(f, a, b, panels, rule);
    const double scale = std::max({std::fabs(cur), std::fabs(prev), 1e-300});
    if (std::fabs(cur - prev) <= std::max(opt.abs_tol, opt.rel_tol * scale)) return cur;
    prev = cur;
  }
  throw QuadratureError("panel refinement did not stabilize");
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const Options& opt) {
  if (a == b) return 0.0;
  const GaussRule& rule = gauss_rule(opt.points);
  const double width = b - a;
  // scale from a modest uniform pass so the relative tolerance has a target
  const double scale = std::max(std::fabs(composite_pass(f, a, b, 8, rule)), 1e-300);
  constexpr int kMaxDepth = 48;
  constexpr long kPanelBudget = 1L << 17;
  long used = 0;
  auto one_panel = [&](double lo, double hi) {
    if (++used > kPanelBudget) throw QuadratureError("adaptive refinement exceeded its budget");
    return composite_pass(f, lo, hi, 1, rule);
  };
  struct Item {
    double lo, hi, est;
    int depth;
  };
  std::vector<Item> stack{{a, b, one_panel(a, b), 0}};
  double total = 0.0;
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (it.lo + it.hi);
    const double left = one_panel(it.lo, mid);
    const double right = one_panel(mid, it.hi);
    const double tol =
        std::max(opt.abs_tol, opt.rel_tol * scale) * std::fabs(it.hi - it.lo) / std::fabs(width);
    if (std::fabs(left + right - it.est) <= tol) {
      total += left + right;
      continue;
    }
    if (it.depth >= kMaxDepth)
      throw QuadratureError("adaptive refinement hit its depth cap");
    stack.push_back({it.lo, mid, left, it.depth + 1});
    stack.push_back({mid, it.hi, right, it.depth + 1});
  }
  return total;
}

double integrate_singular(const std::function<double(double)>& f, double a, double b,
                          bool singular_left, bool singular_right, const Options& opt) {
  if (a == b) return 0.0;
  if (!singular_left && !singular_right) return integrate(f, a, b, opt);
  const double len = b - a;
  const double lo_clamp = std::nextafter(a, b);
  const double hi_clamp = std::nextafter(b, a);
  auto g = [&](double theta) {
    const double st = std::sin(theta);
    double s = a + len * st * st;
    if (s <= a) s = lo_clamp;
    if (s >= b) s = hi_clamp;
    return f(s) * len * std::sin(2.0 * theta);
  };
  return integrate(g, 0.0, std::numbers::pi / 2.0, opt);
}

double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double x_tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > x_tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

double bracketed_root(const std::function<double(double)>& f, double a, double b,
                      double x_tol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw NumericError("bracketed_root: endpoints do not bracket a sign change");
  for (int iter = 0; iter < 200 && (b - a) > x_tol; ++iter) {
    // secant candidate, clipped away from the bracket edges for robustness
    double m = 0.5 * (a + b);
    const double denom = fb - fa;
    if (denom != 0.0) {
      const double sec = a - fa * (b - a) / denom;
      const double margin = 0.01 * (b - a);
      if (sec > a + margin && sec < b - margin) m = sec;
    }
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

double nudge_inside(const std::function<double(double)>& margin, double x, double toward) {
  if (margin(x) > 0.0) return x;
  const double dir = toward > x ? 1.0 : -1.0;
  double delta = std::fabs(x) > 0.0 ? std::fabs(x) * 1e-16 : 1e-300;
  for (int i = 0; i < 200; ++i) {
    const double trial = x + dir * delta;
    if ((dir > 0.0 && trial > toward) || (dir < 0.0 && trial < toward)) break;
    if (margin(trial) > 0.0) return trial;
    delta *= 2.0;
  }
  throw QuadratureError("could not place an endpoint inside the integration region");
}

}  // namespace homokin::quad
