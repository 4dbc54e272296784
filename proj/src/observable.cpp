#include "homokin/observable.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace homokin {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Observable Observable::coordinate() {
  return {"y", 1, [](std::span<const double> y, std::span<const double>) { return y[0]; }};
}

Observable Observable::momentum() {
  return {"xi", 1, [](std::span<const double>, std::span<const double> xi) { return xi[0]; }};
}

Observable Observable::momentum_component(int axis, int dim) {
  if (axis < 0 || axis >= dim) throw ValidationError("momentum component out of range");
  return {"xi_" + std::to_string(axis), dim,
          [axis](std::span<const double>, std::span<const double> xi) { return xi[axis]; }};
}

Observable Observable::constant(double c) {
  return {"const", 0, [c](std::span<const double>, std::span<const double>) { return c; }};
}

Observable Observable::sin_y(double wavenumber) {
  return {"sin_y", 1, [wavenumber](std::span<const double> y, std::span<const double>) {
            return std::sin(kTwoPi * wavenumber * y[0]);
          }};
}

Observable Observable::cos_y(double wavenumber) {
  return {"cos_y", 1, [wavenumber](std::span<const double> y, std::span<const double>) {
            return std::cos(kTwoPi * wavenumber * y[0]);
          }};
}

Observable Observable::kinetic() {
  return {"kinetic", 0, [](std::span<const double>, std::span<const double> xi) {
            double s = 0.0;
            for (double v : xi) s += v * v;
            return 0.5 * s;
          }};
}

Observable Observable::speed_band(double lo, double hi) {
  if (!(lo < hi)) throw ValidationError("speed band needs lo < hi");
  return {"speed_band", 0, [lo, hi](std::span<const double>, std::span<const double> xi) {
            double s = 0.0;
            for (double v : xi) s += v * v;
            const double sp = std::sqrt(s);
            return (sp >= lo && sp < hi) ? 1.0 : 0.0;
          }};
}

Observable Observable::tabulated(int ny, std::vector<double> xi_grid,
                                 std::vector<std::vector<double>> values) {
  if (ny < 2 || xi_grid.size() < 2) throw ValidationError("table needs at least a 2x2 grid");
  if (!std::is_sorted(xi_grid.begin(), xi_grid.end()))
    throw ValidationError("xi grid must be increasing");
  if (values.size() != static_cast<size_t>(ny)) throw ValidationError("table row count mismatch");
  for (const auto& row : values)
    if (row.size() != xi_grid.size()) throw ValidationError("table column count mismatch");
  auto grid = std::make_shared<std::vector<double>>(std::move(xi_grid));
  auto vals = std::make_shared<std::vector<std::vector<double>>>(std::move(values));
  return {"table", 1,
          [ny, grid, vals](std::span<const double> y, std::span<const double> xi) {
            double fy = (y[0] - std::floor(y[0])) * ny;
            int i = static_cast<int>(fy);
            if (i >= ny) i = ny - 1;
            const double ty = fy - i;
            const int i1 = (i + 1) % ny;
            const auto& g = *grid;
            double x = std::clamp(xi[0], g.front(), g.back());
            auto it = std::upper_bound(g.begin(), g.end(), x);
            int j = std::max<int>(0, static_cast<int>(it - g.begin()) - 1);
            if (j >= static_cast<int>(g.size()) - 1) j = static_cast<int>(g.size()) - 2;
            const double tx = (x - g[j]) / (g[j + 1] - g[j]);
            const auto& v = *vals;
            return (1 - ty) * ((1 - tx) * v[i][j] + tx * v[i][j + 1]) +
                   ty * ((1 - tx) * v[i1][j] + tx * v[i1][j + 1]);
          }};
}

Observable Observable::product_separable(std::function<double(double)> g_y,
                                         std::function<double(double)> g_xi) {
  if (!g_y || !g_xi) throw ValidationError("empty factor in separable observable");
  return {"g(y)h(xi)", 1,
          [g_y = std::move(g_y), g_xi = std::move(g_xi)](std::span<const double> y,
                                                         std::span<const double> xi) {
            return g_y(y[0]) * g_xi(xi[0]);
          }};
}

Observable Observable::axis_product(std::vector<Observable> fs) {
  if (fs.empty()) throw ValidationError("axis product needs at least one factor");
  std::string label;
  for (size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].empty()) throw ValidationError("empty factor in axis product");
    if (fs[i].dim() > 1) throw DimensionMismatch("axis product factors must be one-dimensional");
    label += (i ? "*" : "") + fs[i].label() + "[" + std::to_string(i) + "]";
  }
  const int n = static_cast<int>(fs.size());
  auto factors = std::make_shared<std::vector<Observable>>(std::move(fs));
  return {label, n, [factors](std::span<const double> y, std::span<const double> xi) {
            double prod = 1.0;
            for (size_t i = 0; i < factors->size(); ++i)
              prod *= (*factors)[i].eval1(y[i], xi[i]);
            return prod;
          }};
}

Observable Observable::operator+(const Observable& o) const {
  if (empty() || o.empty()) throw ValidationError("empty observable in sum");
  if (dim_ > 0 && o.dim_ > 0 && dim_ != o.dim_)
    throw DimensionMismatch("sum of observables with different dimensions");
  Fn a = fn_, b = o.fn_;
  return {label_ + "+" + o.label_, std::max(dim_, o.dim_),
          [a, b](std::span<const double> y, std::span<const double> xi) { return a(y, xi) + b(y, xi); }};
}

Observable Observable::operator*(const Observable& o) const {
  if (empty() || o.empty()) throw ValidationError("empty observable in product");
  if (dim_ > 0 && o.dim_ > 0 && dim_ != o.dim_)
    throw DimensionMismatch("product of observables with different dimensions");
  Fn a = fn_, b = o.fn_;
  return {label_ + "*" + o.label_, std::max(dim_, o.dim_),
          [a, b](std::span<const double> y, std::span<const double> xi) { return a(y, xi) * b(y, xi); }};
}

Observable Observable::scaled(double c) const {
  if (empty()) throw ValidationError("empty observable");
  Fn a = fn_;
  return {label_, dim_, [a, c](std::span<const double> y, std::span<const double> xi) {
            return c * a(y, xi);
          }};
}

}  // namespace homokin
