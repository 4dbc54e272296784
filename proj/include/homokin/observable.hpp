#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "homokin/errors.hpp"

namespace homokin {

// Phase-space observable F(y, xi). Dimension 0 means "any dimension"; the
// evaluator must then only use components that exist.
class Observable {
 public:
  using Fn = std::function<double(std::span<const double>, std::span<const double>)>;

  Observable() = default;
  Observable(std::string label, int dim, Fn fn)
      : label_(std::move(label)), dim_(dim), fn_(std::move(fn)) {}

  double operator()(std::span<const double> y, std::span<const double> xi) const {
    if (!fn_) throw ValidationError("empty observable");
    if (dim_ > 0 && (static_cast<int>(y.size()) != dim_ || xi.size() != y.size()))
      throw DimensionMismatch("observable dimension mismatch: " + label_);
    return fn_(y, xi);
  }
  double eval1(double y, double xi) const {
    return (*this)(std::span<const double>(&y, 1), std::span<const double>(&xi, 1));
  }

  const std::string& label() const { return label_; }
  int dim() const { return dim_; }
  bool empty() const { return !fn_; }

  // --- 1-D factories ---
  static Observable coordinate();           // y
  static Observable momentum();             // xi
  static Observable momentum_component(int axis, int dim);
  static Observable constant(double c);
  static Observable sin_y(double wavenumber);  // sin(2*pi*k*y)
  static Observable cos_y(double wavenumber);  // cos(2*pi*k*y)
  static Observable kinetic();              // |xi|^2 / 2
  static Observable speed_band(double lo, double hi);  // indicator lo <= |xi| < hi
  // bilinear table: values[i][j] = F(i/ny, xi_grid[j]); periodic in y, clamped in xi
  static Observable tabulated(int ny, std::vector<double> xi_grid,
                              std::vector<std::vector<double>> values);
  static Observable product_separable(std::function<double(double)> g_y,
                                      std::function<double(double)> g_xi);
  // N-D product of per-axis observables: F(y, xi) = prod_i fs[i](y_i, xi_i).
  static Observable axis_product(std::vector<Observable> fs);

  Observable operator+(const Observable& o) const;
  Observable operator*(const Observable& o) const;
  Observable scaled(double c) const;

 private:
  std::string label_;
  int dim_ = 0;
  Fn fn_;
};

}  // namespace homokin
