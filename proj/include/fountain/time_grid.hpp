#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

namespace fountain {

/// Uniform periodic grid t_j = jT/M on S_T = R/TZ carrying R^N valued paths.
class TimeGrid {
 public:
  TimeGrid(double period, int node_count, int dimension);

  double period() const { return period_; }
  int nodes() const { return nodes_; }
  int dim() const { return dim_; }
  /// Length of a flattened path, M*N.
  int size() const { return nodes_ * dim_; }
  double node(int j) const { return period_ * j / nodes_; }
  /// Periodic rectangle-rule weight T/M.
  double weight() const { return period_ / nodes_; }

  bool operator==(const TimeGrid& other) const = default;

 private:
  double period_;
  int nodes_;
  int dim_;
};

/// A discrete T-periodic path. Values are stored node-major: entry j*N + n
/// is component n at node t_j, which matches the Kronecker layout D (x) I_N.
class GridFunction {
 public:
  explicit GridFunction(const TimeGrid& grid);
  GridFunction(const TimeGrid& grid, Eigen::VectorXd values);

  const TimeGrid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  std::span<const double> at(int j) const {
    return {values_.data() + static_cast<std::ptrdiff_t>(j) * grid_.dim(),
            static_cast<std::size_t>(grid_.dim())};
  }
  std::span<double> at(int j) {
    return {values_.data() + static_cast<std::ptrdiff_t>(j) * grid_.dim(),
            static_cast<std::size_t>(grid_.dim())};
  }
  double operator()(int j, int n) const { return values_[j * grid_.dim() + n]; }
  double& operator()(int j, int n) { return values_[j * grid_.dim() + n]; }

  bool all_finite() const { return values_.allFinite(); }

  /// Builds a path by sampling f(t, out) at every node.
  template <typename F>
  static GridFunction sample(const TimeGrid& grid, F&& f) {
    GridFunction u(grid);
    for (int j = 0; j < grid.nodes(); ++j) f(grid.node(j), u.at(j));
    return u;
  }

  GridFunction operator-() const { return {grid_, -values_}; }

 private:
  TimeGrid grid_;
  Eigen::VectorXd values_;
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, const GridFunction& a);

/// Throws std::invalid_argument when the two grids differ.
void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where);

/// Samples U(t_j) of the symmetric coefficient matrix.
class MatrixPath {
 public:
  MatrixPath(const TimeGrid& grid, std::vector<Eigen::MatrixXd> samples);

  static MatrixPath zero(const TimeGrid& grid);
  /// U(t) = c I_N.
  static MatrixPath constant(const TimeGrid& grid, double c);

  template <typename F>
  static MatrixPath sample(const TimeGrid& grid, F&& f) {
    std::vector<Eigen::MatrixXd> s;
    s.reserve(grid.nodes());
    for (int j = 0; j < grid.nodes(); ++j) s.push_back(f(grid.node(j)));
    return MatrixPath(grid, std::move(s));
  }

  const TimeGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& at(int j) const { return samples_[j]; }
  int size() const { return static_cast<int>(samples_.size()); }
  /// True when every sample equals the first one.
  bool is_constant(double tol = 0.0) const;

 private:
  TimeGrid grid_;
  std::vector<Eigen::MatrixXd> samples_;
};

}  // namespace fountain
