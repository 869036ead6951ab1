#include "fountain/time_grid.hpp"

#include <cmath>
#include <string>

namespace fountain {

TimeGrid::TimeGrid(double period, int node_count, int dimension)
    : period_(period), nodes_(node_count), dim_(dimension) {
  if (!(period > 0.0) || !std::isfinite(period))
    throw std::invalid_argument("TimeGrid: period must be positive and finite");
  if (node_count <= 0 || node_count % 2 != 0)
    throw std::invalid_argument("TimeGrid: node count must be a positive even integer, got " +
                                std::to_string(node_count));
  if (dimension <= 0) throw std::invalid_argument("TimeGrid: dimension must be positive");
}

GridFunction::GridFunction(const TimeGrid& grid)
    : grid_(grid), values_(Eigen::VectorXd::Zero(grid.size())) {}

GridFunction::GridFunction(const TimeGrid& grid, Eigen::VectorXd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("GridFunction: expected " + std::to_string(grid_.size()) +
                                " values, got " + std::to_string(values_.size()));
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid(), "GridFunction +");
  return {a.grid(), a.values() + b.values()};
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid(), b.grid(), "GridFunction -");
  return {a.grid(), a.values() - b.values()};
}

GridFunction operator*(double s, const GridFunction& a) { return {a.grid(), s * a.values()}; }

MatrixPath::MatrixPath(const TimeGrid& grid, std::vector<Eigen::MatrixXd> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (static_cast<int>(samples_.size()) != grid_.nodes())
    throw std::invalid_argument("MatrixPath: one sample per node required");
  for (const auto& s : samples_)
    if (s.rows() != grid_.dim() || s.cols() != grid_.dim())
      throw std::invalid_argument("MatrixPath: samples must be N x N");
}

MatrixPath MatrixPath::zero(const TimeGrid& grid) { return constant(grid, 0.0); }

MatrixPath MatrixPath::constant(const TimeGrid& grid, double c) {
  return sample(grid, [&](double) -> Eigen::MatrixXd {
    return c * Eigen::MatrixXd::Identity(grid.dim(), grid.dim());
  });
}

bool MatrixPath::is_constant(double tol) const {
  for (const auto& s : samples_)
    if ((s - samples_.front()).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

}  // namespace fountain
