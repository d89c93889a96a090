#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace choquard {

enum class GridKind { cartesian, radial };

std::string_view to_string(GridKind kind);
GridKind grid_kind_from_string(std::string_view name);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// One term c * (u_i - u_j)^2 of the discrete Dirichlet energy.
struct Edge {
  std::size_t i;
  std::size_t j;
  double coefficient;
};

/**
 * Discretization of the disc of radius R.
 *
 * Cartesian grids are cell-centred n x n grids on [-R, R]^2; the weight of a
 * cell is the exact area of its intersection with the disc, so cells outside
 * the disc carry zero weight and are inactive. Radial grids hold profiles
 * u(|x|) on nodes 0 = r_0 < r_1 = R/(10 n) < ... < r_{n-1} = R, graded
 * geometrically; weights include the 2 pi r factor and integrate piecewise
 * quadratic profiles exactly.
 */
class Grid {
 public:
  GridKind kind() const { return kind_; }
  double radius() const { return radius_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return weights_.size(); }

  std::span<const double> weights() const { return weights_; }
  /// |x| of every node.
  std::span<const double> radii() const { return radii_; }
  /// Nodes forced into a radial grid (empty for cartesian grids).
  std::span<const double> breakpoints() const { return breakpoints_; }
  /// Difference stencil of the Dirichlet energy: sum of c (u_i - u_j)^2.
  std::span<const Edge> edges() const { return edges_; }

  /// Radial nodes report (r, 0).
  Point node(std::size_t k) const;
  bool active(std::size_t k) const { return weights_[k] > 0.0; }

  /// Cell width of a cartesian grid.
  double spacing() const { return spacing_; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(resolution_) +
           static_cast<std::size_t>(j);
  }

  /// Area of the truncated domain.
  double measure() const;

  bool same_as(const Grid& other) const;

 private:
  friend std::shared_ptr<const Grid> build_grid(GridKind, double, int);
  friend std::shared_ptr<const Grid> build_radial_grid(double, int, std::span<const double>);

  Grid() = default;

  GridKind kind_ = GridKind::cartesian;
  double radius_ = 0.0;
  int resolution_ = 0;
  double spacing_ = 0.0;
  std::vector<double> weights_;
  std::vector<double> radii_;
  std::vector<double> breakpoints_;
  std::vector<Edge> edges_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(GridKind kind, double radius, int resolution);

/// Radial grid whose nearest nodes are moved onto the given radii.
GridPtr build_radial_grid(double radius, int resolution, std::span<const double> breakpoints);

/// Exact area of [x0, x1] x [y0, y1] intersected with the disc of radius R.
double rectangle_disc_area(double x0, double x1, double y0, double y1, double radius);

/// Nodal values on a grid; all values are finite.
class GridField {
 public:
  GridField(GridPtr grid, std::vector<double> values);

  static GridField zeros(GridPtr grid);
  static GridField constant(GridPtr grid, double value);
  /// Radial grids pass (r, 0).
  static GridField sample(GridPtr grid, const std::function<double(Point)>& fn);
  static GridField sample_radial(GridPtr grid, const std::function<double(double)>& profile);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  GridField scaled(double factor) const;
  GridField mapped(const std::function<double(double)>& fn) const;

  friend GridField operator+(const GridField& a, const GridField& b);
  friend GridField operator-(const GridField& a, const GridField& b);
  friend GridField operator*(double factor, const GridField& a) { return a.scaled(factor); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

void require_same_grid(const Grid& a, const Grid& b);

/// Sum_i w_i map(u_i) weight_i.
double integrate(const GridField& u);
double integrate(const GridField& u, const std::function<double(double)>& map);
double integrate(const GridField& u, const std::function<double(double)>& map,
                 const GridField& weight);

/// Integral of |grad u|^2 over the truncated domain (for radial profiles the
/// 2 pi r factor is included). Central differences on cell edges.
double dirichlet_energy(const GridField& u);

/// Gradient of u -> dirichlet_energy(u) / 2 with respect to the nodal values,
/// accumulated into out (size = node count).
void add_stiffness_product(const Grid& grid, std::span<const double> u, std::span<double> out);

/// Sum_i w_i a_i b_i.
double inner_product(const GridField& a, const GridField& b);

}  // namespace choquard
