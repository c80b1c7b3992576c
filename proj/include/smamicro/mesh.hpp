#pragma once

#include <array>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace smamicro {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Edge shared by two triangles. `normal` is the outer unit normal of the
/// `plus` triangle and `tangent` is the normal rotated by +90 degrees, so that
/// nodes[1] - nodes[0] points along `tangent` in the reference configuration.
struct InteriorEdge {
  std::array<int, 2> nodes{};
  int plus = -1;
  int minus = -1;
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  double length = 0.0;
};

enum class Preset { example1, example2, custom };

Preset parse_preset(std::string_view name);
std::string_view preset_name(Preset preset);

/// Boundary treatment of the rectangle.
///   clamped:  every perimeter node is Dirichlet (example1).
///   sheared_ribbon: nodes on x1 = 0 and x1 = width are Dirichlet, top nodes
///             are periodic images of the bottom nodes (example2).
enum class BoundaryKind { clamped, sheared_ribbon };

BoundaryKind parse_boundary_kind(std::string_view name);
std::string_view boundary_kind_name(BoundaryKind kind);

/// Top node `slave` is the image of bottom node `master` shifted by the
/// domain height in x2.
struct PeriodicPair {
  int master = -1;
  int slave = -1;
};

struct NodeSets {
  std::vector<int> dirichlet;
  std::vector<PeriodicPair> periodic;
  std::vector<int> free;  ///< neither Dirichlet nor periodic slave
};

/// Structured triangulation of (0, width) x (0, height). Each of the nx*ny
/// rectangles is split by its lower-left to upper-right diagonal.
class Mesh2D {
 public:
  static Mesh2D structured(int nx, int ny, double width = 2.0, double height = 1.0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double width() const { return width_; }
  double height() const { return height_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return num_edges_; }

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<InteriorEdge>& interior_edges() const { return interior_edges_; }
  const std::vector<double>& areas() const { return areas_; }
  const std::vector<bool>& on_boundary() const { return on_boundary_; }

  /// Inverse of the reference edge matrix [X1 - X0, X2 - X0] per triangle.
  const Mat2& reference_inverse(int triangle) const { return reference_inverse_[triangle]; }

  int node_index(int i, int j) const { return j * (nx_ + 1) + i; }
  /// Horizontal layer (row of rectangles) containing a triangle.
  int layer_of(int triangle) const { return triangle / (2 * nx_); }

  double total_area() const;

  /// Deformation gradient of the P1 map given by `positions` on a triangle.
  Mat2 deformation_gradient(const Eigen::Matrix2Xd& positions, int triangle) const;

  /// Exchanges plus/minus of the given interior edge and flips its normal.
  void swap_edge_orientation(int edge);

  NodeSets classify_boundary(BoundaryKind kind) const;
  NodeSets classify_boundary(Preset preset) const;

  /// Plain-text node table (id x1 x2) followed by triangle table (id n1 n2 n3).
  void write_tables(std::ostream& out) const;

 private:
  int nx_ = 0;
  int ny_ = 0;
  double width_ = 0.0;
  double height_ = 0.0;
  int num_edges_ = 0;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<InteriorEdge> interior_edges_;
  std::vector<double> areas_;
  std::vector<Mat2> reference_inverse_;
  std::vector<bool> on_boundary_;
};

}  // namespace smamicro
