#include "smamicro/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace smamicro {

Preset parse_preset(std::string_view name) {
  if (name == "example1") return Preset::example1;
  if (name == "example2") return Preset::example2;
  if (name == "custom") return Preset::custom;
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::string_view preset_name(Preset preset) {
  switch (preset) {
    case Preset::example1: return "example1";
    case Preset::example2: return "example2";
    case Preset::custom: return "custom";
  }
  return "?";
}

BoundaryKind parse_boundary_kind(std::string_view name) {
  if (name == "clamped") return BoundaryKind::clamped;
  if (name == "sheared_ribbon") return BoundaryKind::sheared_ribbon;
  throw std::invalid_argument("unknown boundary kind '" + std::string(name) + "'");
}

std::string_view boundary_kind_name(BoundaryKind kind) {
  return kind == BoundaryKind::clamped ? "clamped" : "sheared_ribbon";
}

Mesh2D Mesh2D::structured(int nx, int ny, double width, double height) {
  if (nx <= 0 || ny <= 0) {
    throw std::invalid_argument("structured mesh needs nx >= 1 and ny >= 1, got " +
                                std::to_string(nx) + " x " + std::to_string(ny));
  }
  if (!(width > 0.0) || !(height > 0.0)) {
    throw std::invalid_argument("structured mesh needs a positive domain size");
  }

  Mesh2D mesh;
  mesh.nx_ = nx;
  mesh.ny_ = ny;
  mesh.width_ = width;
  mesh.height_ = height;

  const double hx = width / nx;
  const double hy = height / ny;
  mesh.nodes_.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  mesh.on_boundary_.reserve(mesh.nodes_.capacity());
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // The last row/column is pinned to the exact domain size.
      const double x = (i == nx) ? width : i * hx;
      const double y = (j == ny) ? height : j * hy;
      mesh.nodes_.emplace_back(x, y);
      mesh.on_boundary_.push_back(i == 0 || i == nx || j == 0 || j == ny);
    }
  }

  mesh.triangles_.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = mesh.node_index(i, j);
      const int n10 = mesh.node_index(i + 1, j);
      const int n01 = mesh.node_index(i, j + 1);
      const int n11 = mesh.node_index(i + 1, j + 1);
      mesh.triangles_.push_back({n00, n10, n11});
      mesh.triangles_.push_back({n00, n11, n01});
    }
  }

  mesh.areas_.reserve(mesh.triangles_.size());
  mesh.reference_inverse_.reserve(mesh.triangles_.size());
  for (const auto& tri : mesh.triangles_) {
    Mat2 dm;
    dm.col(0) = mesh.nodes_[tri[1]] - mesh.nodes_[tri[0]];
    dm.col(1) = mesh.nodes_[tri[2]] - mesh.nodes_[tri[0]];
    const double signed_area = 0.5 * dm.determinant();
    if (!(signed_area > 0.0)) throw std::logic_error("structured mesh produced a flipped triangle");
    mesh.areas_.push_back(signed_area);
    mesh.reference_inverse_.push_back(dm.inverse());
  }

  // Edge -> adjacent triangles, keyed by the sorted node pair. std::map keeps
  // the interior edge order deterministic.
  std::map<std::pair<int, int>, std::vector<int>> adjacency;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      adjacency[{std::min(a, b), std::max(a, b)}].push_back(t);
    }
  }
  mesh.num_edges_ = static_cast<int>(adjacency.size());

  for (const auto& [key, tris] : adjacency) {
    if (tris.size() == 1) continue;
    if (tris.size() != 2) throw std::logic_error("edge shared by more than two triangles");
    InteriorEdge edge;
    edge.plus = tris[0];
    edge.minus = tris[1];
    const Vec2& pa = mesh.nodes_[key.first];
    const Vec2& pb = mesh.nodes_[key.second];
    const Vec2 d = pb - pa;
    edge.length = d.norm();
    Vec2 normal(d.y(), -d.x());
    normal /= edge.length;

    // Orient the normal outward from the plus triangle.
    const auto& tp = mesh.triangles_[edge.plus];
    const Vec2 centroid = (mesh.nodes_[tp[0]] + mesh.nodes_[tp[1]] + mesh.nodes_[tp[2]]) / 3.0;
    if (normal.dot(pa - centroid) < 0.0) normal = -normal;
    edge.normal = normal;
    edge.tangent = Vec2(-normal.y(), normal.x());
    if (edge.tangent.dot(d) > 0.0) {
      edge.nodes = {key.first, key.second};
    } else {
      edge.nodes = {key.second, key.first};
    }
    mesh.interior_edges_.push_back(edge);
  }
  return mesh;
}

double Mesh2D::total_area() const {
  double sum = 0.0;
  for (double a : areas_) sum += a;
  return sum;
}

Mat2 Mesh2D::deformation_gradient(const Eigen::Matrix2Xd& positions, int triangle) const {
  const auto& tri = triangles_[triangle];
  Mat2 ds;
  ds.col(0) = positions.col(tri[1]) - positions.col(tri[0]);
  ds.col(1) = positions.col(tri[2]) - positions.col(tri[0]);
  return ds * reference_inverse_[triangle];
}

void Mesh2D::swap_edge_orientation(int edge) {
  auto& e = interior_edges_.at(edge);
  std::swap(e.plus, e.minus);
  e.normal = -e.normal;
  e.tangent = -e.tangent;
  std::swap(e.nodes[0], e.nodes[1]);
}

NodeSets Mesh2D::classify_boundary(BoundaryKind kind) const {
  NodeSets sets;
  std::vector<bool> constrained(nodes_.size(), false);
  if (kind == BoundaryKind::clamped) {
    for (int n = 0; n < num_nodes(); ++n) {
      if (on_boundary_[n]) {
        sets.dirichlet.push_back(n);
        constrained[n] = true;
      }
    }
  } else {
    for (int j = 0; j <= ny_; ++j) {
      for (int i : {0, nx_}) {
        const int n = node_index(i, j);
        sets.dirichlet.push_back(n);
        constrained[n] = true;
      }
    }
    std::sort(sets.dirichlet.begin(), sets.dirichlet.end());
    // Corners are already Dirichlet; pair only the interior columns.
    for (int i = 1; i < nx_; ++i) {
      const int bottom = node_index(i, 0);
      const int top = node_index(i, ny_);
      sets.periodic.push_back({bottom, top});
      constrained[top] = true;
    }
  }
  for (int n = 0; n < num_nodes(); ++n) {
    if (!constrained[n]) sets.free.push_back(n);
  }
  return sets;
}

NodeSets Mesh2D::classify_boundary(Preset preset) const {
  switch (preset) {
    case Preset::example1: return classify_boundary(BoundaryKind::clamped);
    case Preset::example2: return classify_boundary(BoundaryKind::sheared_ribbon);
    case Preset::custom: break;
  }
  throw std::invalid_argument("preset 'custom' has no implied boundary; pass a BoundaryKind");
}

void Mesh2D::write_tables(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "# nodes " << num_nodes() << "\n# id x1 x2\n";
  for (int n = 0; n < num_nodes(); ++n) {
    out << n << ' ' << nodes_[n].x() << ' ' << nodes_[n].y() << '\n';
  }
  out << "# triangles " << num_triangles() << "\n# id n1 n2 n3\n";
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    out << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace smamicro
