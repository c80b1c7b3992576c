#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <doctest.h>

#include "smamicro/elastic_solver.hpp"
#include "smamicro/mesh.hpp"

using namespace smamicro;

namespace {

double signed_area(const Mesh2D& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  const Vec2 a = mesh.nodes()[tri[1]] - mesh.nodes()[tri[0]];
  const Vec2 b = mesh.nodes()[tri[2]] - mesh.nodes()[tri[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

// Counts how many triangles use each undirected edge.
std::map<std::pair<int, int>, int> edge_use(const Mesh2D& mesh) {
  std::map<std::pair<int, int>, int> use;
  for (const auto& tri : mesh.triangles()) {
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i];
      const int b = tri[(i + 1) % 3];
      ++use[{std::min(a, b), std::max(a, b)}];
    }
  }
  return use;
}

}  // namespace

TEST_CASE("structured mesh counts") {
  const Mesh2D paper = Mesh2D::structured(16, 8);
  CHECK(paper.num_triangles() == 256);
  CHECK(paper.num_nodes() == 153);
  CHECK(paper.layer_of(paper.num_triangles() - 1) == 7);

  const Mesh2D one = Mesh2D::structured(1, 1);
  CHECK(one.num_triangles() == 2);
  CHECK(one.interior_edges().size() == 1);

  const Mesh2D strip = Mesh2D::structured(2, 1);
  CHECK(strip.num_triangles() == 4);
  CHECK(strip.interior_edges().size() == 3);

  CHECK_THROWS_AS(Mesh2D::structured(0, 4), std::invalid_argument);
}

TEST_CASE("mesh topology and geometry") {
  for (auto [nx, ny] : {std::pair{1, 1}, {2, 1}, {3, 5}, {16, 8}}) {
    const Mesh2D mesh = Mesh2D::structured(nx, ny);
    const auto use = edge_use(mesh);
    int boundary_edges = 0;
    for (const auto& [edge, count] : use) {
      CHECK((count == 1 || count == 2));
      if (count == 1) ++boundary_edges;
    }
    CHECK(static_cast<int>(use.size()) - boundary_edges == static_cast<int>(mesh.interior_edges().size()));
    CHECK(mesh.num_edges() == static_cast<int>(use.size()));
    // Euler characteristic of a disk.
    CHECK(mesh.num_nodes() - static_cast<int>(use.size()) + mesh.num_triangles() == 1);

    double area = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      CHECK(signed_area(mesh, t) > 0.0);
      CHECK(mesh.areas()[t] == doctest::Approx(signed_area(mesh, t)).epsilon(1e-14));
      area += mesh.areas()[t];
    }
    CHECK(std::abs(area - 2.0) <= 1e-12);

    for (const InteriorEdge& e : mesh.interior_edges()) {
      CHECK(std::abs(e.normal.dot(e.tangent)) <= 1e-15);
      CHECK(std::abs(e.normal.norm() - 1.0) <= 1e-15);
      CHECK(std::abs(e.tangent.norm() - 1.0) <= 1e-15);
      CHECK(e.plus != e.minus);
      const Vec2 along = mesh.nodes()[e.nodes[1]] - mesh.nodes()[e.nodes[0]];
      CHECK(std::abs(along.norm() - e.length) <= 1e-15);
      // Normal points out of the plus triangle.
      Vec2 centroid = Vec2::Zero();
      for (int n : mesh.triangles()[e.plus]) centroid += mesh.nodes()[n] / 3.0;
      CHECK(e.normal.dot(mesh.nodes()[e.nodes[0]] - centroid) > 0.0);
    }
  }
}

TEST_CASE("each interior edge is listed once") {
  const Mesh2D mesh = Mesh2D::structured(16, 8);
  std::set<std::pair<int, int>> seen;
  for (const InteriorEdge& e : mesh.interior_edges()) {
    CHECK(seen.insert({std::min(e.plus, e.minus), std::max(e.plus, e.minus)}).second);
  }
}

TEST_CASE("boundary classification") {
  const Mesh2D mesh = Mesh2D::structured(16, 8);
  const NodeSets clamped = mesh.classify_boundary(Preset::example1);
  CHECK(clamped.dirichlet.size() == 48);
  CHECK(clamped.periodic.empty());
  std::vector<int> all = clamped.dirichlet;
  all.insert(all.end(), clamped.free.begin(), clamped.free.end());
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  CHECK(static_cast<int>(all.size()) == mesh.num_nodes());

  const NodeSets ribbon = mesh.classify_boundary(Preset::example2);
  CHECK(ribbon.dirichlet.size() == 18);
  CHECK(ribbon.periodic.size() == 15);
  CHECK(ribbon.dirichlet.size() + ribbon.periodic.size() + ribbon.free.size() == 153);
  bool found = false;
  for (const PeriodicPair& p : ribbon.periodic) {
    const Vec2& bottom = mesh.nodes()[p.master];
    const Vec2& top = mesh.nodes()[p.slave];
    CHECK(bottom.y() == 0.0);
    CHECK(top.y() == 1.0);
    CHECK(bottom.x() == top.x());
    if (bottom.x() == 0.5) found = true;
  }
  CHECK(found);
  CHECK_THROWS_AS(mesh.classify_boundary(Preset::custom), std::invalid_argument);
}

TEST_CASE("interfacial energy is invariant under plus/minus relabeling") {
  MaterialParams p;
  p.alpha_i = 0.003;
  p.alpha_s = 0.02;
  const Material material(p);
  Mesh2D mesh = Mesh2D::structured(6, 4);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  Positions y = reference_positions(mesh);
  for (int n = 0; n < mesh.num_nodes(); ++n) y.col(n) += Vec2(jitter(rng), jitter(rng));
  PhaseField z(mesh.num_triangles());
  for (auto& v : z) v = static_cast<std::uint8_t>(rng() & 1);

  const auto before = stored_energy(mesh, material, y, z);
  REQUIRE(before);
  for (int e = 0; e < static_cast<int>(mesh.interior_edges().size()); ++e) {
    if (rng() & 1) mesh.swap_edge_orientation(e);
  }
  const auto after = stored_energy(mesh, material, y, z);
  REQUIRE(after);
  CHECK(std::abs(after->interface_constant - before->interface_constant) <= 1e-12);
  CHECK(std::abs(after->interface_surface - before->interface_surface) <= 1e-12);
  CHECK(std::abs(after->total() - before->total()) <= 1e-12);
}
