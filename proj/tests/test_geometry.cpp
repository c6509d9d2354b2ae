#include "eit/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace eit;

namespace {

Polygon square(Scalar x0, Scalar y0, Scalar side) {
  return Polygon{{Vec2(x0, y0), Vec2(x0 + side, y0),
                  Vec2(x0 + side, y0 + side), Vec2(x0, y0 + side)}};
}

// even-odd ray-crossing oracle, independent of the winding implementation
bool crossing_oracle(const Polygon& p, const Vec2& q) {
  const int n = static_cast<int>(p.vertices.size());
  bool in = false;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = p.vertices[i];
    const Vec2& b = p.vertices[(i + 1) % n];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const Scalar x = a.x() + (q.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (q.x() < x) in = !in;
    }
  }
  return in;
}

}  // namespace

TEST_CASE("polygon_validate accepts a CCW square") {
  CHECK(polygon_validate(square(0, 0, 1)).ok);
}

TEST_CASE("polygon_validate rejects clockwise orientation") {
  Polygon p = square(0, 0, 1);
  std::reverse(p.vertices.begin(), p.vertices.end());
  const auto c = polygon_validate(p);
  CHECK_FALSE(c.ok);
  CHECK(c.reason.find("CCW") != std::string::npos);
}

TEST_CASE("polygon_validate rejects the bowtie") {
  const Polygon bowtie{{Vec2(0, 0), Vec2(1, 1), Vec2(1, 0), Vec2(0, 1)}};
  const auto c = polygon_validate(bowtie);
  CHECK_FALSE(c.ok);
  CHECK(c.reason.find("intersection") != std::string::npos);
}

TEST_CASE("polygon_validate rejects degenerate inputs") {
  CHECK_FALSE(polygon_validate(Polygon{{Vec2(0, 0), Vec2(1, 0)}}).ok);
  CHECK_FALSE(
      polygon_validate(Polygon{{Vec2(0, 0), Vec2(1, 0), Vec2(0, 0)}}).ok);
  // fold-back spike
  CHECK_FALSE(polygon_validate(
                  Polygon{{Vec2(0, 0), Vec2(1, 0), Vec2(0.5, 0), Vec2(0.5, 1)}})
                  .ok);
  // straight (collinear) vertex is fine
  CHECK(polygon_validate(Polygon{{Vec2(0, 0), Vec2(0.5, 0), Vec2(1, 0),
                                  Vec2(1, 1), Vec2(0, 1)}})
            .ok);
}

TEST_CASE("partition_validate enforces interiority and disjointness") {
  Partition ok;
  ok.inclusions = {square(0.2, 0.2, 0.2), square(0.6, 0.6, 0.2)};
  CHECK(partition_validate(ok).ok);

  Partition touching_boundary;
  touching_boundary.inclusions = {square(0.0, 0.2, 0.2)};
  CHECK_FALSE(partition_validate(touching_boundary).ok);

  Partition overlapping;
  overlapping.inclusions = {square(0.2, 0.2, 0.3), square(0.4, 0.4, 0.3)};
  CHECK_FALSE(partition_validate(overlapping).ok);

  Partition nested;
  nested.inclusions = {square(0.2, 0.2, 0.5), square(0.3, 0.3, 0.1)};
  CHECK_FALSE(partition_validate(nested).ok);
}

TEST_CASE("regularize splits every long edge once") {
  Partition part;
  part.inclusions = {square(0.3, 0.3, 0.3)};
  const Partition out = regularize(part, {0.05, 0.2});
  REQUIRE(out.inclusions.size() == 1);
  CHECK(out.inclusions[0].vertices.size() == 8);  // one midpoint per side
  CHECK(polygon_validate(out.inclusions[0]).ok);
}

TEST_CASE("regularize removes the second vertex of a short pair") {
  Partition part;
  Polygon p = square(0.3, 0.3, 0.2);
  p.vertices.insert(p.vertices.begin() + 1, Vec2(0.5 - 0.01, 0.3));
  part.inclusions = {p};
  const Partition out = regularize(part, {0.05, 10.0});
  CHECK(out.inclusions[0].vertices.size() == 4);
  // the survivor is the first vertex of the pair
  CHECK((out.inclusions[0].vertices[1] - Vec2(0.49, 0.3)).norm() ==
        doctest::Approx(0).epsilon(1e-14));
}

TEST_CASE("regularize keeps partitions with edge lengths in range unchanged") {
  Partition part;
  part.inclusions = {square(0.3, 0.3, 0.3)};
  const Partition out = regularize(part, {0.1, 0.5});
  REQUIRE(out.inclusions[0].vertices.size() == 4);
  for (int i = 0; i < 4; ++i)
    CHECK((out.inclusions[0].vertices[i] - part.inclusions[0].vertices[i])
              .norm() == 0);
  // idempotence
  const Partition again = regularize(out, {0.1, 0.5});
  CHECK(again.inclusions[0].vertices.size() == 4);
}

TEST_CASE("regularize handles the wrap-around pair") {
  // only the closing edge (last vertex, first vertex) is long
  Polygon p{{Vec2(0.3, 0.3), Vec2(0.4, 0.3), Vec2(0.5, 0.3), Vec2(0.5, 0.36),
             Vec2(0.5, 0.42), Vec2(0.4, 0.42), Vec2(0.3, 0.42)}};
  REQUIRE(polygon_validate(p).ok);
  Partition part{{p}};
  const Partition out = regularize(part, {0.05, 0.11});
  CHECK(out.inclusions[0].vertices.size() == 8);
  CHECK((out.inclusions[0].vertices.back() - Vec2(0.3, 0.36)).norm() <= 1e-14);
}

TEST_CASE("regularize never drops a polygon below three vertices") {
  Partition part;
  part.inclusions = {Polygon{{Vec2(0.5, 0.5), Vec2(0.52, 0.5),
                              Vec2(0.51, 0.52)}}};
  const Partition out = regularize(part, {0.1, 10.0});
  CHECK(out.inclusions[0].vertices.size() == 3);
}

TEST_CASE("move_vertices with zero theta is the identity") {
  Partition part;
  part.inclusions = {square(0.3, 0.3, 0.3)};
  const std::vector<Vec2> theta(4, Vec2::Zero());
  const MoveResult mv = move_vertices(part, theta, 0.05);
  CHECK(mv.effective_beta == 0.05);
  for (int i = 0; i < 4; ++i)
    CHECK((mv.partition.inclusions[0].vertices[i] -
           part.inclusions[0].vertices[i])
              .norm() == 0);
}

TEST_CASE("move_vertices dilates a square along outward normals") {
  Partition part;
  part.inclusions = {square(0.4, 0.4, 0.2)};
  std::vector<Vec2> theta;
  const Vec2 c(0.5, 0.5);
  for (const Vec2& v : part.inclusions[0].vertices)
    theta.push_back((v - c).normalized());
  const MoveResult mv = move_vertices(part, theta, 0.02);
  CHECK(mv.effective_beta == 0.02);
  CHECK(polygon_validate(mv.partition.inclusions[0]).ok);
  CHECK(signed_area(mv.partition.inclusions[0]) >
        signed_area(part.inclusions[0]));
}

TEST_CASE("move_vertices halves the step when a vertex would cross an edge") {
  Partition part;
  part.inclusions = {square(0.4, 0.4, 0.2)};
  // push the first vertex far across the opposite edge
  std::vector<Vec2> theta(4, Vec2::Zero());
  theta[0] = Vec2(1.0, 1.0);
  const MoveResult mv = move_vertices(part, theta, 0.5);
  CHECK(mv.effective_beta < 0.5);
  CHECK(partition_validate(mv.partition).ok);
  CHECK(polygon_validate(mv.partition.inclusions[0]).ok);
}

TEST_CASE("move_vertices fails when no step is feasible") {
  Partition part;
  part.inclusions = {square(0.4, 0.4, 0.2)};
  // a displacement that leaves the unit square no matter the halving
  std::vector<Vec2> theta(4, Vec2(1e9, 0));
  CHECK_THROWS_AS(move_vertices(part, theta, 1.0), GeometryError);
}

TEST_CASE("locate finds inclusions and the background") {
  Partition part;
  part.inclusions = {square(0.2, 0.2, 0.2), square(0.6, 0.6, 0.2)};
  CHECK(locate(part, Vec2(0.3, 0.3)) == 1);
  CHECK(locate(part, Vec2(0.7, 0.7)) == 2);
  CHECK(locate(part, Vec2(0.999, 0.999)) == 0);
  CHECK(locate(part, Vec2(0.5, 0.5)) == 0);
  CHECK_THROWS_AS(locate(part, Vec2(1.5, 0.5)), GeometryError);
}

TEST_CASE("winding test agrees with the crossing oracle on random points") {
  const Polygon pent{{Vec2(0.32, 0.28), Vec2(0.62, 0.22), Vec2(0.77, 0.47),
                      Vec2(0.60, 0.71), Vec2(0.33, 0.63)}};
  const Polygon notch{{Vec2(0.1, 0.1), Vec2(0.9, 0.1), Vec2(0.9, 0.9),
                       Vec2(0.5, 0.5), Vec2(0.1, 0.9)}};
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<Scalar> dist(0.001, 0.999);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec2 q(dist(rng), dist(rng));
    for (const Polygon* p : {&pent, &notch}) {
      // skip points within a hair of an edge where the oracles may disagree
      bool near_edge = false;
      const int n = static_cast<int>(p->vertices.size());
      for (int e = 0; e < n; ++e) {
        const Vec2& a = p->vertices[e];
        const Vec2& b = p->vertices[(e + 1) % n];
        const Scalar t = std::clamp((q - a).dot(b - a) / (b - a).squaredNorm(),
                                    0.0, 1.0);
        if ((q - (a + t * (b - a))).norm() < 1e-9) near_edge = true;
      }
      if (near_edge) continue;
      CHECK(point_in_polygon(*p, q) == crossing_oracle(*p, q));
      ++checked;
    }
  }
  CHECK(checked > 19000);
}

TEST_CASE("symmetric_difference_area") {
  const Polygon a = square(0, 0, 1);
  SUBCASE("identical polygons") {
    CHECK(symmetric_difference_area(a, a) == doctest::Approx(0).epsilon(1e-12));
  }
  SUBCASE("disjoint unit squares") {
    const Polygon b = square(2, 0, 1);
    CHECK(symmetric_difference_area(a, b) == doctest::Approx(2.0).epsilon(0.02));
  }
  SUBCASE("half-overlapping unit squares") {
    const Polygon b = square(0.5, 0, 1);
    CHECK(symmetric_difference_area(a, b) == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("regular_ngon produces valid CCW polygons") {
  const Polygon p = regular_ngon(Vec2(0.5, 0.5), 0.25, 14);
  CHECK(p.vertices.size() == 14);
  CHECK(polygon_validate(p).ok);
  CHECK(p.vertices[0].x() == doctest::Approx(0.75));
  // area approaches pi r^2 from below
  CHECK(signed_area(p) == doctest::Approx(M_PI * 0.0625).epsilon(0.02));
}
