#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "support/oracles.hpp"
#include "uwbpos/geometry.hpp"
#include "uwbpos/rng.hpp"

using namespace uwbpos;

TEST_CASE("geometry: distance basics") {
  CHECK(distance({0, 0}, {3, 4}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(distance({1, 1}, {1, 1}) == 0.0);
  CHECK(distance({0, 0}, {1, 1}) ==
        doctest::Approx(1.4142135623730951).epsilon(1e-15));
}

TEST_CASE("geometry: distance symmetry and triangle inequality") {
  Rng rng = make_stream(11);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
    CHECK(distance(a, b) >= 0.0);
  }
}

TEST_CASE("geometry: geometric_toa") {
  CHECK(geometric_toa({0, 0}, {0, {0.299792458, 0}}) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(geometric_toa({2, 3}, {0, {2, 3}}) == 0.0);
  // 5 m at c = 0.299792458 m/ns
  CHECK(geometric_toa({0, 0}, {0, {3, 4}}) ==
        doctest::Approx(16.678204759907604).epsilon(1e-13));
}

TEST_CASE("geometry: geometric_toa monotone in distance") {
  Anchor a{0, {1, 1}};
  double prev = -1.0;
  for (double d = 0.0; d < 30.0; d += 0.7) {
    double toa = geometric_toa({1 + d, 1}, a);
    CHECK(toa > prev);
    prev = toa;
  }
}

TEST_CASE("geometry: segment intersection cases") {
  // proper crossing
  CHECK(segments_intersect({{0, 0}, {2, 0}}, {{1, -1}, {1, 1}}));
  // disjoint
  CHECK_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{2, 1}, {3, 1}}));
  // endpoint grazing counts
  CHECK(segments_intersect({{0, 0}, {1, 1}}, {{1, 1}, {2, 0}}));
  // endpoint on interior counts
  CHECK(segments_intersect({{0, 0}, {2, 0}}, {{1, 0}, {1, 5}}));
  // collinear overlap counts
  CHECK(segments_intersect({{0, 0}, {3, 0}}, {{1, 0}, {2, 0}}));
  // collinear but disjoint
  CHECK_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{2, 0}, {3, 0}}));
  // parallel non-collinear
  CHECK_FALSE(segments_intersect({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}));
}

TEST_CASE("geometry: segment intersection agrees with parametric oracle") {
  Rng rng = make_stream(12);
  // Lattice coordinates make every touching case exact in both methods.
  std::uniform_int_distribution<int> u(-4, 4);
  for (int i = 0; i < 4000; ++i) {
    Segment s{{double(u(rng)), double(u(rng))},
              {double(u(rng)), double(u(rng))}};
    Segment t{{double(u(rng)), double(u(rng))},
              {double(u(rng)), double(u(rng))}};
    if ((s.a.x == s.b.x && s.a.y == s.b.y) ||
        (t.a.x == t.b.x && t.a.y == t.b.y))
      continue;  // degenerate segments are not wall material
    CAPTURE(s.a.x);
    CAPTURE(s.a.y);
    CAPTURE(s.b.x);
    CAPTURE(s.b.y);
    CAPTURE(t.a.x);
    CAPTURE(t.a.y);
    CAPTURE(t.b.x);
    CAPTURE(t.b.y);
    CHECK(segments_intersect(s, t) == oracle::segments_intersect(s, t));
  }
}

TEST_CASE("geometry: count_wall_crossings") {
  Floorplan empty;
  empty.bounds = {0, 0, 10, 10};
  CHECK(count_wall_crossings({1, 1}, {9, 9}, empty) == 0);

  Floorplan one;
  one.bounds = {-2, -2, 4, 4};
  one.walls = {{{1, -1}, {1, 1}}};
  CHECK(count_wall_crossings({0, 0}, {2, 0}, one) == 1);

  Floorplan two;
  two.bounds = {-2, -2, 6, 6};
  two.walls = {{{1, -1}, {1, 1}}, {{2, -1}, {2, 1}}};
  CHECK(count_wall_crossings({0, 0}, {3, 0}, two) == 2);
  CHECK(count_wall_crossings({0, 0}, {3, 0}, two) ==
        oracle::count_crossings({0, 0}, {3, 0}, two));
}

TEST_CASE("geometry: crossings symmetric in endpoints and match oracle") {
  Floorplan plan;
  plan.bounds = {0, 0, 10, 6};
  plan.walls = {{{4.0, 0.0}, {4.0, 2.2}}, {{4.0, 3.0}, {4.0, 6.0}},
                {{0.0, 3.0}, {1.6, 3.0}}, {{2.4, 3.0}, {4.0, 3.0}},
                {{6.5, 3.0}, {10.0, 3.0}}};
  Rng rng = make_stream(13);
  std::uniform_real_distribution<double> ux(0.0, 10.0), uy(0.0, 6.0);
  for (int i = 0; i < 500; ++i) {
    Point2 a{ux(rng), uy(rng)}, b{ux(rng), uy(rng)};
    int ab = count_wall_crossings(a, b, plan);
    CHECK(ab == count_wall_crossings(b, a, plan));
    CHECK(ab == oracle::count_crossings(a, b, plan));
  }
}

TEST_CASE("geometry: classify_link_geometric") {
  Floorplan plan;
  plan.bounds = {-1, -2, 12, 4};
  plan.walls = {{{2, -1}, {2, 1}}, {{4, -1}, {4, 1}}, {{6, -1}, {6, 1}}};
  Anchor far{0, {11, 0}};
  // 3 crossings
  CHECK(classify_link_geometric({0, 0}, far, plan) ==
        PropagationClass::snlos);
  // 1 crossing
  CHECK(classify_link_geometric({5, 0}, far, plan) == PropagationClass::nlos);
  // 0 crossings
  CHECK(classify_link_geometric({7, 0}, far, plan) == PropagationClass::los);
}

TEST_CASE("geometry: no walls means LOS everywhere") {
  Floorplan plan;
  plan.bounds = {0, 0, 5, 5};
  Rng rng = make_stream(14);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 100; ++i)
    CHECK(classify_link_geometric({u(rng), u(rng)}, {0, {u(rng), u(rng)}},
                                  plan) == PropagationClass::los);
}

TEST_CASE("geometry: floorplan validation") {
  Floorplan bad_bounds;
  bad_bounds.bounds = {0, 0, 0, 5};
  CHECK_THROWS_AS(bad_bounds.validate(), std::invalid_argument);

  Floorplan outside;
  outside.bounds = {0, 0, 5, 5};
  outside.walls = {{{1, 1}, {6, 1}}};
  CHECK_THROWS_AS(outside.validate(), std::invalid_argument);

  Floorplan ok;
  ok.bounds = {0, 0, 5, 5};
  ok.walls = {{{1, 1}, {4, 1}}};
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("geometry: anchor map uniqueness and lookup") {
  CHECK_THROWS_AS(AnchorMap({{1, {0, 0}}, {1, {1, 1}}}),
                  std::invalid_argument);
  AnchorMap m({{2, {0, 0}}, {5, {1, 1}}, {3, {2, 2}}});
  CHECK(m.size() == 3);
  CHECK(m.at(5).position.x == 1.0);
  CHECK(m.find(4) == nullptr);
  CHECK_THROWS_AS(m.at(4), std::out_of_range);
}

TEST_CASE("geometry: propagation class names round-trip") {
  for (auto c : {PropagationClass::los, PropagationClass::nlos,
                 PropagationClass::snlos})
    CHECK(propagation_class_from_string(to_string(c)) == c);
  CHECK_THROWS_AS(propagation_class_from_string("sideways"),
                  std::invalid_argument);
}
