#include <random>

#include "doctest.h"
#include "moto/rayshoot.hpp"

using namespace moto;

namespace {

Point2<Rat> pt(long x, long y) { return {rat(x), rat(y)}; }
Vector2<Rat> vec(long x, long y) { return {rat(x), rat(y)}; }

// Instance whose walls pin the grid's bounding box.
Instance<Rat> boxed_instance(std::vector<Wall<Rat>> walls) {
  Instance<Rat> inst;
  inst.walls = std::move(walls);
  return inst;
}

}  // namespace

TEST_CASE("ray versus segment fundamentals") {
  auto o = pt(0, 0);
  auto d = vec(1, 0);
  CHECK(*ray_segment_param(o, d, pt(4, -2), pt(4, 3)) == rat(4));
  CHECK(!ray_segment_param(o, d, pt(-4, -2), pt(-4, 3)).has_value());  // behind
  CHECK(!ray_segment_param(o, d, pt(2, 1), pt(6, 1)).has_value());     // parallel
  CHECK(!ray_segment_param(o, d, pt(2, 0), pt(6, 0)).has_value());     // same line: miss
  CHECK(!ray_segment_param(o, d, pt(3, 3), pt(3, 3)).has_value());     // degenerate
  CHECK(*ray_segment_param(o, d, pt(5, 0), pt(9, 4)) == rat(5));       // endpoint contact
  CHECK(!ray_segment_param(o, d, pt(0, -1), pt(0, 4)).has_value());    // through the origin
}

TEST_CASE("linear shooter returns the nearest segment with tie grouping") {
  LinearShooter<Rat> sh;
  sh.insert(1, pt(2, -1), pt(2, 1));
  sh.insert(2, pt(5, -1), pt(5, 1));
  sh.insert(wall_owner(0), pt(2, -3), pt(2, 3));  // same offset as rider 1

  auto hit = sh.shoot(pt(0, 0), vec(1, 0), 0);
  REQUIRE(hit.has_value());
  CHECK(hit->param == rat(2));
  REQUIRE(hit->owners.size() == 2);
  CHECK(hit->owners[0] == 1);  // rider beats wall at a tie
  CHECK(hit->owners[1] == wall_owner(0));
  CHECK(hit->point == pt(2, 0));

  auto past = sh.shoot(pt(0, 0), vec(1, 0), 1);
  REQUIRE(past.has_value());
  CHECK(past->owner() == wall_owner(0));  // excluding rider 1 leaves the wall

  sh.remove(1);
  auto after = sh.shoot(pt(3, 0), vec(1, 0), 0);
  REQUIRE(after.has_value());
  CHECK(after->owner() == 2);
  CHECK_THROWS_AS(sh.remove(wall_owner(0)), ContractViolation);
}

TEST_CASE("endpoint updates move a track's frontier") {
  LinearShooter<Rat> sh;
  sh.insert(7, pt(5, 5), pt(5, 5));  // newborn track: a point, invisible
  CHECK(!sh.shoot(pt(0, 7), vec(1, 0), 0).has_value());
  sh.update(7, pt(5, 6));
  CHECK(!sh.shoot(pt(0, 7), vec(1, 0), 0).has_value());  // still short of y=7
  sh.update(7, pt(5, 9));
  auto hit = sh.shoot(pt(0, 7), vec(1, 0), 0);
  REQUIRE(hit.has_value());
  CHECK(hit->owner() == 7);
  CHECK(hit->param == rat(5));
  // Endpoint contact counts: the track covers its frontier point.
  auto touch = sh.shoot(pt(0, 9), vec(1, 0), 0);
  REQUIRE(touch.has_value());
  CHECK(touch->param == rat(5));
  sh.update(7, pt(5, 6));  // retract below the probe line again
  CHECK(!sh.shoot(pt(0, 7), vec(1, 0), 0).has_value());
}

TEST_CASE("grid shooter handles boundary-aligned geometry") {
  // Nine walls force a 3x3 grid over [0,9]^2: cell boundaries at 3 and 6.
  std::vector<Wall<Rat>> walls = {
      {pt(0, 0), pt(9, 0)},  {pt(0, 9), pt(9, 9)},  {pt(0, 0), pt(0, 9)},
      {pt(9, 0), pt(9, 9)},  {pt(3, 1), pt(3, 8)},  // on the x=3 gridline
      {pt(5, 2), pt(5, 4)},                          // crosses the y=3 gridline
      {pt(5, 7), pt(7, 5)},                          // passes through corner (6,6)
      {pt(1, 1), pt(2, 1)},  {pt(8, 8), pt(8, 8)},   // filler + degenerate
  };
  auto inst = boxed_instance(walls);
  GridShooter<Rat> grid(inst);
  LinearShooter<Rat> lin;
  for (size_t k = 0; k < walls.size(); ++k) {
    grid.insert(wall_owner(static_cast<int>(k)), walls[k].a, walls[k].b);
    lin.insert(wall_owner(static_cast<int>(k)), walls[k].a, walls[k].b);
  }
  struct Probe {
    Point2<Rat> o;
    Vector2<Rat> d;
  };
  std::vector<Probe> probes = {
      {pt(1, 5), vec(1, 0)},   // hits the gridline wall at (3,5)
      {pt(0, 3), vec(1, 0)},   // ray along the y=3 gridline
      {pt(0, 0), vec(1, 1)},   // through the corner contact at (6,6)
      {pt(4, 5), vec(0, -1)},  // down onto the bottom box edge
      {pt(8, 1), vec(-1, 1)},
      {pt(3, 0), vec(0, 1)},   // along the x=3 gridline from the box edge
  };
  for (const auto& pr : probes) {
    auto a = grid.shoot(pr.o, pr.d, 0);
    auto b = lin.shoot(pr.o, pr.d, 0);
    REQUIRE(a.has_value() == b.has_value());
    if (a) {
      CHECK(a->param == b->param);
      CHECK(a->owners == b->owners);
    }
  }
}

TEST_CASE("grid matches linear on random exact instances") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<long> c(0, 60), dv(-5, 5);
  for (int round = 0; round < 6; ++round) {
    std::vector<Wall<Rat>> walls;
    walls.push_back({pt(0, 0), pt(60, 60)});  // pin the box
    for (int k = 1; k < 30; ++k) walls.push_back({pt(c(rng), c(rng)), pt(c(rng), c(rng))});
    auto inst = boxed_instance(walls);
    GridShooter<Rat> grid(inst);
    LinearShooter<Rat> lin;
    for (size_t k = 0; k < walls.size(); ++k) {
      int owner = (k % 3 == 0) ? static_cast<int>(k) + 1 : wall_owner(static_cast<int>(k));
      grid.insert(owner, walls[k].a, walls[k].b);
      lin.insert(owner, walls[k].a, walls[k].b);
    }
    for (int q = 0; q < 120; ++q) {
      Point2<Rat> o = pt(c(rng), c(rng));
      long dx = 0, dy = 0;
      while (dx == 0 && dy == 0) dx = dv(rng), dy = dv(rng);
      auto a = grid.shoot(o, vec(dx, dy), 0);
      auto b = lin.shoot(o, vec(dx, dy), 0);
      REQUIRE(a.has_value() == b.has_value());
      if (a) {
        CHECK(a->param == b->param);
        CHECK(a->owners == b->owners);
      }
    }
  }
}

TEST_CASE("grid matches linear on the float backend") {
  std::mt19937_64 rng(999);
  std::uniform_real_distribution<double> c(0.0, 50.0), dv(-3.0, 3.0);
  Instance<double> inst;
  std::vector<std::pair<Point2<double>, Point2<double>>> segs;
  for (int k = 0; k < 25; ++k) segs.push_back({{c(rng), c(rng)}, {c(rng), c(rng)}});
  segs.push_back({{0.0, 0.0}, {50.0, 50.0}});
  for (const auto& s : segs) inst.walls.push_back({s.first, s.second});
  GridShooter<double> grid(inst);
  LinearShooter<double> lin;
  for (size_t k = 0; k < segs.size(); ++k) {
    grid.insert(static_cast<int>(k) + 1, segs[k].first, segs[k].second);
    lin.insert(static_cast<int>(k) + 1, segs[k].first, segs[k].second);
  }
  for (int q = 0; q < 200; ++q) {
    Point2<double> o{c(rng), c(rng)};
    Vector2<double> d{dv(rng), dv(rng)};
    if (is_zero(d.x) && is_zero(d.y)) continue;
    auto a = grid.shoot(o, d, 0);
    auto b = lin.shoot(o, d, 0);
    REQUIRE(a.has_value() == b.has_value());
    if (a) {
      CHECK(a->param == doctest::Approx(b->param).epsilon(1e-9));
      CHECK(a->owner() == b->owner());
    }
  }
}

TEST_CASE("grid keeps segments that leave its box queryable") {
  auto inst = boxed_instance({{pt(0, 0), pt(10, 10)}});
  GridShooter<Rat> grid(inst);
  grid.insert(1, pt(0, 3), pt(20, 3));
  auto hit = grid.shoot(pt(2, 0), vec(0, 1), 0);
  REQUIRE(hit.has_value());
  CHECK(hit->param == rat(3));
  // Queries from outside the box still see everything.
  auto far = grid.shoot(pt(15, 0), vec(0, 1), 0);
  REQUIRE(far.has_value());
  CHECK(far->owner() == 1);
  grid.update(1, pt(9, 3));
  auto gone = grid.shoot(pt(15, 0), vec(0, 1), 0);
  CHECK(!gone.has_value());
  grid.remove(1);
  CHECK(!grid.shoot(pt(2, 0), vec(0, 1), 0).has_value());
}

TEST_CASE("shooters report tracks passing through the query origin") {
  auto inst = boxed_instance({{pt(0, 0), pt(10, 10)}});
  GridShooter<Rat> grid(inst);
  LinearShooter<Rat> lin;
  for (auto* sh : std::initializer_list<RayShooter<Rat>*>{&grid, &lin}) {
    sh->insert(1, pt(0, 0), pt(10, 10));   // through (5,5)
    sh->insert(2, pt(5, 5), pt(9, 5));     // endpoint contact counts
    sh->insert(3, pt(0, 9), pt(9, 9));     // elsewhere
    sh->insert(4, pt(4, 4), pt(4, 4));     // degenerate: never reported
    std::vector<int> through;
    auto hit = sh->shoot(pt(5, 5), vec(0, 1), 2, &through);
    std::sort(through.begin(), through.end());
    CHECK(through == std::vector<int>{1});  // owner 2 excluded by caller
    REQUIRE(hit.has_value());
    CHECK(hit->owner() == 3);
  }
}

TEST_CASE("shoot query counter") {
  LinearShooter<Rat> sh;
  sh.insert(1, pt(2, -1), pt(2, 1));
  sh.shoot(pt(0, 0), vec(1, 0), 0);
  sh.shoot(pt(0, 0), vec(0, 1), 0);
  CHECK(sh.queries == 2);
}
