#include <cmath>
#include <random>
#include <utility>

#include "doctest.h"
#include "moto/induced.hpp"
#include "moto/oracle.hpp"

using namespace moto;

namespace {

Rat q(long n, long d) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

Point2<Rat> pt(long x, long y) { return {rat(x), rat(y)}; }

Point2<Rat> ptq(long xn, long xd, long yn, long yd) { return {q(xn, xd), q(yn, yd)}; }

Polygon<double> to_float_polygon(const Polygon<Rat>& p) {
  Polygon<double> out;
  for (const auto& v : p.outer) out.outer.push_back(convert_point<double>(v));
  for (const auto& h : p.holes) {
    out.holes.emplace_back();
    for (const auto& v : h) out.holes.back().push_back(convert_point<double>(v));
  }
  return out;
}

// Runs the induced instance through every halving/shooter combination
// against the reference engine and checks containment of every trajectory.
void expect_induced_agree(const Polygon<Rat>& poly, bool with_policy) {
  auto inst = induced_instance(poly);
  SpawnPolicy<Rat> spawn;
  if (with_policy) spawn = induced_spawn_policy(poly);
  auto ref = oracle_solve(inst, spawn);
  for (auto hk : {HalvingKind::Counting, HalvingKind::Midpoint})
    for (auto sk : {ShooterKind::Linear, ShooterKind::Grid}) {
      SolveOptions<Rat> opt;
      opt.halving = hk;
      opt.shooter = sk;
      opt.spawn = spawn;
      opt.verify_every_event = true;
      if (spawn && hk != HalvingKind::Midpoint) opt.allow_spawn_with_counting = true;
      auto got = solve(inst, opt);
      auto bad = compare_results(got, ref, 1e-9);
      std::string msg = std::string(halving_name(hk)) + "+" + shooter_name(sk);
      for (const auto& b : bad) msg += " | " + b;
      CHECK_MESSAGE(bad.empty(), msg);
      for (size_t k = 0; k < got.records.size(); ++k) {
        const auto& rec = got.records[k];
        CHECK(point_in_polygon(poly, rec.kappa));
        const auto& s = got.riders[k].s;
        Point2<Rat> mid{(s.x + rec.kappa.x) / Rat(2), (s.y + rec.kappa.y) / Rat(2)};
        CHECK(point_in_polygon(poly, mid));
      }
    }
}

}  // namespace

TEST_CASE("convex polygons induce no riders") {
  Polygon<Rat> sq;
  sq.outer = {pt(0, 0), pt(10, 0), pt(10, 10), pt(0, 10)};
  CHECK(find_reflex_vertices(sq).empty());
  auto inst = induced_instance(sq);
  CHECK(inst.riders.empty());
  REQUIRE(inst.walls.size() == 4);
  CHECK(inst.walls[2].a == pt(10, 10));
  CHECK(inst.walls[2].b == pt(0, 10));
}

TEST_CASE("reflex detection covers holes and skips straight corners") {
  Polygon<Rat> L;
  L.outer = {pt(0, 0), pt(4, 0), pt(4, 2), pt(2, 2), pt(2, 4), pt(0, 4)};
  auto r = find_reflex_vertices(L);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == std::pair<int, int>(0, 3));

  // A straight vertex inserted on the bottom edge changes indices, not the set.
  Polygon<Rat> L2 = L;
  L2.outer.insert(L2.outer.begin() + 1, pt(2, 0));
  auto r2 = find_reflex_vertices(L2);
  REQUIRE(r2.size() == 1);
  CHECK(r2[0] == std::pair<int, int>(0, 4));

  // Every corner of a square hole is reflex for the surrounding region.
  Polygon<Rat> holed;
  holed.outer = {pt(0, 0), pt(10, 0), pt(10, 10), pt(0, 10)};
  holed.holes = {{pt(4, 4), pt(4, 6), pt(6, 6), pt(6, 4)}};
  auto rh = find_reflex_vertices(holed);
  REQUIRE(rh.size() == 4);
  for (const auto& [ring, idx] : rh) CHECK(ring == 1);
}

TEST_CASE("polygon validation rejects malformed rings") {
  Polygon<Rat> p;
  p.outer = {pt(0, 0), pt(10, 0), pt(10, 10)};
  CHECK_NOTHROW(validate_polygon(p));

  p.outer = {pt(0, 0), pt(10, 0)};
  CHECK_THROWS_AS(validate_polygon(p), InvalidInput);

  p.outer = {pt(0, 0), pt(10, 0), pt(10, 0), pt(10, 10)};
  CHECK_THROWS_AS(validate_polygon(p), InvalidInput);

  p.outer = {pt(0, 0), pt(0, 10), pt(10, 10), pt(10, 0)};  // clockwise outer
  CHECK_THROWS_AS(validate_polygon(p), InvalidInput);

  p.outer = {pt(0, 0), pt(4, 0), pt(1, 3), pt(3, 3)};  // crossing edges, CCW area
  CHECK_THROWS_AS(validate_polygon(p), InvalidInput);

  p.outer = {pt(0, 0), pt(10, 0), pt(4, 0), pt(4, 4)};  // boundary doubles back
  CHECK_THROWS_AS(validate_polygon(p), InvalidInput);

  Polygon<Rat> holed;
  holed.outer = {pt(0, 0), pt(10, 0), pt(10, 10), pt(0, 10)};
  holed.holes = {{pt(4, 4), pt(6, 4), pt(6, 6), pt(4, 6)}};  // counterclockwise hole
  CHECK_THROWS_AS(validate_polygon(holed), InvalidInput);

  holed.holes = {{pt(20, 4), pt(20, 6), pt(22, 6), pt(22, 4)}};  // outside the ring
  CHECK_THROWS_AS(validate_polygon(holed), InvalidInput);

  holed.holes = {{pt(4, 0), pt(4, 2), pt(6, 2), pt(6, 0)}};  // touches the boundary
  CHECK_THROWS_AS(validate_polygon(holed), InvalidInput);

  holed.holes = {{pt(4, 4), pt(4, 6), pt(6, 6), pt(6, 4)}};
  CHECK_NOTHROW(validate_polygon(holed));
}

TEST_CASE("vertex velocities satisfy the unit-offset equations") {
  // Perpendicular reflex corner: the velocity is the diagonal of the normals.
  auto v = reflex_velocity<Rat>({rat(-1), rat(0)}, {rat(0), rat(1)});
  CHECK(v.x == rat(-1));
  CHECK(v.y == rat(-1));

  // A 3-4-5 corner keeps everything rational.
  auto w = reflex_velocity<Rat>({rat(1), rat(0)}, {rat(3), rat(-4)});
  CHECK(w.x == q(1, 2));
  CHECK(w.y == rat(1));
  CHECK(dot(inward_unit_normal<Rat>({rat(1), rat(0)}), w) == rat(1));
  CHECK(dot(inward_unit_normal<Rat>({rat(3), rat(-4)}), w) == rat(1));

  // Antiparallel normals admit no finite velocity.
  CHECK_THROWS_AS(reflex_velocity<Rat>({rat(1), rat(0)}, {rat(-2), rat(0)}), DomainError);

  // Irrational edge lengths are confined to the float backend.
  CHECK_THROWS_AS(reflex_velocity<Rat>({rat(1), rat(1)}, {rat(0), rat(1)}), DomainError);
  auto f = reflex_velocity<double>({1.0, 1.0}, {1.0, -1.0});
  CHECK(f.x == doctest::Approx(0.0));
  CHECK(f.y == doctest::Approx(std::sqrt(2.0)));

  CHECK(exact_sqrt(q(25, 64)).value() == q(5, 8));
  CHECK(!exact_sqrt(rat(2)).has_value());
  CHECK(!exact_sqrt(rat(-4)).has_value());
}

TEST_CASE("float velocities stay on both offsets within tolerance") {
  std::mt19937_64 rng(416001);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  int made = 0;
  while (made < 200) {
    Vector2<double> d1{std::cos(ang(rng)), std::sin(ang(rng))};
    Vector2<double> d2{std::cos(ang(rng)), std::sin(ang(rng))};
    if (cross(d1, d2) > -1e-3) continue;  // keep genuinely reflex corners
    auto n1 = inward_unit_normal(d1);
    auto n2 = inward_unit_normal(d2);
    if (1.0 + dot(n1, n2) < 0.2) continue;  // near-needle corners explode
    auto v = reflex_velocity(d1, d2);
    CHECK(std::abs(dot(n1, v) - 1.0) <= 1e-12);
    CHECK(std::abs(dot(n2, v) - 1.0) <= 1e-12);
    ++made;
  }
}

TEST_CASE("induced instances wire riders to their incident walls") {
  Polygon<Rat> L;
  L.outer = {pt(0, 0), pt(4, 0), pt(4, 2), pt(2, 2), pt(2, 4), pt(0, 4)};
  auto inst = induced_instance(L);
  REQUIRE(inst.riders.size() == 1);
  REQUIRE(inst.walls.size() == 6);
  const auto& m = inst.riders[0];
  CHECK(m.id == 1);
  CHECK(m.s == pt(2, 2));
  CHECK(m.v.x == rat(-1));
  CHECK(m.v.y == rat(-1));
  REQUIRE(m.edges.has_value());
  CHECK(m.edges->first == 2);
  CHECK(m.edges->second == 3);
  CHECK(inst.walls[2].a == pt(4, 2));
  CHECK(inst.walls[2].b == pt(2, 2));
  CHECK(inst.walls[3].a == pt(2, 2));
  CHECK(inst.walls[3].b == pt(2, 4));
  REQUIRE(m.d.has_value());
  CHECK(*m.d == pt(0, 0));
  CHECK(m.dest_kind == DestKind::Wall);
  CHECK(point_in_polygon(L, m.s + q(1, 10) * m.v));

  Polygon<Rat> holed;
  holed.outer = {pt(0, 0), pt(10, 0), pt(10, 10), pt(0, 10)};
  holed.holes = {{pt(4, 4), pt(4, 6), pt(6, 6), pt(6, 4)}};
  auto hi = induced_instance(holed);
  REQUIRE(hi.riders.size() == 4);
  CHECK(hi.walls.size() == 8);
  CHECK(hi.riders[0].edges == std::pair<int, int>(7, 4));
  // Hole corners ride diagonally away from the hole into the outer corners.
  CHECK(*hi.riders[0].d == pt(0, 0));
  CHECK(*hi.riders[1].d == pt(0, 10));
  CHECK(*hi.riders[2].d == pt(10, 10));
  CHECK(*hi.riders[3].d == pt(10, 0));
  for (const auto& r : hi.riders) CHECK(r.dest_kind == DestKind::Wall);
  expect_induced_agree(holed, false);
}

TEST_CASE("point containment distinguishes interior, boundary, and holes") {
  Polygon<Rat> holed;
  holed.outer = {pt(0, 0), pt(10, 0), pt(10, 10), pt(0, 10)};
  holed.holes = {{pt(4, 4), pt(4, 6), pt(6, 6), pt(6, 4)}};
  CHECK(point_in_polygon(holed, pt(1, 1)));
  CHECK(point_in_polygon(holed, pt(0, 0)));
  CHECK(point_in_polygon(holed, pt(5, 0)));
  CHECK(point_in_polygon(holed, pt(5, 10)));
  CHECK(point_in_polygon(holed, pt(4, 5)));  // hole boundary still belongs
  CHECK(!point_in_polygon(holed, pt(5, 5)));
  CHECK(!point_in_polygon(holed, pt(-1, 5)));
  CHECK(!point_in_polygon(holed, pt(11, 5)));
  CHECK(!point_in_polygon(holed, ptq(21, 2, 0, 1)));
  CHECK(!point_in_polygon(holed, pt(20, 10)));  // collinear with the top edge
}

TEST_CASE("diverging slot riders replay their wall stops") {
  Polygon<Rat> slot;
  slot.outer = {pt(0, 0), pt(10, 0), pt(10, 6), pt(6, 6),
                pt(6, 3), pt(4, 3), pt(4, 6), pt(0, 6)};
  auto inst = induced_instance(slot);
  REQUIRE(inst.riders.size() == 2);
  CHECK(inst.riders[0].s == pt(6, 3));
  CHECK(inst.riders[0].v.x == rat(1));
  CHECK(inst.riders[0].v.y == rat(-1));
  CHECK(*inst.riders[0].d == pt(9, 0));
  CHECK(inst.riders[1].s == pt(4, 3));
  CHECK(inst.riders[1].v.x == rat(-1));
  CHECK(inst.riders[1].v.y == rat(-1));
  CHECK(*inst.riders[1].d == pt(1, 0));
  SolveOptions<Rat> opt;
  opt.halving = HalvingKind::Midpoint;
  opt.verify_every_event = true;
  auto got = solve(inst, opt);
  for (const auto& rec : got.records) {
    CHECK(rec.outcome.kind == OutcomeKind::HitWall);
    CHECK(rec.t_end == rat(3));
  }
  expect_induced_agree(slot, true);  // no crash, so the policy never fires
}

TEST_CASE("a double-slot polygon replays a collinear mutual crash") {
  // Two slots whose riders share the supporting line x + y = 9 head-on.
  Polygon<Rat> dslot;
  dslot.outer = {pt(0, 0), pt(7, 0),  pt(7, 2),  pt(9, 2), pt(9, 0), pt(10, 0),
                 pt(10, 6), pt(6, 6), pt(6, 3), pt(4, 3), pt(4, 6), pt(0, 6)};
  auto inst = induced_instance(dslot);
  REQUIRE(inst.riders.size() == 4);
  CHECK(inst.riders[0].s == pt(7, 2));
  CHECK(inst.riders[1].s == pt(9, 2));
  CHECK(inst.riders[2].s == pt(6, 3));
  CHECK(inst.riders[3].s == pt(4, 3));

  auto spawn = induced_spawn_policy(dslot);
  SolveOptions<Rat> opt;
  opt.halving = HalvingKind::Midpoint;
  opt.spawn = spawn;
  opt.verify_every_event = true;
  auto got = solve(inst, opt);
  REQUIRE(got.records.size() == 4);  // the head-on pinch spawns nothing
  CHECK(got.records[0].outcome.kind == OutcomeKind::Crashed);
  CHECK(got.records[0].outcome.other == 3);
  CHECK(got.records[0].kappa == ptq(13, 2, 5, 2));
  CHECK(got.records[0].t_end == q(1, 2));
  CHECK(got.records[2].outcome.kind == OutcomeKind::Crashed);
  CHECK(got.records[2].outcome.other == 1);
  CHECK(got.records[2].kappa == ptq(13, 2, 5, 2));
  CHECK(got.records[1].outcome.kind == OutcomeKind::HitWall);
  CHECK(got.records[1].kappa == pt(10, 3));
  CHECK(got.records[1].t_end == rat(1));
  CHECK(got.records[3].outcome.kind == OutcomeKind::HitWall);
  CHECK(got.records[3].kappa == pt(1, 0));
  CHECK(got.records[3].t_end == rat(3));

  // Both merge combinations fail the offset-feasibility test directly.
  auto kids = spawn(ptq(13, 2, 5, 2), q(1, 2), inst.riders[0], inst.riders[2]);
  CHECK(kids.empty());

  expect_induced_agree(dslot, true);
}

TEST_CASE("a merging crash spawns the reconstructed corner rider") {
  // Slope-rational notch: the two reflex riders die on each other at the
  // origin and the surviving arcs merge into one vertical rider.
  Polygon<Rat> merge;
  merge.outer = {pt(-4, -1),          ptq(-1, 2, -1, 1), ptq(-1, 8, -3, 2),
                 ptq(1, 8, -3, 2),    ptq(5, 7, -5, 7),  ptq(123, 35, 97, 70),
                 pt(4, 4),            pt(-4, 4)};
  auto inst = induced_instance(merge);
  REQUIRE(inst.riders.size() == 2);
  CHECK(inst.riders[0].s == ptq(-1, 2, -1, 1));
  CHECK(inst.riders[0].v.x == q(1, 2));
  CHECK(inst.riders[0].v.y == rat(1));
  CHECK(inst.riders[0].edges == std::pair<int, int>(0, 1));
  CHECK(*inst.riders[0].d == pt(2, 4));
  CHECK(inst.riders[1].s == ptq(5, 7, -5, 7));
  CHECK(inst.riders[1].v.x == q(-5, 7));
  CHECK(inst.riders[1].v.y == q(5, 7));
  CHECK(inst.riders[1].edges == std::pair<int, int>(3, 4));
  CHECK(*inst.riders[1].d == pt(-4, 4));

  auto spawn = induced_spawn_policy(merge);
  SolveOptions<Rat> opt;
  opt.halving = HalvingKind::Midpoint;
  opt.spawn = spawn;
  opt.verify_every_event = true;
  auto got = solve(inst, opt);
  REQUIRE(got.records.size() == 3);
  CHECK(got.records[0].outcome.kind == OutcomeKind::Crashed);
  CHECK(got.records[0].outcome.other == 2);
  CHECK(got.records[0].kappa == pt(0, 0));
  CHECK(got.records[0].t_end == rat(1));
  CHECK(got.records[1].outcome.kind == OutcomeKind::Crashed);
  CHECK(got.records[1].outcome.other == 1);
  CHECK(got.records[1].kappa == pt(0, 0));
  CHECK(got.records[1].t_end == rat(1));
  CHECK(got.records[2].outcome.kind == OutcomeKind::HitWall);
  CHECK(got.records[2].kappa == pt(0, 4));
  CHECK(got.records[2].t_end == q(17, 5));

  const auto& child = got.riders[2];
  CHECK(child.id == 3);
  CHECK(child.s == pt(0, 0));
  CHECK(child.t0 == rat(1));
  CHECK(child.v.x == rat(0));
  CHECK(child.v.y == q(5, 3));
  CHECK(child.edges == std::pair<int, int>(3, 1));
  CHECK(*child.d == pt(0, 4));
  CHECK(child.dest_kind == DestKind::Wall);

  // The child's defining pair sits exactly on both unit offsets.
  auto nin = inward_unit_normal<Rat>(inst.walls[3].b - inst.walls[3].a);
  auto nout = inward_unit_normal<Rat>(inst.walls[1].b - inst.walls[1].a);
  CHECK(dot(nin, child.v) == rat(1));
  CHECK(dot(nout, child.v) == rat(1));

  // Swapping the crash arguments reconstructs the same corner.
  auto direct = spawn(pt(0, 0), rat(1), inst.riders[1], inst.riders[0]);
  REQUIRE(direct.size() == 1);
  CHECK(direct[0].v.x == rat(0));
  CHECK(direct[0].v.y == q(5, 3));

  auto ref = oracle_solve(inst, spawn);
  CHECK(compare_results(got, ref, 0.0).empty());
  expect_induced_agree(merge, true);

  // Float backend: same verdicts, offsets correct to twelve digits.
  auto fpoly = to_float_polygon(merge);
  auto finst = induced_instance(fpoly);
  SolveOptions<double> fopt;
  fopt.halving = HalvingKind::Midpoint;
  fopt.spawn = induced_spawn_policy(fpoly);
  fopt.verify_every_event = true;
  auto fgot = solve(finst, fopt);
  REQUIRE(fgot.records.size() == 3);
  auto fbad = compare_results(fgot, ref, 1e-9);
  std::string fmsg;
  for (const auto& b : fbad) fmsg += b + " | ";
  CHECK_MESSAGE(fbad.empty(), fmsg);
  auto fnin = inward_unit_normal(finst.walls[3].b - finst.walls[3].a);
  auto fnout = inward_unit_normal(finst.walls[1].b - finst.walls[1].a);
  CHECK(std::abs(dot(fnin, fgot.riders[2].v) - 1.0) <= 1e-12);
  CHECK(std::abs(dot(fnout, fgot.riders[2].v) - 1.0) <= 1e-12);
}
