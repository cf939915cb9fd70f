#include <string>

#include "doctest.h"
#include "moto/io.hpp"

using namespace moto;

namespace {

Rat q(long n, long d) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// Message of the InvalidInput thrown by parse_instance, empty if none.
std::string parse_error(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

const char* kSmall = R"(# two riders, one wall
[config]
backend exact
w 16
halving midpoint
shooter grid
rho 1/2

[motorcycles]
m 1 s 0 0 v 1 0 d 10 0
m 2 s 4 -3 v 0 2 t0 1/4

[walls]
w 12 -5 12 5
)";

}  // namespace

TEST_CASE("number literals parse exactly") {
  auto n = [](const char* s) { return ioimpl::parse_number(s, 1); };
  CHECK(n("42") == Rat(42));
  CHECK(n("-7") == Rat(-7));
  CHECK(n("+3") == Rat(3));
  CHECK(n("1/3") == q(1, 3));
  CHECK(n("-9/12") == q(-3, 4));
  CHECK(n("0.25") == q(1, 4));
  CHECK(n("-0.5") == q(-1, 2));
  CHECK(n(".5") == q(1, 2));
}

TEST_CASE("fraction digits with leading zeros stay decimal") {
  // ioimpl::parse_number must never hand a zero-prefixed digit string to a
  // base-guessing integer constructor (octal would give 5.000000184 here).
  auto r = ioimpl::parse_number("5.000000270", 1);
  CHECK(r == q(500000027, 100000000));
  CHECK(ioimpl::parse_number("007", 1) == Rat(7));
  CHECK(ioimpl::parse_number("0.08", 1) == q(2, 25));
}

TEST_CASE("malformed literals fail with the line number") {
  auto bad = [](const char* tok) {
    try {
      ioimpl::parse_number(tok, 7);
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  for (const char* tok : {"1..2", "2.", "1/0", "1/", "/3", "abc", "--4", "1e5", ""}) {
    auto msg = bad(tok);
    CHECK_MESSAGE(contains(msg, "line 7:"), tok, " -> ", msg);
  }
}

TEST_CASE("instance files round trip byte for byte") {
  auto f = parse_instance(kSmall);
  CHECK(f.config.backend == Backend::Exact);
  CHECK(f.config.bit_width == 16);
  CHECK(f.config.halving == HalvingKind::Midpoint);
  CHECK(f.config.shooter == ShooterKind::Grid);
  REQUIRE(f.config.rho.has_value());
  CHECK(*f.config.rho == q(1, 2));
  REQUIRE(f.instance.riders.size() == 2);
  CHECK(f.instance.riders[0].d.has_value());
  CHECK(!f.instance.riders[1].d.has_value());
  CHECK(f.instance.riders[1].t0 == q(1, 4));
  REQUIRE(f.instance.walls.size() == 1);

  std::string once = write_instance(f);
  std::string twice = write_instance(parse_instance(once));
  CHECK(once == twice);
}

TEST_CASE("polygon files round trip and stay exclusive") {
  const char* text = R"([config]
backend exact
w 32
halving counting
shooter linear
[polygon]
ring outer 0 0 8 0 8 8 5 8 5 5 3 5 3 8 0 8 0 0
)";
  auto f = parse_instance(text);
  REQUIRE(f.polygon.has_value());
  CHECK(f.polygon->outer.size() == 8);
  CHECK(f.polygon->holes.empty());
  std::string once = write_instance(f);
  std::string twice = write_instance(parse_instance(once));
  CHECK(once == twice);

  auto inst = effective_instance(f);
  CHECK(inst.walls.size() == 8);
  CHECK(inst.riders.size() == 2);  // the two reflex corners of the slot
  CHECK(inst.bit_width == 32);
  CHECK(inst.numeric == Backend::Exact);

  CHECK(contains(parse_error(std::string(text) + "[motorcycles]\nm 1 s 0 0 v 1 0\n"),
                 "implicitly"));
}

TEST_CASE("parse errors carry positions and causes") {
  CHECK(contains(parse_error("m 1 s 0 0 v 1 0\n"), "line 1: content before any section"));
  CHECK(contains(parse_error("[nonsense]\n"), "unknown section"));
  CHECK(contains(parse_error("[config]\nbackend quantum\n"), "line 2: unknown backend"));
  CHECK(contains(parse_error("[config]\ncolour red\n"), "unknown config key"));
  CHECK(contains(parse_error("[config]\nw 0\n"), "1..512"));
  CHECK(contains(parse_error("[config]\nw 1/2\n"), "1..512"));
  CHECK(contains(parse_error("[motorcycles]\nm 1 s 0 0 v 1 0\nm 1 s 2 2 v 0 1\n"),
                 "line 3: duplicate motorcycle id 1"));
  CHECK(contains(parse_error("[motorcycles]\nm 0 s 0 0 v 1 0\n"), "positive integer"));
  CHECK(contains(parse_error("[motorcycles]\nm 1 v 1 0\n"), "expected 's"));
  CHECK(contains(parse_error("[motorcycles]\nm 1 s 0 0 v 1 0 d 4 0 extra\n"), "unexpected token"));
  CHECK(contains(parse_error("[walls]\nw 0 0 1\n"), "wall lines"));
  CHECK(contains(parse_error("[polygon]\nring outer 0 0 4 0 4 4\n"), "open polygon ring"));
  CHECK(contains(parse_error("[polygon]\nring inner 0 0 4 0 4 4 0 0\n"), "'outer' or 'hole'"));
  CHECK(contains(parse_error("[polygon]\nring hole 0 0 4 0 4 4 0 0\n"), "lacks an outer ring"));
  CHECK(contains(parse_error("[config]\nbackend exact\nw 4\n[motorcycles]\nm 1 s 100 0 v 1 0\n"),
                 "bit width"));
}

TEST_CASE("bit width checks the reduced literal, not its spelling") {
  // 14/2 reduces to 7, which fits in 3 bits even though 14 does not.
  auto f = parse_instance("[config]\nbackend exact\nw 3\n[motorcycles]\nm 1 s 14/2 0 v 1 0\n");
  CHECK(f.instance.riders[0].s.x == Rat(7));
  // On the float backend wide literals are allowed.
  CHECK(parse_error("[config]\nbackend float\nw 4\n[motorcycles]\nm 1 s 100 0 v 1 0\n") == "");
}

TEST_CASE("results serialize with verdicts and stats") {
  MGResult<Rat> res;
  res.records.push_back({1, {Rat(4), Rat(0)}, Rat(4), {OutcomeKind::Reached, 0}});
  res.records.push_back({2, {Rat(2), q(1, 2)}, q(7, 2), {OutcomeKind::Crashed, 1}});
  EngineStats st;
  st.events = 9;
  st.ray_queries = 5;
  st.halving_queries = 2;
  st.max_cross_targets = 1;
  std::string out = write_result(res, st);
  CHECK(contains(out, "r 1 reached 4 0 4\n"));
  CHECK(contains(out, "r 2 crashed 2 1/2 7/2 into 1\n"));
  CHECK(contains(out, "stats events 9 ray-queries 5 halving-queries 2"));
}

TEST_CASE("traces annotate every queued target with its arrival time") {
  Instance<Rat> inst;
  Motorcycle<Rat> m;
  m.id = 1;
  m.s = {Rat(0), Rat(0)};
  m.v = {Rat(1), Rat(0)};
  m.d = Point2<Rat>{Rat(4), Rat(0)};
  inst.riders.push_back(m);
  m.id = 2;
  m.s = {Rat(2), Rat(-3)};
  m.v = {Rat(0), Rat(1)};
  m.d = Point2<Rat>{Rat(2), Rat(5)};
  inst.riders.push_back(m);
  inst = prepare_instance(inst);

  SolveOptions<Rat> opt;
  std::vector<TraceEvent<Rat>> log;
  opt.observer = [&](const TraceEvent<Rat>& ev) { log.push_back(ev); };
  MotorcycleEngine<Rat> eng(inst, opt);
  eng.run();
  std::string tr = write_trace(inst, log);

  // Rider 2 never reaches its destination, yet the queue held that target;
  // the start record announces it with its would-be arrival time.
  CHECK(contains(tr, "2:(2,5)@8"));
  // The crash point enters both stacks with per-rider times.
  CHECK(contains(tr, "2:(2,0)@3"));
  CHECK(contains(tr, "1:(2,0)@2"));
  CHECK(contains(tr, "case=crash"));
  // A destination the rider itself pushed at its start is announced once.
  size_t first = tr.find("1:(4,0)@4");
  REQUIRE(first != std::string::npos);
  CHECK(tr.find("1:(4,0)@4", first + 1) > tr.find('\n', first));
}
