#pragma once

// Deterministic instance and polygon generators for testing, regression
// hunting, and benchmarks. Every generator is a pure function of its
// configuration; the same seed yields a byte-identical file.

#include <random>
#include <string>
#include <vector>

#include "moto/io.hpp"

namespace moto {

enum class GenKind {
  Uniform,       // independent riders on an integer board
  COriented,     // velocities drawn from C fixed directions
  Collinear,     // shared supporting lines: head-on and chasing families
  Cascade,       // one victim accumulating crossings from staggered spawns
  RectPolygon,   // rectilinear skyline polygon (induced mode)
  SlopePolygon,  // rectangle with 3-4-5 notches (induced mode)
};

inline const char* gen_kind_name(GenKind k) {
  switch (k) {
    case GenKind::Uniform: return "uniform";
    case GenKind::COriented: return "coriented";
    case GenKind::Collinear: return "collinear";
    case GenKind::Cascade: return "cascade";
    case GenKind::RectPolygon: return "rect-polygon";
    case GenKind::SlopePolygon: return "slope-polygon";
  }
  return "?";
}

inline GenKind gen_kind_from(const std::string& s) {
  for (GenKind k : {GenKind::Uniform, GenKind::COriented, GenKind::Collinear, GenKind::Cascade,
                    GenKind::RectPolygon, GenKind::SlopePolygon})
    if (s == gen_kind_name(k)) return k;
  throw InvalidInput("unknown generator kind '" + s + "'");
}

struct GenConfig {
  int n = 8;            // riders; levels for cascade; size knob for polygons
  std::uint64_t seed = 1;
  int directions = 8;   // distinct velocity directions for coriented (2..8)
};

namespace genimpl {

inline Motorcycle<Rat> rider(int id, long sx, long sy, long vx, long vy) {
  Motorcycle<Rat> m;
  m.id = id;
  m.s = {rat(sx), rat(sy)};
  m.v = {rat(vx), rat(vy)};
  return m;
}

// Riders on an integer board with short explicit destinations. The board
// side grows with sqrt(n) so the expected number of interactions per rider
// stays constant as instances scale.
inline Instance<Rat> uniform(std::mt19937_64& rng, int n) {
  long board = 8;
  while (board * board < 64L * n) ++board;
  std::uniform_int_distribution<long> coord(0, board), vel(-4, 4), len(2, 6);
  std::set<std::pair<long, long>> used;
  Instance<Rat> inst;
  int id = 1;
  while (id <= n) {
    long x = coord(rng), y = coord(rng);
    long vx = vel(rng), vy = vel(rng);
    if ((vx == 0 && vy == 0) || !used.insert({x, y}).second) continue;
    auto m = rider(id, x, y, vx, vy);
    long k = len(rng);
    m.d = Point2<Rat>{rat(x + k * vx), rat(y + k * vy)};
    inst.riders.push_back(m);
    ++id;
  }
  return inst;
}

// The first C riders take the C directions in order so exactly C distinct
// directions appear whenever n >= C.
inline Instance<Rat> c_oriented(std::mt19937_64& rng, int n, int c) {
  static const long dirs[8][2] = {{1, 0}, {0, 1}, {1, 1},  {1, -1},
                                  {2, 1}, {1, 2}, {3, -4}, {4, 3}};
  if (c < 2) c = 2;
  if (c > 8) c = 8;
  long board = 8L * n;
  std::uniform_int_distribution<long> coord(0, board), pick(0, c - 1), speed(1, 3), len(2, 6);
  std::set<std::pair<long, long>> used;
  Instance<Rat> inst;
  int id = 1;
  while (id <= n) {
    long x = coord(rng), y = coord(rng);
    long di = id <= c ? id - 1 : pick(rng);
    long sp = speed(rng);
    if (!used.insert({x, y}).second) continue;
    auto m = rider(id, x, y, sp * dirs[di][0], sp * dirs[di][1]);
    long k = len(rng);
    m.d = Point2<Rat>{m.s.x + rat(k) * m.v.x, m.s.y + rat(k) * m.v.y};
    inst.riders.push_back(m);
    ++id;
  }
  return inst;
}

// Families sharing supporting lines: half the riders sit on a few common
// lines (head-on and chasing mixes), the rest cross them.
inline Instance<Rat> collinear(std::mt19937_64& rng, int n) {
  static const long dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -2}};
  long board = 6L * n;
  std::uniform_int_distribution<long> coord(0, board), off(1, 5), flip(0, 1), vel(-4, 4),
      len(2, 6);
  int lines = std::max(2, n / 4);
  std::set<std::pair<long, long>> used;
  Instance<Rat> inst;
  int id = 1;
  for (int l = 0; l < lines && id <= n; ++l) {
    long ax = coord(rng), ay = coord(rng);
    const long* d = dirs[l % 4];
    long pos = 0;
    int members = 2 + static_cast<int>(flip(rng));
    for (int j = 0; j < members && id <= n; ++j) {
      pos += off(rng);
      long x = ax + pos * d[0], y = ay + pos * d[1];
      if (!used.insert({x, y}).second) continue;
      long sgn = flip(rng) ? 1 : -1;
      auto m = rider(id, x, y, sgn * d[0], sgn * d[1]);
      long span = len(rng);
      m.d = Point2<Rat>{m.s.x + rat(span) * m.v.x, m.s.y + rat(span) * m.v.y};
      inst.riders.push_back(m);
      ++id;
    }
  }
  while (id <= n) {
    long x = coord(rng), y = coord(rng);
    long vx = vel(rng), vy = vel(rng);
    if ((vx == 0 && vy == 0) || !used.insert({x, y}).second) continue;
    auto m = rider(id, x, y, vx, vy);
    long k = len(rng);
    m.d = Point2<Rat>{rat(x + k * vx), rat(y + k * vy)};
    inst.riders.push_back(m);
    ++id;
  }
  return inst;
}

// Layout constants for the cascade family, all derived from the level
// count. Push towers sit at multiples of Q left of x = M; ballast towers
// sit at x >= M, spaced G apart. The victim's line x = 0 is crossed by
// level m's push child at z_m = Z - 4m and by its ballast child's backward
// line extension at a_m = z_m - 2.
struct CascadeLayout {
  long k, Q, Z, D, G, M;
  Rat delta;  // half-gap of the head-on tower pairs (crash after delta time)
  long q(long m) const { return (k - m + 1) * Q; }
  long u(long m) const { return M + (k - m) * G; }
  long z(long m) const { return Z - 4 * m; }
  long a(long m) const { return Z - 4 * m - 2; }
};

inline CascadeLayout cascade_layout(long k) {
  CascadeLayout L;
  L.k = std::max(1L, k);
  L.Q = L.k + 6;
  L.Z = 4 * L.k + 8;
  L.D = L.Z + 8;
  L.G = 7;
  L.M = 2 * L.k * L.Q + (L.Z + 4) * L.G + 1000;
  L.delta = Rat(1, 64 * L.k * L.k);
  L.delta.canonicalize();
  return L;
}

// One slow vertical victim plus 2k staggered head-on tower pairs, all
// crashing within t < 1/2. Each level m spawns two children in order: a
// ballast rider at x = u_m that rides away to a short destination but whose
// supporting line crosses the victim's line at a_m, then a push rider at
// x = q_m that creeps toward the victim and strikes its tentative track at
// z_m. At that strike the halving interval holds exactly two crossings,
// a_m and z_m, so counting halving splits between them at z_m - 1, leaving
// the next strike z_{m+1} = z_m - 4 still visible: the victim's stack
// accumulates all k crossings. Midpoint halving instead caps the track at
// z_1 / 2 after the first strike and every later push misses, so its stack
// stays O(1) no matter how many levels the instance has.
inline Instance<Rat> cascade(int k) {
  CascadeLayout L = cascade_layout(k);
  Instance<Rat> inst;
  auto v = rider(1, 0, 0, 0, 1);
  v.d = Point2<Rat>{rat(0), rat(L.D)};
  inst.riders.push_back(v);
  int id = 2;
  auto tower = [&](long x, const Rat& t0) {
    Motorcycle<Rat> down;
    down.id = id++;
    down.s = {rat(x), rat(-4) + L.delta};
    down.v = {rat(0), rat(-1)};
    down.d = Point2<Rat>{rat(x), rat(-5)};
    down.t0 = t0;
    Motorcycle<Rat> up;
    up.id = id++;
    up.s = {rat(x), rat(-4) - L.delta};
    up.v = {rat(0), rat(1)};
    up.d = Point2<Rat>{rat(x), rat(-3)};
    up.t0 = t0;
    inst.riders.push_back(down);
    inst.riders.push_back(up);
  };
  for (long m = 1; m <= L.k; ++m) {
    Rat crash_ballast = Rat(2 * m - 1, 4 * L.k);
    crash_ballast.canonicalize();
    Rat crash_push = Rat(2 * m, 4 * L.k);
    crash_push.canonicalize();
    tower(L.u(m), crash_ballast - L.delta);
    tower(L.q(m), crash_push - L.delta);
  }
  return inst;
}

}  // namespace genimpl

// Crash policy paired with the cascade family. Tower crashes at x >= M
// spawn ballast riders that ride away to a short destination; tower crashes
// left of M spawn push riders that creep toward the victim's line and reach
// it only long after the victim has passed. Both children's supporting
// lines cross x = 0 at the heights the layout encodes.
template <class S>
SpawnPolicy<S> cascade_spawn_policy(const Instance<S>& inst) {
  genimpl::CascadeLayout L =
      genimpl::cascade_layout((static_cast<long>(inst.riders.size()) - 1) / 4);
  return [L](const Point2<S>& p, const S& t, const Motorcycle<S>& ma,
             const Motorcycle<S>& mb) -> std::vector<Motorcycle<S>> {
    (void)t;
    (void)ma;
    (void)mb;
    if (!approx_eq(p.y, S(-4))) return {};
    Motorcycle<S> c;
    if (p.x < S(L.M)) {
      // Push rider: from (q_m, -4) toward (0, z_m) at speed 1/(4Z) of the
      // span, arriving at x = 0 at parameter 4Z; destination one full span
      // beyond the crossing keeps the crossing strictly inside the ray.
      long m = L.k + 1 - static_cast<long>(to_double(p.x) / static_cast<double>(L.Q) + 0.5);
      S z = S(static_cast<long>(L.z(m)));
      S fourZ = S(4 * L.Z);
      c.v = {S(0) - p.x / fourZ, (z + S(4)) / fourZ};
      c.d = Point2<S>{S(0) - p.x, S(2) * z + S(4)};
    } else {
      // Ballast rider: unit x-speed away from the victim, dropping just
      // enough that its line's backward extension crosses x = 0 at a_m.
      // It stops halfway to the next tower column.
      long m = L.k - static_cast<long>((to_double(p.x) - static_cast<double>(L.M)) /
                                           static_cast<double>(L.G) +
                                       0.5);
      S rise = S(L.a(m) + 4);
      c.v = {S(1), (S(0) - rise) / p.x};
      S half_gap = S(L.G) / S(2);
      c.d = Point2<S>{p.x + half_gap, p.y - rise * half_gap / p.x};
    }
    return {c};
  };
}

// Skyline of unit-width bars with distinct adjacent heights: a simple
// rectilinear polygon whose notches carry reflex vertices.
inline Polygon<Rat> rectilinear_polygon(std::mt19937_64& rng, int bars) {
  if (bars < 3) bars = 3;
  std::uniform_int_distribution<long> height(1, 9);
  std::vector<long> h(static_cast<size_t>(bars));
  for (int i = 0; i < bars; ++i) {
    long v = height(rng);
    while (i > 0 && v == h[static_cast<size_t>(i - 1)]) v = height(rng);
    h[static_cast<size_t>(i)] = v;
  }
  Polygon<Rat> poly;
  auto add = [&](long x, long y) { poly.outer.push_back({rat(x), rat(y)}); };
  add(0, 0);
  add(bars, 0);
  add(bars, h[static_cast<size_t>(bars - 1)]);
  for (int i = bars - 1; i >= 1; --i) {
    add(i, h[static_cast<size_t>(i)]);
    add(i, h[static_cast<size_t>(i - 1)]);
  }
  add(0, h[0]);
  return poly;
}

// Rectangle with 3-4-5 notches carved below the bottom edge. Each notch's
// mouth corners are reflex with velocities (1/2, 1) and (-1/2, 1); the two
// riders meet above the notch and merge into a vertical child.
inline Polygon<Rat> sloped_polygon(std::mt19937_64& rng, int notches) {
  if (notches < 1) notches = 1;
  std::uniform_int_distribution<long> flat(1, 3), gap(1, 3);
  Polygon<Rat> poly;
  auto add = [&](long x, long y) { poly.outer.push_back({rat(x), rat(y)}); };
  add(0, 0);
  long x = 0;
  for (int j = 0; j < notches; ++j) {
    x += gap(rng);
    long f = flat(rng);
    add(x, 0);
    add(x + 3, -4);
    add(x + 3 + f, -4);
    add(x + 6 + f, 0);
    x += 6 + f;
  }
  long W = x + gap(rng);
  long H = 12;
  add(W, 0);
  add(W, H);
  add(0, H);
  return poly;
}

inline InstanceFile generate_instance(GenKind kind, const GenConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  InstanceFile f;
  f.config.backend = Backend::Exact;
  f.config.bit_width = 32;
  f.config.shooter = cfg.n >= 64 ? ShooterKind::Grid : ShooterKind::Linear;
  switch (kind) {
    case GenKind::Uniform:
      f.instance = genimpl::uniform(rng, cfg.n);
      break;
    case GenKind::COriented:
      f.instance = genimpl::c_oriented(rng, cfg.n, cfg.directions);
      break;
    case GenKind::Collinear:
      f.instance = genimpl::collinear(rng, cfg.n);
      break;
    case GenKind::Cascade:
      f.instance = genimpl::cascade(cfg.n);
      break;
    case GenKind::RectPolygon:
      f.polygon = rectilinear_polygon(rng, cfg.n);
      f.config.halving = HalvingKind::Midpoint;
      break;
    case GenKind::SlopePolygon:
      f.polygon = sloped_polygon(rng, std::max(1, cfg.n / 2));
      f.config.halving = HalvingKind::Midpoint;
      break;
  }
  return f;
}

}  // namespace moto
