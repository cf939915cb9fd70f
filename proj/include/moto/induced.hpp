#pragma once

// Riders induced by a simple polygon: one per reflex vertex, each moving so
// that the vertex stays on the unit-speed inward offsets of both incident
// edges. Crashes between such riders can merge their boundary arcs into a
// single new reflex vertex; induced_spawn_policy reconstructs that vertex.

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "moto/geom.hpp"
#include "moto/mg_core.hpp"
#include "moto/rayshoot.hpp"
#include "moto/result.hpp"

namespace moto {

// Outer ring counterclockwise, holes clockwise: the interior then lies to
// the left of every directed edge, making all per-edge reasoning uniform.
template <class S>
struct Polygon {
  std::vector<Point2<S>> outer;
  std::vector<std::vector<Point2<S>>> holes;
};

// Square root of a nonnegative rational, when it is rational itself.
inline std::optional<Rat> exact_sqrt(const Rat& x) {
  if (sgn(x) < 0) return std::nullopt;
  Rat c = x;
  c.canonicalize();
  const mpz_class num = c.get_num();
  const mpz_class den = c.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  Rat r(rn, rd);
  r.canonicalize();
  return r;
}

inline double sqrt_scalar(double x) { return std::sqrt(x); }

// The exact backend only admits edges of rational length; anything else has
// an irrational unit normal and must run on the float backend instead.
inline Rat sqrt_scalar(const Rat& x) {
  auto r = exact_sqrt(x);
  if (!r) throw DomainError("edge length is irrational on the exact backend");
  return *r;
}

// Unit normal pointing to the left of the edge direction (the interior side).
template <class S>
Vector2<S> inward_unit_normal(const Vector2<S>& edge_dir) {
  S len2 = dot(edge_dir, edge_dir);
  if (is_zero(len2)) throw InvalidInput("zero-length polygon edge");
  S inv = S(1) / sqrt_scalar(len2);
  return {inv * (-edge_dir.y), inv * edge_dir.x};
}

// Velocity that keeps a vertex on the unit offsets of both incident edges:
// the unique v with n_prev . v = n_next . v = 1. A needle vertex whose
// normals are antiparallel admits no such velocity.
template <class S>
Vector2<S> reflex_velocity(const Vector2<S>& e_prev_dir, const Vector2<S>& e_next_dir) {
  Vector2<S> n1 = inward_unit_normal(e_prev_dir);
  Vector2<S> n2 = inward_unit_normal(e_next_dir);
  S den = S(1) + dot(n1, n2);
  if (is_zero(den)) throw DomainError("antiparallel edge normals at a vertex");
  S k = S(1) / den;
  return k * (n1 + n2);
}

namespace detail {

template <class S>
const std::vector<Point2<S>>& polygon_ring(const Polygon<S>& poly, int ring) {
  return ring == 0 ? poly.outer : poly.holes[static_cast<size_t>(ring) - 1];
}

template <class S>
int polygon_ring_count(const Polygon<S>& poly) {
  return 1 + static_cast<int>(poly.holes.size());
}

// Twice the signed area; positive iff the ring winds counterclockwise.
template <class S>
S ring_area2(const std::vector<Point2<S>>& ring) {
  S a(0);
  for (size_t k = 0; k < ring.size(); ++k) {
    const auto& p = ring[k];
    const auto& q = ring[(k + 1) % ring.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return a;
}

// Sign of the turn taken at b when travelling a -> b -> c: +1 left, -1
// right, 0 straight (scale-normalized zero test).
template <class S>
int turn_sign(const Point2<S>& a, const Point2<S>& b, const Point2<S>& c) {
  Vector2<S> u = b - a;
  Vector2<S> w = c - b;
  S cr = cross(u, w);
  S scale = (abs_of(u.x) + abs_of(u.y) + S(1)) * (abs_of(w.x) + abs_of(w.y) + S(1));
  if (is_zero(cr / scale)) return 0;
  return cr > S(0) ? 1 : -1;
}

// Closed intersection test between segments [a,b] and [c,d]. turn_sign
// doubles as the orientation of its third point against line (first,
// second): cross(b-a, c-b) == cross(b-a, c-a).
template <class S>
bool segments_touch(const Point2<S>& a, const Point2<S>& b, const Point2<S>& c,
                    const Point2<S>& d) {
  int s1 = turn_sign(a, b, c);
  int s2 = turn_sign(a, b, d);
  int s3 = turn_sign(c, d, a);
  int s4 = turn_sign(c, d, b);
  if (s1 * s2 < 0 && s3 * s4 < 0) return true;
  if (s1 == 0 && on_segment(c, a, b)) return true;
  if (s2 == 0 && on_segment(d, a, b)) return true;
  if (s3 == 0 && on_segment(a, c, d)) return true;
  if (s4 == 0 && on_segment(b, c, d)) return true;
  return false;
}

template <class S>
bool on_ring_boundary(const std::vector<Point2<S>>& ring, const Point2<S>& p) {
  for (size_t k = 0; k < ring.size(); ++k)
    if (on_segment(p, ring[k], ring[(k + 1) % ring.size()])) return true;
  return false;
}

// Even-odd crossing count; boundary points are NOT handled here.
template <class S>
bool inside_ring(const std::vector<Point2<S>>& ring, const Point2<S>& p) {
  bool in = false;
  for (size_t k = 0; k < ring.size(); ++k) {
    const auto& a = ring[k];
    const auto& b = ring[(k + 1) % ring.size()];
    if ((a.y > p.y) != (b.y > p.y)) {
      S xcross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xcross) in = !in;
    }
  }
  return in;
}

// Global wall order: outer ring edges first, then each hole's, edge k of a
// ring running vertex k -> k+1. Rider edge ids index this list.
template <class S>
std::vector<Wall<S>> polygon_walls(const Polygon<S>& poly) {
  std::vector<Wall<S>> walls;
  for (int r = 0; r < polygon_ring_count(poly); ++r) {
    const auto& ring = polygon_ring(poly, r);
    for (size_t k = 0; k < ring.size(); ++k)
      walls.push_back({ring[k], ring[(k + 1) % ring.size()]});
  }
  return walls;
}

}  // namespace detail

template <class S>
void validate_polygon(const Polygon<S>& poly) {
  using detail::polygon_ring;
  using detail::polygon_ring_count;
  const int rings = polygon_ring_count(poly);
  for (int r = 0; r < rings; ++r) {
    const auto& ring = polygon_ring(poly, r);
    const int n = static_cast<int>(ring.size());
    if (n < 3) throw InvalidInput("polygon ring needs at least three vertices");
    for (int k = 0; k < n; ++k) {
      const auto& a = ring[k];
      const auto& b = ring[(k + 1) % n];
      const auto& c = ring[(k + 2) % n];
      if (approx_eq(a.x, b.x) && approx_eq(a.y, b.y))
        throw InvalidInput("zero-length polygon edge");
      // A spike (the boundary doubling back along itself) is collinear with
      // reversed direction; straight continuation vertices are fine.
      if (detail::turn_sign(a, b, c) == 0 && dot(b - a, c - b) < S(0))
        throw InvalidInput("polygon boundary doubles back on itself");
    }
    S a2 = detail::ring_area2(ring);
    if (r == 0 && !(a2 > S(0)))
      throw InvalidInput("outer ring must wind counterclockwise");
    if (r > 0 && !(a2 < S(0))) throw InvalidInput("holes must wind clockwise");
  }
  // Non-adjacent edges may not touch at all, within or across rings.
  struct Edge {
    int ring, idx;
    Point2<S> a, b;
  };
  std::vector<Edge> edges;
  for (int r = 0; r < rings; ++r) {
    const auto& ring = polygon_ring(poly, r);
    const int n = static_cast<int>(ring.size());
    for (int k = 0; k < n; ++k) edges.push_back({r, k, ring[k], ring[(k + 1) % n]});
  }
  for (size_t i = 0; i < edges.size(); ++i)
    for (size_t j = i + 1; j < edges.size(); ++j) {
      const Edge& e = edges[i];
      const Edge& f = edges[j];
      if (e.ring == f.ring) {
        const int n = static_cast<int>(polygon_ring(poly, e.ring).size());
        if ((e.idx + 1) % n == f.idx || (f.idx + 1) % n == e.idx) continue;
      }
      if (detail::segments_touch(e.a, e.b, f.a, f.b))
        throw InvalidInput("polygon edges intersect");
    }
  // Edge-disjoint rings either nest or lie apart; one vertex decides which.
  for (size_t h = 0; h < poly.holes.size(); ++h) {
    if (!detail::inside_ring(poly.outer, poly.holes[h][0]))
      throw InvalidInput("hole lies outside the outer ring");
    for (size_t g = 0; g < poly.holes.size(); ++g)
      if (g != h && detail::inside_ring(poly.holes[g], poly.holes[h][0]))
        throw InvalidInput("holes must be pairwise disjoint");
  }
}

// Vertices where the boundary turns right (interior angle above pi), as
// (ring, vertex index) pairs in scan order. The test is uniform across the
// outer ring and holes because the interior lies to the left of both.
template <class S>
std::vector<std::pair<int, int>> find_reflex_vertices(const Polygon<S>& poly) {
  validate_polygon(poly);
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < detail::polygon_ring_count(poly); ++r) {
    const auto& ring = detail::polygon_ring(poly, r);
    const int n = static_cast<int>(ring.size());
    for (int k = 0; k < n; ++k)
      if (detail::turn_sign(ring[(k + n - 1) % n], ring[k], ring[(k + 1) % n]) < 0)
        out.push_back({r, k});
  }
  return out;
}

// Closed containment: boundary points count as inside; hole interiors do not.
template <class S>
bool point_in_polygon(const Polygon<S>& poly, const Point2<S>& p) {
  if (detail::on_ring_boundary(poly.outer, p)) return true;
  for (const auto& h : poly.holes)
    if (detail::on_ring_boundary(h, p)) return true;
  if (!detail::inside_ring(poly.outer, p)) return false;
  for (const auto& h : poly.holes)
    if (detail::inside_ring(h, p)) return false;
  return true;
}

// One rider per reflex vertex (ids in scan order), every polygon edge a
// wall. Destinations come from the standard preparation, so each rider stops
// at the first boundary point ahead of it.
template <class S>
Instance<S> induced_instance(const Polygon<S>& poly) {
  auto reflex = find_reflex_vertices(poly);
  Instance<S> inst;
  inst.walls = detail::polygon_walls(poly);
  std::vector<int> ring_off(static_cast<size_t>(detail::polygon_ring_count(poly)), 0);
  for (int r = 1; r < detail::polygon_ring_count(poly); ++r)
    ring_off[static_cast<size_t>(r)] =
        ring_off[static_cast<size_t>(r) - 1] +
        static_cast<int>(detail::polygon_ring(poly, r - 1).size());
  for (const auto& [r, k] : reflex) {
    const auto& ring = detail::polygon_ring(poly, r);
    const int n = static_cast<int>(ring.size());
    Motorcycle<S> m;
    m.id = static_cast<int>(inst.riders.size()) + 1;
    m.s = ring[k];
    m.v = reflex_velocity(ring[k] - ring[(k + n - 1) % n], ring[(k + 1) % n] - ring[k]);
    m.edges = std::pair<int, int>{ring_off[static_cast<size_t>(r)] + (k + n - 1) % n,
                                  ring_off[static_cast<size_t>(r)] + k};
    inst.riders.push_back(m);
  }
  return prepare_instance(std::move(inst));
}

// Crash policy for polygon-induced instances. When two riders die on each
// other, their surviving boundary arcs may merge into one new reflex vertex
// made of an incoming edge from one rider and an outgoing edge from the
// other. The merged vertex must keep riding inside every incident unit
// offset, i.e. n . v >= 1 for all four incident edge normals with equality
// on its own defining pair, and the merged corner must itself be reflex.
// At most one combination passes; pinches where none does spawn nothing.
template <class S>
SpawnPolicy<S> induced_spawn_policy(const Polygon<S>& poly) {
  validate_polygon(poly);
  auto walls = std::make_shared<const std::vector<Wall<S>>>(detail::polygon_walls(poly));
  return [walls](const Point2<S>& p, const S& t, const Motorcycle<S>& a,
                 const Motorcycle<S>& b) -> std::vector<Motorcycle<S>> {
    std::vector<Motorcycle<S>> out;
    if (!a.edges || !b.edges) return out;
    auto edge_dir = [&](int e) -> Vector2<S> {
      const auto& w = (*walls)[static_cast<size_t>(e)];
      return w.b - w.a;
    };
    const std::array<int, 4> incident = {a.edges->first, a.edges->second, b.edges->first,
                                         b.edges->second};
    // edges->first traces into its vertex, edges->second out of it; a merged
    // corner needs one of each, taken from different riders.
    const std::array<std::pair<int, int>, 2> combos = {
        std::pair<int, int>{a.edges->first, b.edges->second},
        std::pair<int, int>{b.edges->first, a.edges->second}};
    for (const auto& [ein, eout] : combos) {
      Vector2<S> din = edge_dir(ein);
      Vector2<S> dout = edge_dir(eout);
      Vector2<S> n1 = inward_unit_normal(din);
      Vector2<S> n2 = inward_unit_normal(dout);
      S den = S(1) + dot(n1, n2);
      if (is_zero(den)) continue;  // needle corner: no finite velocity
      S k = S(1) / den;
      Vector2<S> v = k * (n1 + n2);
      bool feasible = true;
      for (int e : incident) {
        S prog = dot(inward_unit_normal(edge_dir(e)), v);
        if (prog < S(1) && !approx_eq(prog, S(1))) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      S cr = cross(din, dout);
      S scale = (abs_of(din.x) + abs_of(din.y)) * (abs_of(dout.x) + abs_of(dout.y)) + S(1);
      if (!(cr < S(0)) || is_zero(cr / scale)) continue;  // merged corner not reflex
      Motorcycle<S> child;
      child.v = v;
      child.t0 = t;
      child.edges = std::pair<int, int>{ein, eout};
      bool have = false;
      S best{};
      for (const auto& w : *walls) {
        auto lam = ray_segment_param(p, v, w.a, w.b);
        if (lam && (!have || *lam < best)) {
          best = *lam;
          have = true;
        }
      }
      if (!have) continue;  // no boundary ahead: nothing to trace
      child.d = p + best * v;
      child.dest_kind = DestKind::Wall;
      out.push_back(child);
      break;
    }
    return out;
  };
}

}  // namespace moto
