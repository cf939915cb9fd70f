#pragma once

#include <algorithm>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "moto/scalar.hpp"

namespace moto {

template <class S>
struct Vector2 {
  S x{}, y{};
};

template <class S>
struct Point2 {
  S x{}, y{};

  friend bool operator==(const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const Point2& a, const Point2& b) { return !(a == b); }
};

// Strict ordering for dictionary keys. Shared points are always produced by
// one canonical computation, so exact comparison is safe on both backends.
template <class S>
struct PointLess {
  bool operator()(const Point2<S>& a, const Point2<S>& b) const {
    if (a.x < b.x) return true;
    if (b.x < a.x) return false;
    return a.y < b.y;
  }
};

template <class S>
Vector2<S> operator-(const Point2<S>& a, const Point2<S>& b) {
  return {a.x - b.x, a.y - b.y};
}
template <class S>
Point2<S> operator+(const Point2<S>& p, const Vector2<S>& v) {
  return {p.x + v.x, p.y + v.y};
}
template <class S>
Vector2<S> operator+(const Vector2<S>& a, const Vector2<S>& b) {
  return {a.x + b.x, a.y + b.y};
}
template <class S>
Vector2<S> operator-(const Vector2<S>& v) {
  return {-v.x, -v.y};
}
template <class S>
Vector2<S> operator*(const S& k, const Vector2<S>& v) {
  return {k * v.x, k * v.y};
}

template <class S>
S cross(const Vector2<S>& a, const Vector2<S>& b) {
  return a.x * b.y - a.y * b.x;
}
template <class S>
S dot(const Vector2<S>& a, const Vector2<S>& b) {
  return a.x * b.x + a.y * b.y;
}

template <class S>
bool approx_eq(const Point2<S>& a, const Point2<S>& b) {
  return approx_eq(a.x, b.x) && approx_eq(a.y, b.y);
}

enum class DestKind { Given, Boxed, Wall };

enum class Backend { Exact, Float };

template <class S>
struct Motorcycle {
  int id = 0;
  Point2<S> s;
  Vector2<S> v;
  std::optional<Point2<S>> d;  // absent = rides to infinity until synthesized
  S t0{};
  DestKind dest_kind = DestKind::Given;
  // Defining boundary edge ids (indices into Instance::walls), set for riders
  // born from reflex vertices or vertex merges; drives spawn construction.
  std::optional<std::pair<int, int>> edges;
};

template <class S>
struct Wall {
  Point2<S> a, b;
};

template <class S>
struct Instance {
  std::vector<Motorcycle<S>> riders;  // riders[k].id == k + 1
  std::vector<Wall<S>> walls;
  int bit_width = 32;
  Backend numeric = Backend::Exact;
};

// Parameter of p along the ray (m.s, m.v): p = s + lambda * v. Returns nullopt
// when p is off the supporting line or strictly behind s (beyond tolerance).
template <class S>
std::optional<S> ray_param(const Motorcycle<S>& m, const Point2<S>& p) {
  Vector2<S> w = p - m.s;
  S lam;
  if (abs_of(m.v.x) >= abs_of(m.v.y)) {
    if (is_zero(m.v.x)) return std::nullopt;
    lam = w.x / m.v.x;
  } else {
    lam = w.y / m.v.y;
  }
  Point2<S> back = m.s + lam * m.v;
  if (!approx_eq(back, p)) return std::nullopt;
  if (lam < S(0) && !approx_eq(lam, S(0))) return std::nullopt;
  if (lam < S(0)) lam = S(0);
  return lam;
}

// Arrival time of m at on-ray point p: t0 plus the ray parameter, which equals
// t0 + ||p - s|| / ||v||.
template <class S>
S tau(const Motorcycle<S>& m, const Point2<S>& p) {
  auto lam = ray_param(m, p);
  if (!lam) throw DomainError("tau: point not on the forward ray");
  return m.t0 + *lam;
}

enum class LineRelation { Proper, Parallel, Collinear };

template <class S>
struct LineIntersection {
  LineRelation kind;
  Point2<S> point;  // valid for Proper only
};

template <class S>
LineIntersection<S> line_intersection(const Motorcycle<S>& mi, const Motorcycle<S>& mj) {
  S den = cross(mi.v, mj.v);
  S scale = (abs_of(mi.v.x) + abs_of(mi.v.y)) * (abs_of(mj.v.x) + abs_of(mj.v.y));
  if (is_zero(den / scale)) {
    Vector2<S> w = mj.s - mi.s;
    S off = cross(w, mi.v);
    S wscale = (abs_of(w.x) + abs_of(w.y) + S(1)) * (abs_of(mi.v.x) + abs_of(mi.v.y));
    if (is_zero(off / wscale)) return {LineRelation::Collinear, {}};
    return {LineRelation::Parallel, {}};
  }
  S t = cross(mj.s - mi.s, mj.v) / den;
  return {LineRelation::Proper, mi.s + t * mi.v};
}

// Crossing point computed in id-sorted argument order so both riders obtain
// the bitwise-identical point on the float backend.
template <class S>
LineIntersection<S> canonical_crossing(const Motorcycle<S>& a, const Motorcycle<S>& b) {
  if (a.id <= b.id) return line_intersection(a, b);
  return line_intersection(b, a);
}

// Number of distinct crossing points of other supporting lines with l_i inside
// the closed segment pq. p and q must lie on l_i.
template <class S>
int segment_size(const Instance<S>& inst, int rider_id, const Point2<S>& p, const Point2<S>& q) {
  const Motorcycle<S>& mi = inst.riders.at(static_cast<size_t>(rider_id - 1));
  S ref;
  bool use_x = abs_of(mi.v.x) >= abs_of(mi.v.y);
  auto param_of = [&](const Point2<S>& pt) { return use_x ? pt.x : pt.y; };
  S lo = param_of(p), hi = param_of(q);
  if (hi < lo) std::swap(lo, hi);
  std::vector<S> seen;
  int count = 0;
  for (const auto& mj : inst.riders) {
    if (mj.id == rider_id) continue;
    auto isect = canonical_crossing(mi, mj);
    if (isect.kind != LineRelation::Proper) continue;
    S t = param_of(isect.point);
    bool inside = (lo < t && t < hi) || approx_eq(t, lo) || approx_eq(t, hi);
    if (!inside) continue;
    bool dup = false;
    for (const auto& s : seen)
      if (approx_eq(s, t)) {
        dup = true;
        break;
      }
    if (dup) continue;
    seen.push_back(t);
    ++count;
  }
  (void)ref;
  return count;
}

template <class S>
struct BBox {
  Point2<S> lo, hi;
  void grow(const Point2<S>& p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
};

// Exit parameter of ray (s, v) through an axis-aligned box that contains s.
template <class S>
S ray_box_exit(const Point2<S>& s, const Vector2<S>& v, const BBox<S>& box) {
  bool have = false;
  S best{};
  auto consider = [&](const S& t) {
    if (t <= S(0)) return;
    if (!have || t < best) {
      best = t;
      have = true;
    }
  };
  if (!is_zero(v.x)) {
    consider((box.lo.x - s.x) / v.x);
    consider((box.hi.x - s.x) / v.x);
  }
  if (!is_zero(v.y)) {
    consider((box.lo.y - s.y) / v.y);
    consider((box.hi.y - s.y) / v.y);
  }
  if (!have) throw DomainError("ray does not leave the bounding box");
  return best;
}

// Replaces destination-at-infinity markers by exit points of a box that
// covers all starts, finite destinations, wall endpoints, and pairwise
// supporting-line crossings, inflated by a factor of two around its center.
template <class S>
void compute_bounding_destinations(Instance<S>& inst) {
  if (inst.riders.empty()) return;
  BBox<S> box{inst.riders[0].s, inst.riders[0].s};
  for (const auto& m : inst.riders) {
    box.grow(m.s);
    if (m.d) box.grow(*m.d);
  }
  for (const auto& w : inst.walls) {
    box.grow(w.a);
    box.grow(w.b);
  }
  for (size_t i = 0; i < inst.riders.size(); ++i)
    for (size_t j = i + 1; j < inst.riders.size(); ++j) {
      auto isect = line_intersection(inst.riders[i], inst.riders[j]);
      if (isect.kind == LineRelation::Proper) box.grow(isect.point);
    }
  S cx = (box.lo.x + box.hi.x) / S(2);
  S cy = (box.lo.y + box.hi.y) / S(2);
  S ex = box.hi.x - cx, ey = box.hi.y - cy;
  S unit(1);
  if (ex < unit) ex = unit;
  if (ey < unit) ey = unit;
  ex = S(2) * ex;
  ey = S(2) * ey;
  BBox<S> big{{cx - ex, cy - ey}, {cx + ex, cy + ey}};
  for (auto& m : inst.riders) {
    if (m.d) continue;
    S t = ray_box_exit(m.s, m.v, big);
    m.d = m.s + t * m.v;
    m.dest_kind = DestKind::Boxed;
  }
}

// Closed point-on-segment test used for wall clipping and containment checks.
template <class S>
bool on_segment(const Point2<S>& p, const Point2<S>& a, const Point2<S>& b) {
  Vector2<S> ab = b - a;
  Vector2<S> ap = p - a;
  S c = cross(ab, ap);
  S scale = (abs_of(ab.x) + abs_of(ab.y) + S(1)) * (abs_of(ap.x) + abs_of(ap.y) + S(1));
  if (!is_zero(c / scale)) return false;
  S t = dot(ap, ab);
  S len2 = dot(ab, ab);
  if (t < S(0) && !approx_eq(t / (len2 + S(1)), S(0))) return false;
  if (t > len2 && !approx_eq((t - len2) / (len2 + S(1)), S(0))) return false;
  return true;
}

// Intersection parameters of segment [a, a+u] with segment [c, c+w] in terms
// of the first segment's parameter; collinear overlaps report the entry point.
template <class S>
std::optional<S> segment_hit_param(const Point2<S>& a, const Vector2<S>& u, const Point2<S>& c,
                                   const Vector2<S>& w) {
  S den = cross(u, w);
  S scale = (abs_of(u.x) + abs_of(u.y)) * (abs_of(w.x) + abs_of(w.y)) + S(1);
  Vector2<S> ac = c - a;
  if (is_zero(den / scale)) {
    S off = cross(ac, u);
    S oscale = (abs_of(ac.x) + abs_of(ac.y) + S(1)) * (abs_of(u.x) + abs_of(u.y)) + S(1);
    if (!is_zero(off / oscale)) return std::nullopt;
    // Collinear: entry parameter of the other segment's span on [0,1].
    S uu = dot(u, u);
    S t0 = dot(ac, u) / uu;
    S t1 = dot((c + w) - a, u) / uu;
    if (t1 < t0) std::swap(t0, t1);
    if (t1 < S(0) || t0 > S(1)) {
      if (!approx_eq(t1, S(0)) && t1 < S(0)) return std::nullopt;
      if (!approx_eq(t0, S(1)) && t0 > S(1)) return std::nullopt;
    }
    S entry = t0 < S(0) ? S(0) : t0;
    return entry;
  }
  S t = cross(ac, w) / den;
  S r = cross(ac, u) / den;
  auto in01 = [&](const S& x) {
    return (S(0) <= x && x <= S(1)) || approx_eq(x, S(0)) || approx_eq(x, S(1));
  };
  if (!in01(t) || !in01(r)) return std::nullopt;
  return t;
}

// Truncates each destination to the nearest wall intersection strictly past
// the start. A start on a wall interior is rejected; wall endpoints (polygon
// vertices) are legitimate starts.
template <class S>
void clip_destinations_to_walls(Instance<S>& inst) {
  if (inst.walls.empty()) return;
  for (auto& m : inst.riders) {
    for (const auto& w : inst.walls) {
      if (on_segment(m.s, w.a, w.b) && !(approx_eq(m.s, w.a) || approx_eq(m.s, w.b)))
        throw DomainError("motorcycle starts on a wall interior");
    }
    if (!m.d) continue;
    Vector2<S> u = *m.d - m.s;
    if (is_zero(dot(u, u))) continue;
    bool clipped = false;
    S best{};
    for (const auto& w : inst.walls) {
      auto t = segment_hit_param(m.s, u, w.a, w.b - w.a);
      if (!t) continue;
      if (*t <= S(0) || approx_eq(*t, S(0))) continue;  // leaving own vertex
      if (!clipped || *t < best) {
        best = *t;
        clipped = true;
      }
    }
    if (clipped) {
      m.d = m.s + best * u;
      m.dest_kind = DestKind::Wall;
    }
  }
}

template <class S>
void validate_instance(const Instance<S>& inst) {
  for (size_t k = 0; k < inst.riders.size(); ++k) {
    const auto& m = inst.riders[k];
    if (m.id != static_cast<int>(k) + 1) throw InvalidInput("motorcycle ids must be 1..n in order");
    if (is_zero(m.v.x) && is_zero(m.v.y)) throw InvalidInput("zero velocity");
    if (m.t0 < S(0)) throw InvalidInput("negative start time");
    if (m.d && !ray_param(m, *m.d)) throw InvalidInput("destination not on the forward ray");
  }
  for (const auto& w : inst.walls)
    if (w.a == w.b) throw InvalidInput("degenerate wall");
}

// Reduced integer direction (a, b) with gcd 1 and a canonical sign, computed
// from exact rational images of the coordinates. Identical supporting-line
// directions map to the identical key on both backends.
using DirectionKey = std::pair<mpz_class, mpz_class>;

template <class S>
DirectionKey canonical_direction(const Vector2<S>& v) {
  Rat vx = rat_from_scalar(v.x), vy = rat_from_scalar(v.y);
  mpz_class a = vx.get_num() * vy.get_den();
  mpz_class b = vy.get_num() * vx.get_den();
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (g != 0) {
    a /= g;
    b /= g;
  }
  if (a < 0 || (a == 0 && b < 0)) {
    a = -a;
    b = -b;
  }
  return {a, b};
}

// Exact identifier of a supporting line: canonical direction plus the exact
// offset of the line along its normal. Two rays share a line iff keys match.
using LineKey = std::tuple<mpz_class, mpz_class, Rat>;

template <class S>
LineKey line_key(const Point2<S>& s, const Vector2<S>& v) {
  DirectionKey d = canonical_direction(v);
  Rat c = Rat(-d.second) * rat_from_scalar(s.x) + Rat(d.first) * rat_from_scalar(s.y);
  c.canonicalize();
  return {d.first, d.second, c};
}

template <class T, class S>
Point2<T> convert_point(const Point2<S>& p) {
  return {static_cast<T>(to_double(p.x)), static_cast<T>(to_double(p.y))};
}

template <class S>
Instance<double> to_float_instance(const Instance<S>& in) {
  Instance<double> out;
  out.bit_width = in.bit_width;
  out.numeric = Backend::Float;
  out.walls.reserve(in.walls.size());
  for (const auto& w : in.walls)
    out.walls.push_back({convert_point<double>(w.a), convert_point<double>(w.b)});
  out.riders.reserve(in.riders.size());
  for (const auto& m : in.riders) {
    Motorcycle<double> f;
    f.id = m.id;
    f.s = convert_point<double>(m.s);
    f.v = {to_double(m.v.x), to_double(m.v.y)};
    if (m.d) f.d = convert_point<double>(*m.d);
    f.t0 = to_double(m.t0);
    f.dest_kind = m.dest_kind;
    f.edges = m.edges;
    out.riders.push_back(f);
  }
  return out;
}

}  // namespace moto
