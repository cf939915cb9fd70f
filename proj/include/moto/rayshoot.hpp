#pragma once

#include <map>
#include <memory>
#include <set>
#include <vector>

#include "moto/geom.hpp"

namespace moto {

// Segment owners: rider tracks use the (positive) rider id, wall k uses -1-k.
inline int wall_owner(int wall_index) { return -1 - wall_index; }
inline bool is_wall_owner(int owner) { return owner < 0; }
inline int wall_index_of(int owner) { return -1 - owner; }

template <class S>
struct RayHit {
  S param;                  // along the query direction vector
  Point2<S> point;          // origin + param * dir (informational)
  std::vector<int> owners;  // every owner at the minimal parameter; riders
                            // ascending first, then walls
  int owner() const { return owners.front(); }
};

// Parameter at which ray (origin, dir) pierces segment [a,b], if it does so
// strictly ahead of the origin. Rays along the segment's own line miss:
// same-line interaction is resolved statically, never by shooting.
template <class S>
std::optional<S> ray_segment_param(const Point2<S>& origin, const Vector2<S>& dir,
                                   const Point2<S>& a, const Point2<S>& b) {
  if (a == b) return std::nullopt;
  Vector2<S> e = b - a;
  S den = cross(dir, e);
  S scale = (abs_of(dir.x) + abs_of(dir.y)) * (abs_of(e.x) + abs_of(e.y)) + S(1);
  if (is_zero(den / scale)) return std::nullopt;
  Vector2<S> w = a - origin;
  S t = cross(w, e) / den;
  S r = cross(w, dir) / den;
  if (t < S(0) || approx_eq(t, S(0))) return std::nullopt;
  bool r_ok = (S(0) <= r && r <= S(1)) || approx_eq(r, S(0)) || approx_eq(r, S(1));
  if (!r_ok) return std::nullopt;
  return t;
}

inline bool owner_before(int x, int y) {
  bool rx = x > 0, ry = y > 0;
  if (rx != ry) return rx;  // riders beat walls
  return rx ? x < y : x > y;
}

template <class S>
class RayShooter {
 public:
  virtual ~RayShooter() = default;
  virtual void insert(int owner, const Point2<S>& a, const Point2<S>& b) = 0;
  // Replaces the far endpoint of an existing segment.
  virtual void update(int owner, const Point2<S>& b) = 0;
  virtual void remove(int owner) = 0;
  // `through`, when given, collects owners of non-degenerate segments that
  // pass exactly through the origin (which a ray can never report as a hit).
  virtual std::optional<RayHit<S>> shoot(const Point2<S>& origin, const Vector2<S>& dir,
                                         int exclude_owner,
                                         std::vector<int>* through = nullptr) = 0;
  long queries = 0;

 protected:
  static void check_removable(int owner) {
    if (is_wall_owner(owner)) throw ContractViolation("walls are permanent");
  }
};

namespace detail {

// Accumulates the best (nearest) hit, merging owners at parameter ties.
template <class S>
struct HitAccum {
  bool have = false;
  S best{};
  std::vector<int> owners;

  void offer(int owner, const S& t) {
    if (!have || (t < best && !approx_eq(t, best))) {
      have = true;
      best = t;
      owners.assign(1, owner);
      return;
    }
    if (approx_eq(t, best)) {
      if (t < best) best = t;
      for (int o : owners)
        if (o == owner) return;
      owners.push_back(owner);
    }
  }

  std::optional<RayHit<S>> finish(const Point2<S>& origin, const Vector2<S>& dir) {
    if (!have) return std::nullopt;
    std::sort(owners.begin(), owners.end(), owner_before);
    return RayHit<S>{best, origin + best * dir, owners};
  }
};

}  // namespace detail

// Exhaustive scan over every stored segment.
template <class S>
class LinearShooter : public RayShooter<S> {
 public:
  void insert(int owner, const Point2<S>& a, const Point2<S>& b) override {
    segs_[owner] = {a, b};
  }
  void update(int owner, const Point2<S>& b) override { segs_.at(owner).second = b; }
  void remove(int owner) override {
    this->check_removable(owner);
    segs_.erase(owner);
  }

  std::optional<RayHit<S>> shoot(const Point2<S>& origin, const Vector2<S>& dir,
                                 int exclude_owner, std::vector<int>* through = nullptr) override {
    ++this->queries;
    detail::HitAccum<S> acc;
    for (const auto& [owner, seg] : segs_) {
      if (owner == exclude_owner) continue;
      if (through && seg.first != seg.second && on_segment(origin, seg.first, seg.second))
        through->push_back(owner);
      auto t = ray_segment_param(origin, dir, seg.first, seg.second);
      if (t) acc.offer(owner, *t);
    }
    return acc.finish(origin, dir);
  }

 private:
  std::map<int, std::pair<Point2<S>, Point2<S>>> segs_;
};

// Uniform grid of ceil(sqrt(N))^2 cells over the instance's bounding box.
// Cell membership is conservative: segments are registered in every cell they
// touch, including all cells adjacent to exact boundary contacts, so a walk
// along the query ray cannot pass a registered segment unseen.
template <class S>
class GridShooter : public RayShooter<S> {
 public:
  explicit GridShooter(const Instance<S>& inst) {
    bool first = true;
    auto grow = [&](const Point2<S>& p) {
      if (first) {
        box_ = {p, p};
        first = false;
      } else {
        box_.grow(p);
      }
    };
    size_t nsegs = inst.riders.size() + inst.walls.size();
    for (const auto& m : inst.riders) {
      grow(m.s);
      if (m.d) grow(*m.d);
    }
    for (const auto& w : inst.walls) {
      grow(w.a);
      grow(w.b);
    }
    if (first) box_ = {{S(0), S(0)}, {S(1), S(1)}};
    // Avoid zero-width cells for degenerate extents.
    if (!(box_.lo.x < box_.hi.x)) box_.hi.x = box_.lo.x + S(1);
    if (!(box_.lo.y < box_.hi.y)) box_.hi.y = box_.lo.y + S(1);
    g_ = 1;
    while (static_cast<size_t>(g_) * static_cast<size_t>(g_) < nsegs) ++g_;
    cw_ = (box_.hi.x - box_.lo.x) / S(g_);
    ch_ = (box_.hi.y - box_.lo.y) / S(g_);
    cells_.assign(static_cast<size_t>(g_) * static_cast<size_t>(g_), {});
  }

  void insert(int owner, const Point2<S>& a, const Point2<S>& b) override {
    segs_[owner] = {a, b};
    register_owner(owner);
  }

  void update(int owner, const Point2<S>& b) override {
    unregister_owner(owner);
    segs_.at(owner).second = b;
    register_owner(owner);
  }

  void remove(int owner) override {
    this->check_removable(owner);
    auto it = segs_.find(owner);
    if (it == segs_.end()) return;
    unregister_owner(owner);
    segs_.erase(it);
  }

  std::optional<RayHit<S>> shoot(const Point2<S>& origin, const Vector2<S>& dir,
                                 int exclude_owner, std::vector<int>* through = nullptr) override {
    ++this->queries;
    if (is_zero(dir.x) && is_zero(dir.y)) throw DomainError("ray with zero direction");
    detail::HitAccum<S> acc;
    // Segments that leave the box (spawned riders) live outside the grid and
    // are scanned exhaustively, as is everything when the origin is outside.
    for (int owner : overflow_) offer_seg(owner, origin, dir, exclude_owner, acc, through);
    if (!inside(origin)) {
      for (const auto& [owner, seg] : segs_)
        offer_seg(owner, origin, dir, exclude_owner, acc, through);
      return acc.finish(origin, dir);
    }
    long cx = clampg(floor_div(origin.x - box_.lo.x, cw_));
    long cy = clampg(floor_div(origin.y - box_.lo.y, ch_));
    if (through) {
      // Conservative cell marking guarantees any segment through the origin
      // is registered in the origin's cell.
      for (int owner : cells_[cell_index(cx, cy)]) {
        if (owner == exclude_owner) continue;
        const auto& seg = segs_.at(owner);
        if (seg.first != seg.second && on_segment(origin, seg.first, seg.second))
          through->push_back(owner);
      }
    }
    long sx = is_zero(dir.x) ? 0 : (dir.x > S(0) ? 1 : -1);
    long sy = is_zero(dir.y) ? 0 : (dir.y > S(0) ? 1 : -1);
    // Parameter at which the ray crosses the next cell boundary per axis.
    auto boundary_param_x = [&](long cell) -> S {
      S bx = box_.lo.x + S(sx > 0 ? cell + 1 : cell) * cw_;
      return (bx - origin.x) / dir.x;
    };
    auto boundary_param_y = [&](long cell) -> S {
      S by = box_.lo.y + S(sy > 0 ? cell + 1 : cell) * ch_;
      return (by - origin.y) / dir.y;
    };
    for (long step = 0; step <= 4 * g_ + 8; ++step) {
      scan_cell(cx, cy, origin, dir, exclude_owner, acc);
      bool hx = sx != 0, hy = sy != 0;
      S tx = hx ? boundary_param_x(cx) : S(0);
      S ty = hy ? boundary_param_y(cy) : S(0);
      S t_exit = hx && hy ? (tx < ty ? tx : ty) : (hx ? tx : ty);
      if (acc.have && (acc.best < t_exit || approx_eq(acc.best, t_exit)))
        return acc.finish(origin, dir);
      bool step_x = false, step_y = false;
      if (hx && hy) {
        if (approx_eq(tx, ty)) {
          step_x = step_y = true;  // exact corner: diagonal step
        } else if (tx < ty) {
          step_x = true;
        } else {
          step_y = true;
        }
      } else if (hx) {
        step_x = true;
      } else {
        step_y = true;
      }
      if (step_x) cx += sx;
      if (step_y) cy += sy;
      if (cx < 0 || cx >= g_ || cy < 0 || cy >= g_) return acc.finish(origin, dir);
    }
    throw ContractViolation("grid walk failed to terminate");
  }

 private:
  BBox<S> box_;
  long g_ = 1;
  S cw_{}, ch_{};
  std::vector<std::vector<int>> cells_;
  std::map<int, std::pair<Point2<S>, Point2<S>>> segs_;
  std::set<int> overflow_;

  bool inside(const Point2<S>& p) const {
    return !(p.x < box_.lo.x) && !(box_.hi.x < p.x) && !(p.y < box_.lo.y) && !(box_.hi.y < p.y);
  }

  void register_owner(int owner) {
    const auto& seg = segs_.at(owner);
    if (inside(seg.first) && inside(seg.second)) {
      for (long c : segment_cells(seg.first, seg.second)) add_to_cell(c, owner);
    } else {
      overflow_.insert(owner);
    }
  }

  void unregister_owner(int owner) {
    if (overflow_.erase(owner)) return;
    const auto& seg = segs_.at(owner);
    for (long c : segment_cells(seg.first, seg.second)) drop_from_cell(c, owner);
  }

  void offer_seg(int owner, const Point2<S>& origin, const Vector2<S>& dir, int exclude_owner,
                 detail::HitAccum<S>& acc, std::vector<int>* through) const {
    if (owner == exclude_owner) return;
    const auto& seg = segs_.at(owner);
    if (through && seg.first != seg.second && on_segment(origin, seg.first, seg.second))
      through->push_back(owner);
    auto t = ray_segment_param(origin, dir, seg.first, seg.second);
    if (t) acc.offer(owner, *t);
  }

  long clampg(long v) const { return v < 0 ? 0 : (v >= g_ ? g_ - 1 : v); }
  size_t cell_index(long cx, long cy) const {
    return static_cast<size_t>(cy) * static_cast<size_t>(g_) + static_cast<size_t>(cx);
  }
  void add_to_cell(long c, int owner) { cells_[static_cast<size_t>(c)].push_back(owner); }
  void drop_from_cell(long c, int owner) {
    auto& v = cells_[static_cast<size_t>(c)];
    v.erase(std::remove(v.begin(), v.end(), owner), v.end());
  }

  void scan_cell(long cx, long cy, const Point2<S>& origin, const Vector2<S>& dir,
                 int exclude_owner, detail::HitAccum<S>& acc) {
    for (int owner : cells_[cell_index(cx, cy)]) {
      if (owner == exclude_owner) continue;
      const auto& seg = segs_.at(owner);
      auto t = ray_segment_param(origin, dir, seg.first, seg.second);
      if (t) acc.offer(owner, *t);
    }
  }

  // Grid coordinates (possibly on a boundary) of p along one axis: the cell
  // index and whether p sits exactly on the lower edge of that cell.
  std::pair<long, bool> axis_cell(const S& x, const S& lo, const S& cw) const {
    S r = (x - lo) / cw;
    long fl = floor_div(x - lo, cw);
    return {fl, r == S(fl)};
  }

  void mark_point_cells(const Point2<S>& p, std::vector<long>& out) const {
    auto [gx, bx] = axis_cell(p.x, box_.lo.x, cw_);
    auto [gy, by] = axis_cell(p.y, box_.lo.y, ch_);
    // Boundary contacts touch both adjacent cells; contacts on the box edge
    // simply have fewer in-range neighbors.
    auto in_axis = [&](long c) { return c >= 0 && c < g_; };
    std::vector<long> xs, ys;
    for (long dx : bx ? std::vector<long>{-1, 0} : std::vector<long>{0})
      if (in_axis(gx + dx)) xs.push_back(gx + dx);
    for (long dy : by ? std::vector<long>{-1, 0} : std::vector<long>{0})
      if (in_axis(gy + dy)) ys.push_back(gy + dy);
    if (xs.empty() || ys.empty())
      throw ContractViolation("segment outside the grid's bounding box");
    for (long cx : xs)
      for (long cy : ys) out.push_back(static_cast<long>(cell_index(cx, cy)));
  }

  std::vector<long> segment_cells(const Point2<S>& a, const Point2<S>& b) const {
    std::vector<long> out;
    if (a == b) return out;
    Vector2<S> u = b - a;
    // Split [0,1] at every boundary crossing; each open piece lies in one
    // cell, and every split point contributes all cells it touches.
    std::vector<S> ts{S(0), S(1)};
    auto add_axis = [&](const S& a0, const S& du, const S& lo, const S& cw) {
      if (is_zero(du)) return;
      long c0 = floor_div(a0 - lo, cw), c1 = floor_div(a0 + du - lo, cw);
      long from = std::min(c0, c1), to = std::max(c0, c1);
      for (long k = from; k <= to + 1; ++k) {
        S t = (lo + S(k) * cw - a0) / du;
        if (S(0) < t && t < S(1)) ts.push_back(t);
      }
    };
    add_axis(a.x, u.x, box_.lo.x, cw_);
    add_axis(a.y, u.y, box_.lo.y, ch_);
    std::sort(ts.begin(), ts.end());
    for (size_t k = 0; k + 1 < ts.size(); ++k) {
      if (!(ts[k] < ts[k + 1])) continue;
      S mid = (ts[k] + ts[k + 1]) / S(2);
      Point2<S> pm = a + mid * u;
      long cx = clampg(floor_div(pm.x - box_.lo.x, cw_));
      long cy = clampg(floor_div(pm.y - box_.lo.y, ch_));
      out.push_back(static_cast<long>(cell_index(cx, cy)));
    }
    for (const S& t : ts) mark_point_cells(a + t * u, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

enum class ShooterKind { Linear, Grid };

inline const char* shooter_name(ShooterKind k) {
  return k == ShooterKind::Linear ? "linear" : "grid";
}

inline ShooterKind shooter_from(const std::string& s) {
  if (s == "linear") return ShooterKind::Linear;
  if (s == "grid") return ShooterKind::Grid;
  throw InvalidInput("unknown shooter '" + s + "'");
}

template <class S>
std::unique_ptr<RayShooter<S>> make_shooter(ShooterKind kind, const Instance<S>& inst) {
  if (kind == ShooterKind::Linear) return std::make_unique<LinearShooter<S>>();
  return std::make_unique<GridShooter<S>>(inst);
}

}  // namespace moto
