#pragma once

#include <map>
#include <memory>
#include <vector>

#include "moto/geom.hpp"

namespace moto {

enum class HalvingKind { Counting, Midpoint, COriented };

inline const char* halving_name(HalvingKind k) {
  switch (k) {
    case HalvingKind::Counting: return "counting";
    case HalvingKind::Midpoint: return "midpoint";
    case HalvingKind::COriented: return "coriented";
  }
  return "?";
}

inline HalvingKind halving_from(const std::string& s) {
  for (HalvingKind k : {HalvingKind::Counting, HalvingKind::Midpoint, HalvingKind::COriented})
    if (s == halving_name(k)) return k;
  throw InvalidInput("unknown halving '" + s + "'");
}

struct HalvingConfig {
  int bit_width = 32;
  // Induced runs use a far smaller length floor so vertex-spawned riders can
  // be split arbitrarily close to polygon features.
  bool induced_regime = false;
};

inline long min_length_exp(const HalvingConfig& c) {
  if (c.induced_regime) return -(64L * (80L * c.bit_width + 105L) + 1L);
  return -2L * c.bit_width + 1L;
}

template <class S>
S min_halving_len2(const HalvingConfig& c);

template <>
inline Rat min_halving_len2<Rat>(const HalvingConfig& c) {
  return rat_pow2(2 * min_length_exp(c));
}
template <>
inline double min_halving_len2<double>(const HalvingConfig& c) {
  long e = 2 * min_length_exp(c);
  if (e < -1074) return 0.0;  // underflows: the identity guards take over
  return std::ldexp(1.0, static_cast<int>(e));
}

// Picks a point strictly inside segment pq of rider's supporting line that is
// not a crossing point and splits the crossings in a bounded ratio. Returns
// nullopt when pq is shorter than the configured floor (nothing to split).
template <class S>
class HalvingStrategy {
 public:
  virtual ~HalvingStrategy() = default;
  virtual std::optional<Point2<S>> halve(int rider_id, const Point2<S>& p, const Point2<S>& q) = 0;
  virtual void on_rider_added(int) {}
  long queries = 0;
};

namespace detail {

// Parameter of x on segment p..q normalized so p=0, q=1.
template <class S>
S seg_param(const Point2<S>& p, const Point2<S>& q, const Point2<S>& x) {
  Vector2<S> u = q - p;
  return dot(x - p, u) / dot(u, u);
}

template <class S>
bool too_short(const Point2<S>& p, const Point2<S>& q, const HalvingConfig& cfg) {
  Vector2<S> u = q - p;
  return dot(u, u) < min_halving_len2<S>(cfg);
}

template <class S>
Point2<S> midpoint(const Point2<S>& a, const Point2<S>& b) {
  return {(a.x + b.x) / S(2), (a.y + b.y) / S(2)};
}

// Distinct parameters (p=0..q=1, closed) where other supporting lines cross
// rider's line, sorted ascending.
template <class S>
std::vector<S> crossing_params(const Instance<S>& inst, int rider_id, const Point2<S>& p,
                               const Point2<S>& q) {
  const auto& mi = inst.riders[static_cast<size_t>(rider_id - 1)];
  std::vector<S> out;
  for (const auto& mj : inst.riders) {
    if (mj.id == rider_id) continue;
    auto isect = canonical_crossing(mi, mj);
    if (isect.kind != LineRelation::Proper) continue;
    S t = seg_param(p, q, isect.point);
    bool inside = (S(0) < t && t < S(1)) || approx_eq(t, S(0)) || approx_eq(t, S(1));
    if (!inside) continue;
    bool dup = false;
    for (const auto& s : out)
      if (approx_eq(s, t)) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Ratio-1/2 rule driven by exhaustive crossing counting.
template <class S>
class CountingHalving : public HalvingStrategy<S> {
 public:
  CountingHalving(const Instance<S>* inst, HalvingConfig cfg) : inst_(inst), cfg_(cfg) {}

  std::optional<Point2<S>> halve(int rider_id, const Point2<S>& p, const Point2<S>& q) override {
    ++this->queries;
    if (detail::too_short(p, q, cfg_)) return std::nullopt;
    auto ts = detail::crossing_params(*inst_, rider_id, p, q);
    auto at = [&](const S& t) { return p + t * (q - p); };
    Point2<S> h;
    if (ts.size() >= 2) {
      size_t med = (ts.size() + 1) / 2 - 1;  // ceil(k/2)-th, 0-based
      h = at((ts[med] + ts[med + 1]) / S(2));
    } else if (ts.size() == 1 && !approx_eq(ts[0], S(0))) {
      h = at(ts[0] / S(2));
    } else {
      h = detail::midpoint(p, q);
    }
    if (approx_eq(h, p) || approx_eq(h, q)) return std::nullopt;
    return h;
  }

 private:
  const Instance<S>* inst_;
  HalvingConfig cfg_;
};

// Constant-time geometric rule: the Euclidean midpoint.
template <class S>
class MidpointHalving : public HalvingStrategy<S> {
 public:
  explicit MidpointHalving(HalvingConfig cfg) : cfg_(cfg) {}

  std::optional<Point2<S>> halve(int, const Point2<S>& p, const Point2<S>& q) override {
    ++this->queries;
    if (detail::too_short(p, q, cfg_)) return std::nullopt;
    Point2<S> h = detail::midpoint(p, q);
    if (approx_eq(h, p) || approx_eq(h, q)) return std::nullopt;
    return h;
  }

 private:
  HalvingConfig cfg_;
};

// Ratio-3/4 rule for inputs whose directions come from a fixed small set:
// per-direction intercept-sorted arrays admit binary-searched medians, giving
// O(C log n) per query instead of a linear scan.
template <class S>
class COrientedHalving : public HalvingStrategy<S> {
 public:
  COrientedHalving(const Instance<S>* inst, HalvingConfig cfg) : inst_(inst), cfg_(cfg) {
    for (const auto& m : inst_->riders) insert(m);
  }

  void on_rider_added(int id) override {
    insert(inst_->riders[static_cast<size_t>(id - 1)]);
  }

  std::optional<Point2<S>> halve(int rider_id, const Point2<S>& p, const Point2<S>& q) override {
    ++this->queries;
    if (detail::too_short(p, q, cfg_)) return std::nullopt;
    const auto& mi = inst_->riders[static_cast<size_t>(rider_id - 1)];
    DirKey own = dir_key(mi.v);
    Vector2<S> u = q - p;

    struct GroupCut {
      S med_param;
      long weight;
      const Group* g;
      S cp, nu;       // intercept at p and per-unit-param intercept delta
      bool ascending;  // param increases with intercept
      size_t lo, hi;   // index window [lo, hi)
    };
    std::vector<GroupCut> cuts;
    long total = 0;
    for (const auto& [key, g] : groups_) {
      if (key == own) continue;  // parallel or shared lines never cross properly
      S nu = g.nx * u.x + g.ny * u.y;
      if (is_zero(nu / (abs_of(nu) + S(1)))) continue;
      S cp = g.nx * p.x + g.ny * p.y;
      S cq = g.nx * q.x + g.ny * q.y;
      bool asc = cp < cq;
      S clo = asc ? cp : cq, chi = asc ? cq : cp;
      auto first = std::lower_bound(g.intercepts.begin(), g.intercepts.end(), clo);
      auto last = std::upper_bound(g.intercepts.begin(), g.intercepts.end(), chi);
      long w = static_cast<long>(last - first);
      if (w <= 0) continue;
      size_t lo = static_cast<size_t>(first - g.intercepts.begin());
      size_t hi = static_cast<size_t>(last - g.intercepts.begin());
      // Lower median in path order.
      size_t med_idx = asc ? lo + static_cast<size_t>((w - 1) / 2)
                           : hi - 1 - static_cast<size_t>((w - 1) / 2);
      S med_param = (g.intercepts[med_idx] - cp) / nu;
      cuts.push_back({med_param, w, &g, cp, nu, asc, lo, hi});
      total += w;
    }
    auto at = [&](const S& t) { return p + t * u; };
    if (cuts.empty()) {
      Point2<S> h = detail::midpoint(p, q);
      if (approx_eq(h, p) || approx_eq(h, q)) return std::nullopt;
      return h;
    }
    std::sort(cuts.begin(), cuts.end(),
              [](const GroupCut& a, const GroupCut& b) { return a.med_param < b.med_param; });
    long cum = 0;
    S mstar{};
    for (const auto& c : cuts) {
      cum += c.weight;
      if (2 * cum >= total) {
        mstar = c.med_param;
        break;
      }
    }
    // Crossing parameters adjacent to the weighted median, over all groups.
    bool have_next = false, have_prev = false;
    S next{}, prev{};
    auto strictly = [](const S& a, const S& b) { return a < b && !approx_eq(a, b); };
    for (const auto& c : cuts) {
      S cm = c.cp + mstar * c.nu;
      const auto* base = c.g->intercepts.data();
      auto consider = [&](size_t idx) {
        S t = (base[idx] - c.cp) / c.nu;
        if (strictly(mstar, t)) {
          if (!have_next || t < next) next = t, have_next = true;
        } else if (strictly(t, mstar)) {
          if (!have_prev || prev < t) prev = t, have_prev = true;
        }
      };
      auto ge = std::lower_bound(base + c.lo, base + c.hi, cm) - base;
      // Neighbors on both sides of cm in intercept order cover both path
      // directions; the strictness filter sorts out which is which.
      for (long d : {-1L, 0L, 1L}) {
        long idx = static_cast<long>(ge) + d;
        if (idx >= static_cast<long>(c.lo) && idx < static_cast<long>(c.hi))
          consider(static_cast<size_t>(idx));
      }
    }
    S hpar;
    if (have_next)
      hpar = (mstar + next) / S(2);
    else if (strictly(mstar, S(1)))
      hpar = (mstar + S(1)) / S(2);
    else if (have_prev)
      hpar = (prev + mstar) / S(2);
    else
      hpar = S(1) / S(2);
    Point2<S> h = at(hpar);
    if (approx_eq(h, p) || approx_eq(h, q)) return std::nullopt;
    return h;
  }

 private:
  using DirKey = DirectionKey;
  struct Group {
    S nx{}, ny{};  // normal to the shared direction
    std::vector<S> intercepts;  // n . s, sorted
  };

  static DirKey dir_key(const Vector2<S>& v) { return canonical_direction(v); }

  void insert(const Motorcycle<S>& m) {
    DirKey key = dir_key(m.v);
    auto& g = groups_[key];
    if (g.intercepts.empty()) {
      // Normal (-b, a) of the canonical integer direction (a, b).
      g.nx = S(0) - static_cast<S>(key.second.get_d());
      g.ny = static_cast<S>(key.first.get_d());
      if constexpr (std::is_same_v<S, Rat>) {
        g.nx = Rat(-key.second);
        g.ny = Rat(key.first);
      }
    }
    S c = g.nx * m.s.x + g.ny * m.s.y;
    g.intercepts.insert(std::lower_bound(g.intercepts.begin(), g.intercepts.end(), c), c);
  }

  const Instance<S>* inst_;
  HalvingConfig cfg_;
  std::map<DirKey, Group> groups_;
};

template <class S>
std::unique_ptr<HalvingStrategy<S>> make_halving(HalvingKind kind, const Instance<S>* inst,
                                                 HalvingConfig cfg) {
  switch (kind) {
    case HalvingKind::Counting: return std::make_unique<CountingHalving<S>>(inst, cfg);
    case HalvingKind::Midpoint: return std::make_unique<MidpointHalving<S>>(cfg);
    case HalvingKind::COriented: return std::make_unique<COrientedHalving<S>>(inst, cfg);
  }
  throw InvalidInput("unknown halving kind");
}

}  // namespace moto
