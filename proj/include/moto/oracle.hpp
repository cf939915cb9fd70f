#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "moto/result.hpp"

namespace moto {

// Reference engine: chronological sweep over all pairwise interaction points.
// Quadratic work, no spatial structures, no target stacks — it settles every
// candidate strictly in time order, so its verdicts follow directly from the
// crash definition: a rider dies at the first point of its path that some
// other rider's final track covers no later than the rider arrives, with
// simultaneous arrivals crashing mutually.
template <class S>
class BruteOracle {
 public:
  explicit BruteOracle(Instance<S> inst, SpawnPolicy<S> spawn = {})
      : inst_(std::move(inst)), spawn_(std::move(spawn)) {}

  MGResult<S> run() {
    const size_t n0 = inst_.riders.size();
    for (const auto& m : inst_.riders)
      if (!m.d) throw ContractViolation("oracle needs finite destinations");
    state_.assign(n0, {});
    for (size_t i = 0; i < n0; ++i)
      for (size_t j = i + 1; j < n0; ++j) add_pair_candidates(static_cast<int>(i + 1), static_cast<int>(j + 1), S(0));

    while (!queue_.empty()) {
      // Group simultaneous candidates, then split the group by location;
      // buckets at the same instant but different points are independent.
      S tnow = queue_.begin()->t;
      std::vector<Cand> group;
      while (!queue_.empty() && approx_eq(queue_.begin()->t, tnow)) {
        group.push_back(*queue_.begin());
        queue_.erase(queue_.begin());
      }
      std::vector<std::vector<Cand>> buckets;
      for (const auto& c : group) {
        bool placed = false;
        for (auto& b : buckets)
          if (approx_eq(b.front().p, c.p)) {
            b.push_back(c);
            placed = true;
            break;
          }
        if (!placed) buckets.push_back({c});
      }
      // Settle in increasing order of the largest arriving id: spawned ids
      // then come out identical to an event queue keyed by (time, id), whose
      // pair completes at the larger partner id. Same-instant buckets are at
      // distinct points, so a rider arrives in at most one of them and the
      // order cannot change any verdict, only child numbering.
      std::vector<std::pair<int, size_t>> order;
      for (size_t k = 0; k < buckets.size(); ++k) {
        int hi = 0;
        for (const auto& m : inst_.riders)
          if (arriving(m.id, buckets[k].front().p, tnow)) hi = std::max(hi, m.id);
        order.push_back({hi, k});
      }
      std::sort(order.begin(), order.end());
      for (const auto& [hi, k] : order) settle(buckets[k].front().p, tnow);
    }

    MGResult<S> out;
    out.riders = inst_.riders;
    for (size_t k = 0; k < inst_.riders.size(); ++k) {
      const auto& m = inst_.riders[k];
      RState& st = state_[k];
      if (!st.ended) {
        st.ended = true;
        st.kappa = *m.d;
        st.t_end = tau(m, *m.d);
        st.out = {stop_outcome(m.dest_kind), 0};
      }
      out.records.push_back({m.id, st.kappa, st.t_end, st.out});
    }
    return out;
  }

 private:
  struct RState {
    bool ended = false;
    Point2<S> kappa;
    S t_end{};
    Outcome out{};
  };
  struct Cand {
    S t;
    int victim;
    Point2<S> p;
  };
  struct CandLess {
    bool operator()(const Cand& a, const Cand& b) const {
      if (a.t < b.t) return true;
      if (b.t < a.t) return false;
      if (a.victim != b.victim) return a.victim < b.victim;
      return PointLess<S>{}(a.p, b.p);
    }
  };

  Instance<S> inst_;
  SpawnPolicy<S> spawn_;
  std::vector<RState> state_;
  std::multiset<Cand, CandLess> queue_;

  const Motorcycle<S>& rider(int id) const { return inst_.riders[static_cast<size_t>(id - 1)]; }
  RState& st(int id) { return state_[static_cast<size_t>(id - 1)]; }

  static bool strictly_less(const S& a, const S& b) { return a < b && !approx_eq(a, b); }
  static bool leq(const S& a, const S& b) { return a < b || approx_eq(a, b); }

  // p lies on j's realized track (up to kappa once ended, the destination
  // otherwise) and j gets there by time t.
  bool covers(int j, const Point2<S>& p, const S& t) const {
    const auto& m = rider(j);
    auto lam = ray_param(m, p);
    if (!lam) return false;
    const RState& sj = state_[static_cast<size_t>(j - 1)];
    S cap = sj.ended ? *ray_param(m, sj.kappa) : *ray_param(m, *m.d);
    if (!leq(*lam, cap)) return false;
    return leq(m.t0 + *lam, t);
  }

  // i is alive and reaches p at exactly t, strictly past its start.
  bool arriving(int i, const Point2<S>& p, const S& t) const {
    if (state_[static_cast<size_t>(i - 1)].ended) return false;
    const auto& m = rider(i);
    auto lam = ray_param(m, p);
    if (!lam) return false;
    if (approx_eq(*lam, S(0))) return false;
    if (!leq(*lam, *ray_param(m, *m.d))) return false;
    return approx_eq(m.t0 + *lam, t);
  }

  void push(const S& t, int victim, const Point2<S>& p) { queue_.insert({t, victim, p}); }

  // Candidate arrival of `victim` at p, admitted when p is strictly ahead on
  // its remaining path and not earlier than tmin.
  void try_candidate(int victim, const Point2<S>& p, const S& tmin) {
    const auto& m = rider(victim);
    auto lam = ray_param(m, p);
    if (!lam || approx_eq(*lam, S(0))) return;
    if (!leq(*lam, *ray_param(m, *m.d))) return;
    S t = m.t0 + *lam;
    if (!leq(tmin, t)) return;
    push(t, victim, p);
  }

  void add_pair_candidates(int i, int j, const S& tmin) {
    const auto& mi = rider(i);
    const auto& mj = rider(j);
    auto isect = canonical_crossing(mi, mj);
    if (isect.kind == LineRelation::Proper) {
      try_candidate(i, isect.point, tmin);
      try_candidate(j, isect.point, tmin);
      return;
    }
    if (isect.kind != LineRelation::Collinear) return;
    // Shared supporting line: start footprints, destination fronts, and the
    // simultaneous-position solution all matter.
    try_candidate(i, mj.s, tmin);
    try_candidate(j, mi.s, tmin);
    try_candidate(i, *mj.d, tmin);
    try_candidate(j, *mi.d, tmin);
    S vv = dot(mj.v, mj.v);
    S a = dot(mi.s - mj.s, mj.v) / vv;
    S b = dot(mi.v, mj.v) / vv;
    S one_minus_b = S(1) - b;
    if (!is_zero(one_minus_b)) {
      S lam_i = (mj.t0 + a - mi.t0) / one_minus_b;
      Point2<S> meet = mi.s + lam_i * mi.v;
      try_candidate(i, meet, tmin);
      try_candidate(j, meet, tmin);
    }
  }

  void settle(const Point2<S>& p, const S& t) {
    std::vector<int> arrivers;
    for (const auto& m : inst_.riders)
      if (arriving(m.id, p, t)) arrivers.push_back(m.id);
    if (arrivers.empty()) return;

    bool have_strict = false;
    S best_t{};
    int best_id = 0;
    for (const auto& m : inst_.riders) {
      if (!covers(m.id, p, t)) continue;
      S tj = m.t0 + *ray_param(m, p);
      if (!strictly_less(tj, t)) continue;
      if (!have_strict || strictly_less(tj, best_t) || (approx_eq(tj, best_t) && m.id < best_id)) {
        have_strict = true;
        best_t = tj;
        best_id = m.id;
      }
    }

    std::vector<int> dead;
    if (have_strict) {
      for (int i : arrivers) kill(i, p, t, best_id), dead.push_back(i);
    } else if (arrivers.size() >= 2) {
      for (int i : arrivers) {
        int blocker = 0;
        for (int j : arrivers)
          if (j != i && (blocker == 0 || j < blocker)) blocker = j;
        kill(i, p, t, blocker);
        dead.push_back(i);
      }
      if (spawn_) {
        if (arrivers.size() != 2)
          throw DomainError("more than two simultaneous crashers with an active spawn policy");
        do_spawn(p, t, arrivers[0], arrivers[1]);
      }
    } else {
      int i = arrivers[0];
      const auto& m = rider(i);
      if (approx_eq(p, *m.d)) {
        RState& si = st(i);
        si.ended = true;
        si.kappa = *m.d;
        si.t_end = t;
        si.out = {stop_outcome(m.dest_kind), 0};
      }
      return;
    }

    // A freshly frozen track end becomes an entry point for same-line riders
    // approaching from beyond it.
    for (int j : dead)
      for (const auto& r : inst_.riders) {
        if (r.id == j || st(r.id).ended) continue;
        if (line_intersection(rider(j), r).kind != LineRelation::Collinear) continue;
        try_candidate(r.id, p, t);
      }
  }

  void kill(int i, const Point2<S>& p, const S& t, int blocker) {
    RState& si = st(i);
    si.ended = true;
    si.kappa = p;
    si.t_end = t;
    si.out = {OutcomeKind::Crashed, blocker};
  }

  void do_spawn(const Point2<S>& p, const S& t, int ia, int ib) {
    auto children = spawn_(p, t, rider(ia), rider(ib));
    if (children.empty()) return;
    if (children.size() > 1) throw DomainError("spawn policy returned more than one rider");
    Motorcycle<S> c = children.front();
    c.id = static_cast<int>(inst_.riders.size()) + 1;
    c.s = p;
    c.t0 = t;
    if (is_zero(c.v.x) && is_zero(c.v.y)) throw DomainError("spawned rider has zero velocity");
    if (!c.d) throw DomainError("spawned rider needs a finite destination");
    if (!ray_param(c, *c.d)) throw DomainError("spawned destination not on the forward ray");
    for (const auto& other : inst_.riders)
      if (line_intersection(c, other).kind == LineRelation::Collinear)
        throw DomainError("spawned rider shares a supporting line with an existing rider");
    inst_.riders.push_back(c);
    state_.push_back({});
    for (const auto& other : inst_.riders)
      if (other.id != c.id) add_pair_candidates(other.id, c.id, t);
  }
};

template <class S>
MGResult<S> oracle_solve(const Instance<S>& inst, SpawnPolicy<S> spawn = {}) {
  BruteOracle<S> o(inst, std::move(spawn));
  return o.run();
}

}  // namespace moto
