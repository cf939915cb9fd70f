#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "moto/halving.hpp"
#include "moto/rayshoot.hpp"
#include "moto/result.hpp"

namespace moto {

enum class TargetKind { StartPt, DestPt, CrossPt, HalvePt, MeetPt };

inline const char* target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::StartPt: return "start";
    case TargetKind::DestPt: return "dest";
    case TargetKind::CrossPt: return "cross";
    case TargetKind::HalvePt: return "halve";
    case TargetKind::MeetPt: return "meet";
  }
  return "?";
}

// A scheduled arrival point. Stacks stay sorted by ray parameter with the
// nearest target at the back; the back entry is the tentative track endpoint
// of a live rider.
template <class S>
struct Target {
  Point2<S> point;
  S lam{};  // cached parameter of point on the owner's ray
  TargetKind kind = TargetKind::CrossPt;
  // Every rider known to share the point. Several lines can run through one
  // point, so a single id is not enough: the arrival check must see each
  // candidate whose track might cover it.
  std::vector<int> partners;
};

enum class EventCase { Stop, Crash, Extend, Halve };

inline const char* event_case_name(EventCase c) {
  switch (c) {
    case EventCase::Stop: return "stop";
    case EventCase::Crash: return "crash";
    case EventCase::Extend: return "extend";
    case EventCase::Halve: return "halve";
  }
  return "?";
}

template <class S>
struct TraceEvent {
  S time{};
  int rider = 0;
  Point2<S> point;
  TargetKind kind = TargetKind::CrossPt;
  EventCase what = EventCase::Extend;
  // Targets created while processing: own pushes, side pushes into other
  // stacks, the retarget point of a plain extension, spawned starts.
  std::vector<std::pair<int, Point2<S>>> created;
};

struct EngineStats {
  long events = 0;
  long ray_queries = 0;
  long halving_queries = 0;
  long max_cross_targets = 0;  // peak number of cross targets in any one stack
  int spawned = 0;
  double wall_seconds = 0;
};

template <class S>
struct SolveOptions {
  HalvingKind halving = HalvingKind::Counting;
  ShooterKind shooter = ShooterKind::Linear;
  SpawnPolicy<S> spawn;
  // Crash spawning is only sound under the midpoint rule; this switch lets
  // instrumentation runs combine a policy with the other rules anyway.
  bool allow_spawn_with_counting = false;
  bool induced_regime = false;      // selects the tighter halving length floor
  bool verify_every_event = false;  // full invariant audit after each event
  std::function<void(const TraceEvent<S>&)> observer;
};

// Gives every rider a finite destination and truncates paths at walls, in
// that order, so no wall crosses the interior of any remaining segment.
template <class S>
Instance<S> prepare_instance(Instance<S> inst) {
  validate_instance(inst);
  compute_bounding_destinations(inst);
  clip_destinations_to_walls(inst);
  return inst;
}

// Event-driven construction of the crash verdicts. Each rider keeps a stack
// of pending arrival points; the queue is keyed by (arrival time of the
// nearest target, id) and is deliberately non-chronological: a retracted
// tentative track may re-insert keys below times already processed. Verdicts
// at a point use, in order: the point's blocked flag (someone already rode
// through), the stack partner's realized coverage, simultaneous-arrival ties,
// and only then an unblocked destination stop. Start events are exempt.
template <class S>
class MotorcycleEngine {
 public:
  MotorcycleEngine(Instance<S> inst, SolveOptions<S> opt)
      : inst_(std::move(inst)), opt_(std::move(opt)) {
    validate_instance(inst_);
    for (const auto& m : inst_.riders)
      if (!m.d) throw ContractViolation("engine requires finite destinations; prepare the instance");
    HalvingConfig hc;
    hc.bit_width = inst_.bit_width;
    hc.induced_regime = opt_.induced_regime;
    halving_ = make_halving<S>(opt_.halving, &inst_, hc);
    shooter_ = make_shooter<S>(opt_.shooter, inst_);
    for (size_t k = 0; k < inst_.walls.size(); ++k)
      shooter_->insert(wall_owner(static_cast<int>(k)), inst_.walls[k].a, inst_.walls[k].b);
    rs_.assign(inst_.riders.size(), {});
    for (const auto& m : inst_.riders) {
      RState& r = rs(m.id);
      r.c = m.s;
      r.t = m.s;
      r.lam_c = S(0);
      r.lam_t = S(0);
      r.lam_d = *ray_param(m, *m.d);
      lines_[line_key(m.s, m.v)].push_back(m.id);
      shooter_->insert(m.id, m.s, m.s);
    }
    seed_stacks();
    for (const auto& m : inst_.riders) queue_.insert({m.t0, m.id});
  }

  bool step() {
    if (queue_.empty()) return false;
    auto [key, id] = *queue_.begin();
    queue_.erase(queue_.begin());
    process(key, id);
    return true;
  }

  MGResult<S> run() {
    auto t0 = std::chrono::steady_clock::now();
    while (step()) {
    }
    wall_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MGResult<S> out;
    out.riders = inst_.riders;
    for (const auto& m : inst_.riders) {
      const RState& r = rs(m.id);
      if (!r.ended) throw ContractViolation("queue drained while a rider is still live");
      Outcome o = r.out;
      if (o.kind == OutcomeKind::Crashed) {
        // Blame is re-attributed from the final tracks: processing order is
        // not chronological, so the earliest coverer of a death point may not
        // have been confirmed yet when the death was recorded.
        ScanBest sb = scan_coverers(m.id, r.kappa, r.t_end);
        if (sb.found) o.other = sb.id;
      }
      out.records.push_back({m.id, r.kappa, r.t_end, o});
    }
    return out;
  }

  EngineStats stats() const {
    EngineStats st;
    st.events = events_;
    st.ray_queries = shooter_->queries;
    st.halving_queries = halving_->queries;
    st.max_cross_targets = max_cross_;
    st.spawned = spawned_;
    st.wall_seconds = wall_seconds_;
    return st;
  }

  const Instance<S>& instance() const { return inst_; }
  bool alive(int id) const { return !rs_[static_cast<size_t>(id - 1)].ended; }
  const std::vector<Target<S>>& stack_of(int id) const {
    return rs_[static_cast<size_t>(id - 1)].stack;
  }
  const Point2<S>& tentative_of(int id) const { return rs_[static_cast<size_t>(id - 1)].t; }
  const Point2<S>& confirmed_of(int id) const { return rs_[static_cast<size_t>(id - 1)].c; }

  // Full structural audit. Empty result means every invariant holds: tracks
  // pairwise non-crossing, stacks sorted with the destination at the bottom,
  // tentative endpoints equal to stack tops, queue in sync, dictionary
  // membership complete.
  std::vector<std::string> verify_state() const {
    std::vector<std::string> bad;
    auto tag = [](int id) { return "rider " + std::to_string(id); };
    size_t live = 0;
    for (const auto& m : inst_.riders) {
      const RState& r = rs_[static_cast<size_t>(m.id - 1)];
      if (!r.ended) {
        ++live;
        if (r.stack.empty()) {
          bad.push_back(tag(m.id) + ": live with an empty stack");
          continue;
        }
        if (!(r.stack.back().point == r.t))
          bad.push_back(tag(m.id) + ": tentative endpoint is not the stack top");
        if (r.stack.front().kind != TargetKind::DestPt)
          bad.push_back(tag(m.id) + ": stack bottom is not the destination");
        if (!leq(r.lam_c, r.stack.back().lam))
          bad.push_back(tag(m.id) + ": confirmed frontier past the stack top");
        if (queue_.count({m.t0 + r.lam_t, m.id}) != 1)
          bad.push_back(tag(m.id) + ": missing or mis-keyed queue entry");
        for (size_t k = 0; k + 1 < r.stack.size(); ++k)
          if (!slt(r.stack[k + 1].lam, r.stack[k].lam))
            bad.push_back(tag(m.id) + ": stack order breach at depth " + std::to_string(k));
      }
      for (const auto& t : r.stack) {
        auto it = dict_.find(t.point);
        bool member = false;
        if (it != dict_.end())
          for (int x : it->second.members)
            if (x == m.id) member = true;
        if (!member) bad.push_back(tag(m.id) + ": stack point missing from the dictionary");
      }
    }
    if (queue_.size() != live)
      bad.push_back("queue holds " + std::to_string(queue_.size()) + " entries for " +
                    std::to_string(live) + " live riders");
    for (size_t i = 0; i < inst_.riders.size(); ++i)
      for (size_t j = i + 1; j < inst_.riders.size(); ++j) {
        const RState& a = rs_[i];
        const RState& b = rs_[j];
        if (tracks_conflict(inst_.riders[i].s, a.ended ? a.kappa : a.t, inst_.riders[j].s,
                            b.ended ? b.kappa : b.t))
          bad.push_back("tracks of riders " + std::to_string(i + 1) + " and " +
                        std::to_string(j + 1) + " cross");
      }
    return bad;
  }

 private:
  struct RState {
    std::vector<Target<S>> stack;  // sorted by lam descending; back = nearest
    Point2<S> c;                   // confirmed frontier
    Point2<S> t;                   // tentative frontier
    S lam_c{}, lam_t{}, lam_d{};
    bool ended = false;
    Point2<S> kappa;
    S t_end{};
    Outcome out{};
  };
  struct Crasher {
    S t{};
    int id = 0;
    bool mutual = false;  // died without any strictly earlier coverer
  };
  struct PointInfo {
    std::vector<int> members;  // riders holding this point in their stack
    bool blocked = false;      // some rider already rode through or ended here
    std::vector<Crasher> crashers;
    bool spawned_already = false;
  };
  struct ScanBest {
    bool found = false;
    S t{};
    int id = 0;
    bool strict = false;
  };

  Instance<S> inst_;
  SolveOptions<S> opt_;
  std::unique_ptr<HalvingStrategy<S>> halving_;
  std::unique_ptr<RayShooter<S>> shooter_;
  std::vector<RState> rs_;
  std::map<Point2<S>, PointInfo, PointLess<S>> dict_;
  std::set<std::pair<S, int>> queue_;
  std::map<LineKey, std::vector<int>> lines_;
  long events_ = 0;
  long max_cross_ = 0;
  int spawned_ = 0;
  double wall_seconds_ = 0;

  static bool slt(const S& a, const S& b) { return a < b && !approx_eq(a, b); }
  static bool leq(const S& a, const S& b) { return a < b || approx_eq(a, b); }

  const Motorcycle<S>& rider(int id) const { return inst_.riders[static_cast<size_t>(id - 1)]; }
  RState& rs(int id) { return rs_[static_cast<size_t>(id - 1)]; }
  const RState& rs(int id) const { return rs_[static_cast<size_t>(id - 1)]; }

  void register_member(const Point2<S>& p, int id) {
    auto& dp = dict_[p];
    for (int k : dp.members)
      if (k == id) return;
    dp.members.push_back(id);
  }

  void update_cross_stat(int id) {
    long c = 0;
    for (const auto& t : rs(id).stack)
      if (t.kind == TargetKind::CrossPt) ++c;
    max_cross_ = std::max(max_cross_, c);
  }

  // j's realized track reaches p no later than t. The confirmed frontier is
  // the realized part: every arrival at or before the current key has been
  // processed, so anything beyond it is still provisional.
  bool realized_covers(int j, const Point2<S>& p, const S& t) const {
    const auto& m = rider(j);
    auto lam = ray_param(m, p);
    if (!lam) return false;
    if (!leq(*lam, rs(j).lam_c)) return false;
    return leq(m.t0 + *lam, t);
  }

  // Minimal (arrival time, id) over riders whose realized track covers p by
  // time t. Used once per death to attribute the blocker.
  ScanBest scan_coverers(int self, const Point2<S>& p, const S& t) const {
    ScanBest b;
    for (const auto& m : inst_.riders) {
      if (m.id == self) continue;
      auto lam = ray_param(m, p);
      if (!lam) continue;
      if (!leq(*lam, rs(m.id).lam_c)) continue;
      S tj = m.t0 + *lam;
      if (!leq(tj, t)) continue;
      if (!b.found || slt(tj, b.t) || (approx_eq(tj, b.t) && m.id < b.id)) {
        b.found = true;
        b.t = tj;
        b.id = m.id;
      }
    }
    if (b.found) b.strict = slt(b.t, t);
    return b;
  }

  static void add_partner(std::vector<int>& ps, int q) {
    if (q <= 0) return;
    if (std::find(ps.begin(), ps.end(), q) == ps.end()) ps.push_back(q);
  }

  // Sorted insert; rejects points at or behind the confirmed frontier and
  // enriches an existing target at the same point instead of duplicating it.
  bool push_target(int id, Target<S> tg, std::vector<std::pair<int, Point2<S>>>* created) {
    RState& r = rs(id);
    if (r.ended) return false;
    if (leq(tg.lam, r.lam_c)) return false;
    for (auto& ex : r.stack)
      if (approx_eq(ex.point, tg.point)) {
        for (int q : tg.partners) add_partner(ex.partners, q);
        register_member(ex.point, id);
        return false;
      }
    size_t pos = 0;
    while (pos < r.stack.size() && r.stack[pos].lam > tg.lam) ++pos;
    r.stack.insert(r.stack.begin() + pos, tg);
    register_member(tg.point, id);
    if (created) created->push_back({id, tg.point});
    return true;
  }

  // Re-aims the tentative track at the current stack top: shooter segment,
  // queue key, and cached frontier all move together.
  void retarget(int id) {
    RState& r = rs(id);
    if (r.ended) return;
    const Motorcycle<S>& m = rider(id);
    queue_.erase({m.t0 + r.lam_t, id});
    const Target<S>& top = r.stack.back();
    r.t = top.point;
    r.lam_t = top.lam;
    shooter_->update(id, r.t);
    queue_.insert({m.t0 + r.lam_t, id});
  }

  // Inserts a cross target discovered while j was not looking (a shooter hit
  // on its tentative track, or a frozen end on its line). When the insert
  // shortens the tentative track, the vacated stretch is re-halved.
  void insert_running_target(int j, const Point2<S>& p, const S& lamj, int partner,
                             TraceEvent<S>& ev) {
    RState& r = rs(j);
    std::vector<int> ps;
    add_partner(ps, partner);
    if (!push_target(j, {p, lamj, TargetKind::CrossPt, std::move(ps)}, &ev.created)) return;
    if (r.stack.back().point == p) {
      auto h = halving_->halve(j, r.c, p);
      if (h) {
        auto lh = ray_param(rider(j), *h);
        if (lh) push_target(j, {*h, *lh, TargetKind::HalvePt, {}}, &ev.created);
      }
      retarget(j);
    }
    update_cross_stat(j);
  }

  // A shooter hit landed on j's track while `pusher` was extending: give j
  // the crossing as a target of its own unless it already passed it or
  // already targets it.
  void side_push(int j, int pusher, TraceEvent<S>& ev) {
    if (j == pusher) return;
    RState& r = rs(j);
    if (r.ended) return;
    auto cc = canonical_crossing(rider(pusher), rider(j));
    if (cc.kind != LineRelation::Proper) return;
    auto lj = ray_param(rider(j), cc.point);
    if (!lj) return;
    if (leq(*lj, r.lam_c)) return;
    auto it = dict_.find(cc.point);
    if (it != dict_.end())
      for (int x : it->second.members)
        if (x == j) return;
    insert_running_target(j, cc.point, *lj, pusher, ev);
  }

  void process(const S& tnow, int id) {
    RState& r = rs(id);
    if (r.ended) throw ContractViolation("event for an ended rider");
    if (r.stack.empty()) throw ContractViolation("event with an empty stack");
    const Target<S> top = r.stack.back();
    const Motorcycle<S>& m = rider(id);
    const Point2<S> p = top.point;
    if (!approx_eq(tnow, m.t0 + top.lam)) throw ContractViolation("queue key out of sync");
    ++events_;
    {
      double n = static_cast<double>(inst_.riders.size());
      if (static_cast<double>(events_) > 200.0 * n * (std::log2(n + 1) + 2) + 2000.0)
        throw ContractViolation("event budget exceeded; the engine is not converging");
    }

    TraceEvent<S> ev;
    ev.time = tnow;
    ev.rider = id;
    ev.point = p;
    ev.kind = top.kind;

    auto dit = dict_.find(p);
    if (dit == dict_.end()) throw ContractViolation("arrival at an unregistered point");
    PointInfo& dp = dit->second;

    bool die = false, stop = false, mutual = false;
    int blocker = 0;
    if (top.kind != TargetKind::StartPt) {
      bool covered = dp.blocked;
      if (!covered)
        for (int q : top.partners)
          if (realized_covers(q, p, tnow)) {
            covered = true;
            break;
          }
      if (covered) {
        ScanBest sb = scan_coverers(id, p, tnow);
        if (!sb.found) throw ContractViolation("blocked point without a coverer");
        die = true;
        blocker = sb.id;
        mutual = !sb.strict;
      } else {
        int mate = 0;
        for (int k : dp.members) {
          if (k == id || rs(k).ended) continue;
          auto lk = ray_param(rider(k), p);
          if (!lk) continue;
          if (approx_eq(rider(k).t0 + *lk, tnow) && (mate == 0 || k < mate)) mate = k;
        }
        if (mate != 0) {
          ScanBest sb = scan_coverers(id, p, tnow);
          if (sb.found && sb.strict) {
            die = true;
            blocker = sb.id;
          } else {
            die = true;
            blocker = mate;
            mutual = true;
          }
        } else if (top.kind == TargetKind::DestPt) {
          stop = true;
        }
      }
    }

    if (die) {
      end_rider(id, p, top.lam, tnow, {OutcomeKind::Crashed, blocker});
      ev.what = EventCase::Crash;
      dp.crashers.push_back({tnow, id, mutual});
      if (opt_.spawn && !dp.spawned_already) maybe_spawn(dp, p, tnow, ev);
      seed_line_entries(id, p, tnow, ev);
    } else if (stop) {
      end_rider(id, p, top.lam, tnow, {stop_outcome(m.dest_kind), 0});
      ev.what = EventCase::Stop;
    } else {
      r.stack.pop_back();
      r.c = p;
      r.lam_c = top.lam;
      if (r.stack.empty()) throw ContractViolation("ran out of targets before the destination");
      // A rider departing its start may stand on tracks that were laid (or
      // extended) before its own ever became visible; rays cannot report a
      // crossing at their origin, so those owners are collected separately
      // and re-aimed at this point. Later arrivals never need this: any
      // non-start arrival was preceded by an extension event here, whose
      // shoot already saw every such track.
      std::vector<int> through;
      auto hit =
          shooter_->shoot(p, m.v, id, top.kind == TargetKind::StartPt ? &through : nullptr);
      for (int o : through)
        if (o > 0) side_push(o, id, ev);
      bool pushed_own = false;
      if (hit) {
        S lam_hit = top.lam + hit->param;
        const S lam_next = r.stack.back().lam;
        if (approx_eq(lam_hit, lam_next)) {
          // Boundary contact with the current target: keep the extension, fold
          // the hit owners into its candidate set (their tracks may be the
          // ones covering the point on arrival), and make sure every rider
          // whose track ends up there targets it too.
          for (int o : hit->owners)
            if (o > 0) {
              add_partner(r.stack.back().partners, o);
              side_push(o, id, ev);
            }
        } else if (lam_hit < lam_next) {
          int j = hit->owners.front();
          if (j <= 0) throw ContractViolation("wall strictly inside a clipped corridor");
          Point2<S> chi = canonical_crossing(m, rider(j)).point;
          auto lchi = ray_param(m, chi);
          S lam_chi = lchi ? *lchi : lam_hit;
          if (!lchi) chi = hit->point;
          std::vector<int> ps;
          for (int o : hit->owners) add_partner(ps, o);
          pushed_own |= push_target(id, {chi, lam_chi, TargetKind::CrossPt, std::move(ps)},
                                    &ev.created);
          auto h = halving_->halve(id, p, chi);
          if (h) {
            auto lh = ray_param(m, *h);
            if (lh) pushed_own |= push_target(id, {*h, *lh, TargetKind::HalvePt, {}}, &ev.created);
          }
          for (int o : hit->owners)
            if (o > 0) side_push(o, id, ev);
        }
      }
      retarget(id);
      ev.what = pushed_own ? EventCase::Halve : EventCase::Extend;
      if (!pushed_own) ev.created.push_back({id, r.stack.back().point});
    }

    dp.blocked = true;
    update_cross_stat(id);
    if (opt_.observer) opt_.observer(ev);
    if (opt_.verify_every_event) {
      auto bad = verify_state();
      if (!bad.empty()) {
        std::string msg = "state audit failed:";
        for (const auto& b : bad) msg += " [" + b + "]";
        throw ContractViolation(msg);
      }
    }
  }

  void end_rider(int id, const Point2<S>& p, const S& lam, const S& t, Outcome out) {
    RState& r = rs(id);
    r.ended = true;
    r.kappa = p;
    r.t_end = t;
    r.out = out;
    r.c = p;
    r.lam_c = lam;
    r.t = p;
    r.lam_t = lam;
    shooter_->update(id, p);
  }

  // Two genuinely mutual crashers at the same instant complete a pair; a
  // third simultaneous arriver is a modelling error while a policy is active.
  void maybe_spawn(PointInfo& dp, const Point2<S>& p, const S& tnow, TraceEvent<S>& ev) {
    std::vector<const Crasher*> mut;
    for (const auto& cr : dp.crashers)
      if (cr.mutual && approx_eq(cr.t, tnow)) mut.push_back(&cr);
    if (mut.size() < 2) return;
    if (mut.size() > 2)
      throw DomainError("more than two simultaneous crashers with an active spawn policy");
    for (int k : dp.members) {
      if (rs(k).ended) continue;
      auto lk = ray_param(rider(k), p);
      if (lk && approx_eq(rider(k).t0 + *lk, tnow))
        throw DomainError("more than two simultaneous crashers with an active spawn policy");
    }
    if (opt_.halving != HalvingKind::Midpoint && !opt_.allow_spawn_with_counting)
      throw DomainError("crash spawning requires the midpoint halving rule");
    dp.spawned_already = true;

    auto children = opt_.spawn(p, tnow, rider(mut[0]->id), rider(mut[1]->id));
    if (children.empty()) return;
    if (children.size() > 1) throw DomainError("spawn policy returned more than one rider");
    Motorcycle<S> c = children.front();
    c.id = static_cast<int>(inst_.riders.size()) + 1;
    c.s = p;
    c.t0 = tnow;
    if (is_zero(c.v.x) && is_zero(c.v.y)) throw DomainError("spawned rider has zero velocity");
    if (!c.d) throw DomainError("spawned rider needs a finite destination");
    auto ld = ray_param(c, *c.d);
    if (!ld) throw DomainError("spawned destination not on the forward ray");
    LineKey lk = line_key(c.s, c.v);
    if (lines_.count(lk))
      throw DomainError("spawned rider shares a supporting line with an existing rider");
    inst_.riders.push_back(c);
    lines_[lk].push_back(c.id);
    RState fresh;
    fresh.c = c.s;
    fresh.t = c.s;
    fresh.lam_c = S(0);
    fresh.lam_t = S(0);
    fresh.lam_d = *ld;
    fresh.stack.push_back({*c.d, *ld, TargetKind::DestPt, {}});
    fresh.stack.push_back({c.s, S(0), TargetKind::StartPt, {}});
    rs_.push_back(std::move(fresh));
    register_member(*c.d, c.id);
    register_member(c.s, c.id);
    shooter_->insert(c.id, c.s, c.s);
    halving_->on_rider_added(c.id);
    queue_.insert({tnow, c.id});
    ++spawned_;
    ev.created.push_back({c.id, c.s});
  }

  // A frozen track end is an entry point for same-line riders that have not
  // passed it yet and would arrive no earlier than it froze.
  void seed_line_entries(int dead, const Point2<S>& p, const S& tnow, TraceEvent<S>& ev) {
    auto it = lines_.find(line_key(rider(dead).s, rider(dead).v));
    if (it == lines_.end()) return;
    for (int j : it->second) {
      if (j == dead || rs(j).ended) continue;
      const auto& mj = rider(j);
      auto lj = ray_param(mj, p);
      if (!lj || approx_eq(*lj, S(0))) continue;
      if (!leq(*lj, rs(j).lam_d)) continue;
      if (slt(mj.t0 + *lj, tnow)) continue;
      insert_running_target(j, p, *lj, dead, ev);
    }
  }

  // Initial stacks: destination and start for everyone; same-line groups add
  // start footprints, destination fronts, and simultaneous-position meets.
  void seed_stacks() {
    std::vector<std::vector<Target<S>>> tg(inst_.riders.size());
    for (const auto& m : inst_.riders) {
      auto& v = tg[static_cast<size_t>(m.id - 1)];
      v.push_back({*m.d, rs(m.id).lam_d, TargetKind::DestPt, {}});
      v.push_back({m.s, S(0), TargetKind::StartPt, {}});
    }
    auto seed = [&](int to, const Point2<S>& p, TargetKind kind, int partner) {
      const auto& m = rider(to);
      auto lam = ray_param(m, p);
      if (!lam || approx_eq(*lam, S(0))) return;
      if (!leq(*lam, rs(to).lam_d)) return;
      std::vector<int> ps;
      add_partner(ps, partner);
      tg[static_cast<size_t>(to - 1)].push_back({p, *lam, kind, std::move(ps)});
    };
    for (const auto& [key, ids] : lines_) {
      if (ids.size() < 2) continue;
      for (size_t a = 0; a < ids.size(); ++a)
        for (size_t b = 0; b < ids.size(); ++b) {
          if (a == b) continue;
          seed(ids[a], rider(ids[b]).s, TargetKind::CrossPt, ids[b]);
          seed(ids[a], *rider(ids[b]).d, TargetKind::CrossPt, ids[b]);
        }
      for (size_t a = 0; a < ids.size(); ++a)
        for (size_t b = a + 1; b < ids.size(); ++b) {
          const auto& mi = rider(ids[a]);
          const auto& mj = rider(ids[b]);
          S vv = dot(mj.v, mj.v);
          S off = dot(mi.s - mj.s, mj.v) / vv;
          S ratio = dot(mi.v, mj.v) / vv;
          S one_minus = S(1) - ratio;
          if (is_zero(one_minus)) continue;
          S lam_i = (mj.t0 + off - mi.t0) / one_minus;
          Point2<S> meet = mi.s + lam_i * mi.v;
          auto li = ray_param(mi, meet);
          auto lj = ray_param(mj, meet);
          bool ok_i = li && !approx_eq(*li, S(0)) && leq(*li, rs(ids[a]).lam_d);
          bool ok_j = lj && !approx_eq(*lj, S(0)) && leq(*lj, rs(ids[b]).lam_d);
          if (ok_i && ok_j) {
            seed(ids[a], meet, TargetKind::MeetPt, ids[b]);
            seed(ids[b], meet, TargetKind::MeetPt, ids[a]);
          }
        }
    }
    auto rank = [](TargetKind k) {
      switch (k) {
        case TargetKind::DestPt: return 4;
        case TargetKind::StartPt: return 3;
        case TargetKind::CrossPt: return 2;
        case TargetKind::MeetPt: return 1;
        case TargetKind::HalvePt: return 0;
      }
      return 0;
    };
    for (const auto& m : inst_.riders) {
      auto& v = tg[static_cast<size_t>(m.id - 1)];
      std::sort(v.begin(), v.end(),
                [](const Target<S>& x, const Target<S>& y) { return y.lam < x.lam; });
      std::vector<Target<S>> out;
      for (auto& t : v) {
        if (!out.empty() && approx_eq(out.back().point, t.point)) {
          Target<S>& keep = out.back();
          std::vector<int> merged = std::move(keep.partners);
          for (int q : t.partners) add_partner(merged, q);
          if (rank(t.kind) > rank(keep.kind)) keep = t;
          keep.partners = std::move(merged);
          continue;
        }
        out.push_back(t);
      }
      RState& r = rs(m.id);
      r.stack = std::move(out);
      for (const auto& t : r.stack) register_member(t.point, m.id);
    }
  }

  // True when the two segments cross in both interiors or overlap along a
  // shared line in more than one point. Endpoint contact is legitimate: a
  // crash point is one track's endpoint on another track's interior.
  static bool tracks_conflict(const Point2<S>& a1, const Point2<S>& a2, const Point2<S>& b1,
                              const Point2<S>& b2) {
    if (a1 == a2 || b1 == b2) return false;
    Vector2<S> e = a2 - a1, f = b2 - b1;
    Vector2<S> w = b1 - a1;
    S den = cross(e, f);
    S scale = (abs_of(e.x) + abs_of(e.y)) * (abs_of(f.x) + abs_of(f.y)) + S(1);
    if (!is_zero(den / scale)) {
      S t = cross(w, f) / den;
      S u = cross(w, e) / den;
      auto interior = [](const S& x) -> bool {
        return x > S(0) && x < S(1) && !approx_eq(x, S(0)) && !approx_eq(x, S(1));
      };
      return interior(t) && interior(u);
    }
    S off = cross(w, e);
    S oscale = (abs_of(e.x) + abs_of(e.y)) * (abs_of(w.x) + abs_of(w.y)) + S(1);
    if (!is_zero(off / oscale)) return false;
    S ee = dot(e, e);
    S q0 = dot(b1 - a1, e) / ee;
    S q1 = dot(b2 - a1, e) / ee;
    if (q1 < q0) std::swap(q0, q1);
    S lo = q0 < S(0) ? S(0) : q0;
    S hi = q1 < S(1) ? q1 : S(1);
    if (hi < lo) return false;
    return !approx_eq(hi, lo);
  }
};

template <class S>
MGResult<S> solve(const Instance<S>& inst, SolveOptions<S> opt = {}) {
  MotorcycleEngine<S> e(inst, std::move(opt));
  return e.run();
}

}  // namespace moto
