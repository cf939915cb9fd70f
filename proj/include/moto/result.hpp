#pragma once

#include <functional>
#include <string>
#include <vector>

#include "moto/geom.hpp"

namespace moto {

enum class OutcomeKind { Reached, Crashed, HitWall, Escaped };

inline const char* outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Reached: return "reached";
    case OutcomeKind::Crashed: return "crashed";
    case OutcomeKind::HitWall: return "hit-wall";
    case OutcomeKind::Escaped: return "escaped";
  }
  return "?";
}

// Outcome of an unblocked arrival at the destination, by destination origin.
inline OutcomeKind stop_outcome(DestKind k) {
  switch (k) {
    case DestKind::Given: return OutcomeKind::Reached;
    case DestKind::Boxed: return OutcomeKind::Escaped;
    case DestKind::Wall: return OutcomeKind::HitWall;
  }
  return OutcomeKind::Reached;
}

struct Outcome {
  OutcomeKind kind = OutcomeKind::Reached;
  int other = 0;  // blocker id when kind == Crashed
};

template <class S>
struct RiderRecord {
  int id = 0;
  Point2<S> kappa;  // final point of the trajectory
  S t_end{};
  Outcome outcome;
};

template <class S>
struct MGResult {
  std::vector<RiderRecord<S>> records;    // by id, spawned riders included
  std::vector<Motorcycle<S>> riders;      // final rider set, spawned included
};

// Called when exactly two riders crash into each other at p at time t.
// Returns at most one replacement rider; its id, start point, and start time
// are assigned by the engine.
template <class S>
using SpawnPolicy = std::function<std::vector<Motorcycle<S>>(
    const Point2<S>& p, const S& t, const Motorcycle<S>& a, const Motorcycle<S>& b)>;

// Structural comparison of two runs, possibly across numeric backends.
// Returns human-readable mismatch descriptions; empty means agreement.
template <class SA, class SB>
std::vector<std::string> compare_results(const MGResult<SA>& a, const MGResult<SB>& b,
                                         double tol = 1e-6) {
  std::vector<std::string> bad;
  auto close = [&](double x, double y) {
    double m = std::max({1.0, std::abs(x), std::abs(y)});
    return std::abs(x - y) <= tol * m;
  };
  if (a.records.size() != b.records.size()) {
    bad.push_back("rider count " + std::to_string(a.records.size()) + " vs " +
                  std::to_string(b.records.size()));
    return bad;
  }
  for (size_t k = 0; k < a.records.size(); ++k) {
    const auto& ra = a.records[k];
    const auto& rb = b.records[k];
    std::string who = "rider " + std::to_string(ra.id) + ": ";
    if (ra.id != rb.id) {
      bad.push_back(who + "id mismatch vs " + std::to_string(rb.id));
      continue;
    }
    if (ra.outcome.kind != rb.outcome.kind)
      bad.push_back(who + std::string("outcome ") + outcome_name(ra.outcome.kind) + " vs " +
                    outcome_name(rb.outcome.kind));
    else if (ra.outcome.kind == OutcomeKind::Crashed && ra.outcome.other != rb.outcome.other)
      bad.push_back(who + "blocker " + std::to_string(ra.outcome.other) + " vs " +
                    std::to_string(rb.outcome.other));
    if (!close(to_double(ra.t_end), to_double(rb.t_end)))
      bad.push_back(who + "end time " + std::to_string(to_double(ra.t_end)) + " vs " +
                    std::to_string(to_double(rb.t_end)));
    if (!close(to_double(ra.kappa.x), to_double(rb.kappa.x)) ||
        !close(to_double(ra.kappa.y), to_double(rb.kappa.y)))
      bad.push_back(who + "final point (" + std::to_string(to_double(ra.kappa.x)) + "," +
                    std::to_string(to_double(ra.kappa.y)) + ") vs (" +
                    std::to_string(to_double(rb.kappa.x)) + "," +
                    std::to_string(to_double(rb.kappa.y)) + ")");
  }
  return bad;
}

}  // namespace moto
