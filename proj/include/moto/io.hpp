#pragma once

// Line-oriented instance file format plus result and trace serialization.
//
//   # comments run to end of line
//   [config]
//   backend exact            # exact | float
//   w 32                     # coordinate bit width
//   halving counting         # counting | midpoint | coriented
//   shooter linear           # linear | grid
//   rho 1/2                  # optional, informational halving ratio
//   [motorcycles]
//   m 1 s 0 0 v 1 0 d 10 0 t0 0
//   [walls]
//   w 20 -10 20 10
//   [polygon]
//   ring outer 0 0 10 0 10 10 0 10 0 0   # rings are written closed
//
// Numbers are integers, decimals, or p/q rationals, parsed exactly. A
// polygon section replaces explicit motorcycles and walls (they are induced
// from the reflex vertices).

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "moto/geom.hpp"
#include "moto/halving.hpp"
#include "moto/induced.hpp"
#include "moto/mg_core.hpp"
#include "moto/rayshoot.hpp"
#include "moto/result.hpp"

namespace moto {

struct FileConfig {
  Backend backend = Backend::Exact;
  int bit_width = 32;
  HalvingKind halving = HalvingKind::Counting;
  ShooterKind shooter = ShooterKind::Linear;
  std::optional<Rat> rho;  // echoed on write; the strategies pin their own ratios
};

struct InstanceFile {
  FileConfig config;
  Instance<Rat> instance;               // exactly as written, unprepared
  std::optional<Polygon<Rat>> polygon;  // present: riders/walls are induced
};

namespace ioimpl {

[[noreturn]] inline void fail(int line, const std::string& what) {
  throw InvalidInput("line " + std::to_string(line) + ": " + what);
}

// Integer, decimal, or p/q literal to an exact rational.
inline Rat parse_number(const std::string& tok, int line) {
  auto digits = [&](const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  std::string t = tok;
  bool neg = false;
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    neg = t[0] == '-';
    t.erase(0, 1);
  }
  // mpz_class's string constructor defaults to base 0, where leading zeros
  // mean octal; force decimal.
  auto dec = [](const std::string& s) { return mpz_class(s, 10); };
  auto slash = t.find('/');
  Rat out;
  if (slash != std::string::npos) {
    std::string p = t.substr(0, slash), q = t.substr(slash + 1);
    if (!digits(p) || !digits(q) || q.find_first_not_of('0') == std::string::npos)
      fail(line, "malformed rational literal '" + tok + "'");
    out = Rat(dec(p), dec(q));
    out.canonicalize();
  } else {
    auto dot = t.find('.');
    if (dot == std::string::npos) {
      if (!digits(t)) fail(line, "malformed number '" + tok + "'");
      out = Rat(dec(t));
    } else {
      std::string ip = t.substr(0, dot), fp = t.substr(dot + 1);
      if (ip.empty()) ip = "0";
      if (!digits(ip) || !digits(fp) || fp.empty())
        fail(line, "malformed number '" + tok + "'");
      mpz_class den(1);
      for (size_t k = 0; k < fp.size(); ++k) den *= 10;
      out = Rat(dec(ip) * den + dec(fp), den);
      out.canonicalize();
    }
  }
  if (neg) out = -out;
  return out;
}

inline std::string format_number(const Rat& r) {
  Rat c = r;
  c.canonicalize();
  std::string s = c.get_num().get_str();
  if (c.get_den() != 1) s += "/" + c.get_den().get_str();
  return s;
}

inline bool fits_bits(const Rat& r, int w) {
  Rat c = r;
  c.canonicalize();
  mpz_class num = abs(c.get_num());
  return mpz_sizeinbase(num.get_mpz_t(), 2) <= static_cast<size_t>(w) &&
         mpz_sizeinbase(c.get_den().get_mpz_t(), 2) <= static_cast<size_t>(w);
}

}  // namespace ioimpl

inline InstanceFile parse_instance(const std::string& text) {
  using ioimpl::fail;
  InstanceFile f;
  enum class Sec { None, Config, Motorcycles, Walls, Polygon } sec = Sec::None;
  std::vector<std::vector<Point2<Rat>>> rings;  // ring 0 may be outer
  std::vector<bool> ring_is_outer;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0].front() == '[') {
      if (tok.size() != 1) fail(line, "section header takes no arguments");
      if (tok[0] == "[config]")
        sec = Sec::Config;
      else if (tok[0] == "[motorcycles]")
        sec = Sec::Motorcycles;
      else if (tok[0] == "[walls]")
        sec = Sec::Walls;
      else if (tok[0] == "[polygon]")
        sec = Sec::Polygon;
      else
        fail(line, "unknown section '" + tok[0] + "'");
      continue;
    }
    auto num = [&](size_t i) {
      if (i >= tok.size()) fail(line, "missing number");
      return ioimpl::parse_number(tok[i], line);
    };
    switch (sec) {
      case Sec::None:
        fail(line, "content before any section header");
      case Sec::Config: {
        if (tok.size() != 2) fail(line, "config entries are 'key value'");
        const std::string& k = tok[0];
        const std::string& v = tok[1];
        if (k == "backend") {
          if (v == "exact")
            f.config.backend = Backend::Exact;
          else if (v == "float")
            f.config.backend = Backend::Float;
          else
            fail(line, "unknown backend '" + v + "'");
        } else if (k == "w") {
          Rat r = num(1);
          if (r.get_den() != 1 || r < 1 || r > 512) fail(line, "w must be an integer in 1..512");
          f.config.bit_width = static_cast<int>(r.get_num().get_si());
        } else if (k == "halving") {
          if (v == "counting")
            f.config.halving = HalvingKind::Counting;
          else if (v == "midpoint")
            f.config.halving = HalvingKind::Midpoint;
          else if (v == "coriented")
            f.config.halving = HalvingKind::COriented;
          else
            fail(line, "unknown halving '" + v + "'");
        } else if (k == "shooter") {
          if (v == "linear")
            f.config.shooter = ShooterKind::Linear;
          else if (v == "grid")
            f.config.shooter = ShooterKind::Grid;
          else
            fail(line, "unknown shooter '" + v + "'");
        } else if (k == "rho") {
          f.config.rho = num(1);
        } else {
          fail(line, "unknown config key '" + k + "'");
        }
        break;
      }
      case Sec::Motorcycles: {
        if (tok[0] != "m") fail(line, "motorcycle lines start with 'm'");
        Rat idr = num(1);
        if (idr.get_den() != 1 || idr < 1) fail(line, "motorcycle id must be a positive integer");
        Motorcycle<Rat> m;
        m.id = static_cast<int>(idr.get_num().get_si());
        for (const auto& prev : f.instance.riders)
          if (prev.id == m.id) fail(line, "duplicate motorcycle id " + std::to_string(m.id));
        size_t i = 2;
        if (i >= tok.size() || tok[i] != "s") fail(line, "expected 's <x> <y>'");
        m.s = {num(i + 1), num(i + 2)};
        i += 3;
        if (i >= tok.size() || tok[i] != "v") fail(line, "expected 'v <x> <y>'");
        m.v = {num(i + 1), num(i + 2)};
        i += 3;
        if (i < tok.size() && tok[i] == "d") {
          m.d = Point2<Rat>{num(i + 1), num(i + 2)};
          i += 3;
        }
        if (i < tok.size() && tok[i] == "t0") {
          m.t0 = num(i + 1);
          i += 2;
        }
        if (i != tok.size()) fail(line, "unexpected token '" + tok[i] + "'");
        f.instance.riders.push_back(m);
        break;
      }
      case Sec::Walls: {
        if (tok[0] != "w" || tok.size() != 5) fail(line, "wall lines are 'w ax ay bx by'");
        f.instance.walls.push_back({{num(1), num(2)}, {num(3), num(4)}});
        break;
      }
      case Sec::Polygon: {
        if (tok[0] != "ring" || tok.size() < 2) fail(line, "polygon lines are 'ring outer|hole ...'");
        bool outer;
        if (tok[1] == "outer")
          outer = true;
        else if (tok[1] == "hole")
          outer = false;
        else
          fail(line, "ring kind must be 'outer' or 'hole'");
        if ((tok.size() - 2) % 2 != 0) fail(line, "ring needs coordinate pairs");
        std::vector<Point2<Rat>> ring;
        for (size_t i = 2; i + 1 < tok.size(); i += 2) ring.push_back({num(i), num(i + 1)});
        if (ring.size() < 4 || !(ring.front() == ring.back()))
          fail(line, "open polygon ring: repeat the first vertex to close it");
        ring.pop_back();
        rings.push_back(std::move(ring));
        ring_is_outer.push_back(outer);
        break;
      }
    }
  }
  if (!rings.empty()) {
    Polygon<Rat> poly;
    bool have_outer = false;
    for (size_t k = 0; k < rings.size(); ++k) {
      if (ring_is_outer[k]) {
        if (have_outer) throw InvalidInput("duplicate outer ring");
        poly.outer = rings[k];
        have_outer = true;
      } else {
        poly.holes.push_back(rings[k]);
      }
    }
    if (!have_outer) throw InvalidInput("polygon section lacks an outer ring");
    f.polygon = std::move(poly);
    if (!f.instance.riders.empty() || !f.instance.walls.empty())
      throw InvalidInput("a polygon file defines motorcycles and walls implicitly");
  }
  if (f.config.backend == Backend::Exact) {
    auto check = [&](const Rat& r) {
      if (!ioimpl::fits_bits(r, f.config.bit_width))
        throw InvalidInput("literal exceeds the configured bit width");
    };
    for (const auto& m : f.instance.riders) {
      check(m.s.x);
      check(m.s.y);
      check(m.v.x);
      check(m.v.y);
      if (m.d) {
        check(m.d->x);
        check(m.d->y);
      }
      check(m.t0);
    }
    for (const auto& w : f.instance.walls) {
      check(w.a.x);
      check(w.a.y);
      check(w.b.x);
      check(w.b.y);
    }
    if (f.polygon) {
      for (const auto& v : f.polygon->outer) {
        check(v.x);
        check(v.y);
      }
      for (const auto& h : f.polygon->holes)
        for (const auto& v : h) {
          check(v.x);
          check(v.y);
        }
    }
  }
  return f;
}

inline std::string write_instance(const InstanceFile& f) {
  using ioimpl::format_number;
  std::ostringstream out;
  out << "[config]\n";
  out << "backend " << (f.config.backend == Backend::Exact ? "exact" : "float") << "\n";
  out << "w " << f.config.bit_width << "\n";
  out << "halving " << halving_name(f.config.halving) << "\n";
  out << "shooter " << shooter_name(f.config.shooter) << "\n";
  if (f.config.rho) out << "rho " << format_number(*f.config.rho) << "\n";
  if (f.polygon) {
    out << "[polygon]\n";
    auto ring = [&](const char* kind, const std::vector<Point2<Rat>>& r) {
      out << "ring " << kind;
      for (const auto& p : r) out << " " << format_number(p.x) << " " << format_number(p.y);
      out << " " << format_number(r.front().x) << " " << format_number(r.front().y) << "\n";
    };
    ring("outer", f.polygon->outer);
    for (const auto& h : f.polygon->holes) ring("hole", h);
    return out.str();
  }
  out << "[motorcycles]\n";
  for (const auto& m : f.instance.riders) {
    out << "m " << m.id << " s " << format_number(m.s.x) << " " << format_number(m.s.y) << " v "
        << format_number(m.v.x) << " " << format_number(m.v.y);
    if (m.d) out << " d " << format_number(m.d->x) << " " << format_number(m.d->y);
    if (!is_zero(m.t0)) out << " t0 " << format_number(m.t0);
    out << "\n";
  }
  if (!f.instance.walls.empty()) {
    out << "[walls]\n";
    for (const auto& w : f.instance.walls)
      out << "w " << format_number(w.a.x) << " " << format_number(w.a.y) << " "
          << format_number(w.b.x) << " " << format_number(w.b.y) << "\n";
  }
  return out.str();
}

// The instance a file denotes: induced from its polygon when present,
// otherwise the explicit riders and walls; config fields applied either way.
inline Instance<Rat> effective_instance(const InstanceFile& f) {
  Instance<Rat> inst = f.polygon ? induced_instance(*f.polygon) : f.instance;
  inst.bit_width = f.config.bit_width;
  inst.numeric = f.config.backend;
  return inst;
}

namespace ioimpl {

inline std::string fmt_scalar(const Rat& r) { return format_number(r); }
inline std::string fmt_scalar(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string fmt_time(const Rat& r) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", to_double(r));
  return buf;
}
inline std::string fmt_time(double x) { return fmt_scalar(x); }

}  // namespace ioimpl

template <class S>
std::string write_result(const MGResult<S>& res, const EngineStats& st) {
  std::ostringstream out;
  for (const auto& r : res.records) {
    out << "r " << r.id << " " << outcome_name(r.outcome.kind) << " "
        << ioimpl::fmt_scalar(r.kappa.x) << " " << ioimpl::fmt_scalar(r.kappa.y) << " "
        << ioimpl::fmt_scalar(r.t_end);
    if (r.outcome.kind == OutcomeKind::Crashed) out << " into " << r.outcome.other;
    out << "\n";
  }
  out << "stats events " << st.events << " ray-queries " << st.ray_queries
      << " halving-queries " << st.halving_queries << " max-cross-targets "
      << st.max_cross_targets << " spawned " << st.spawned << "\n";
  return out.str();
}

// Arrival time of rider id at a point of its track, if the point lies on
// the forward ray. Used to annotate created targets with their queue keys.
template <class S>
std::optional<S> target_time(const Instance<S>& inst, int id, const Point2<S>& p) {
  const auto& m = inst.riders[static_cast<size_t>(id - 1)];
  auto lam = ray_param(m, p);
  if (!lam) return std::nullopt;
  return m.t0 + *lam;
}

// One line per processed event; times are decimal for readability, points
// exact on the exact backend. Record order is processing order, which is
// deliberately not chronological. A start record announces the rider's
// destination target first, so every queued target appears in the log with
// its arrival time even if the rider never survives to process it.
template <class S>
std::string trace_line(const Instance<S>& inst, const TraceEvent<S>& ev) {
  std::ostringstream out;
  out << "ev t=" << ioimpl::fmt_time(ev.time) << " m=" << ev.rider << " p=("
      << ioimpl::fmt_scalar(ev.point.x) << "," << ioimpl::fmt_scalar(ev.point.y) << ")"
      << " kind=" << target_kind_name(ev.kind) << " case=" << event_case_name(ev.what);
  out << " new=[";
  auto entry = [&](int id, const Point2<S>& p, bool first) {
    if (!first) out << " ";
    out << id << ":(" << ioimpl::fmt_scalar(p.x) << "," << ioimpl::fmt_scalar(p.y) << ")";
    auto t = target_time(inst, id, p);
    if (t) out << "@" << ioimpl::fmt_time(*t);
  };
  bool first = true;
  if (ev.kind == TargetKind::StartPt) {
    const auto& m = inst.riders[static_cast<size_t>(ev.rider - 1)];
    bool already = false;
    for (const auto& c : ev.created)
      if (m.d && c.first == ev.rider && c.second == *m.d) already = true;
    if (m.d && !already) {
      entry(ev.rider, *m.d, first);
      first = false;
    }
  }
  for (const auto& c : ev.created) {
    entry(c.first, c.second, first);
    first = false;
  }
  out << "]";
  return out.str();
}

template <class S>
std::string write_trace(const Instance<S>& inst, const std::vector<TraceEvent<S>>& events) {
  std::string out;
  for (const auto& ev : events) {
    out += trace_line(inst, ev);
    out += "\n";
  }
  return out;
}

}  // namespace moto
