#pragma once

// Deterministic SVG rendering of instances, results, and live engine state.
// Output depends only on the input values: fixed palette, fixed precision,
// fixed element order (walls, then riders by id).

#include <cstdio>
#include <string>
#include <vector>

#include "moto/mg_core.hpp"
#include "moto/result.hpp"

namespace moto {

namespace svgimpl {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline const char* palette(int id) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                 "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
  return colors[static_cast<size_t>(id) % (sizeof colors / sizeof colors[0])];
}

struct Box {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool any = false;
  void add(double x, double y) {
    if (!any) {
      x0 = x1 = x;
      y0 = y1 = y;
      any = true;
      return;
    }
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
};

// Maps world coordinates to an 800-wide canvas with a 5% margin and the
// y axis pointing up.
class Canvas {
 public:
  explicit Canvas(Box b) {
    if (!b.any) b.add(0, 0);
    double w = b.x1 - b.x0, h = b.y1 - b.y0;
    if (w <= 0) w = 1;
    if (h <= 0) h = 1;
    double margin = 0.05 * std::max(w, h);
    b.x0 -= margin;
    b.x1 += margin;
    b.y0 -= margin;
    b.y1 += margin;
    scale_ = 800.0 / (b.x1 - b.x0);
    width_ = 800.0;
    height_ = scale_ * (b.y1 - b.y0);
    ox_ = b.x0;
    oy_ = b.y1;
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
             "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
             num(height_) + "\">\n";
    body_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  double px(double x) const { return (x - ox_) * scale_; }
  double py(double y) const { return (oy_ - y) * scale_; }

  void line(double ax, double ay, double bx, double by, const std::string& color, double w,
            bool dashed) {
    body_ += "<line x1=\"" + num(px(ax)) + "\" y1=\"" + num(py(ay)) + "\" x2=\"" + num(px(bx)) +
             "\" y2=\"" + num(py(by)) + "\" stroke=\"" + color + "\" stroke-width=\"" + num(w) +
             "\"";
    if (dashed) body_ += " stroke-dasharray=\"6 4\"";
    body_ += "/>\n";
  }

  void dot(double x, double y, const std::string& color, double r) {
    body_ += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"" + num(r) +
             "\" fill=\"" + color + "\"/>\n";
  }

  void cross_marker(double x, double y, const std::string& color) {
    double s = 5;
    double cx = px(x), cy = py(y);
    body_ += "<path d=\"M" + num(cx - s) + " " + num(cy - s) + " L" + num(cx + s) + " " +
             num(cy + s) + " M" + num(cx - s) + " " + num(cy + s) + " L" + num(cx + s) + " " +
             num(cy - s) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
  }

  std::string finish() && { return std::move(body_) + "</svg>\n"; }

 private:
  std::string body_;
  double scale_ = 1, width_ = 0, height_ = 0, ox_ = 0, oy_ = 0;
};

template <class S>
Box instance_box(const Instance<S>& inst) {
  Box b;
  for (const auto& m : inst.riders) {
    b.add(to_double(m.s.x), to_double(m.s.y));
    if (m.d) b.add(to_double(m.d->x), to_double(m.d->y));
  }
  for (const auto& w : inst.walls) {
    b.add(to_double(w.a.x), to_double(w.a.y));
    b.add(to_double(w.b.x), to_double(w.b.y));
  }
  return b;
}

template <class S>
void draw_walls(Canvas& c, const Instance<S>& inst) {
  for (const auto& w : inst.walls)
    c.line(to_double(w.a.x), to_double(w.a.y), to_double(w.b.x), to_double(w.b.y), "#333333",
           3.0, false);
}

}  // namespace svgimpl

// Final picture: every rider's realized track from start to final point,
// with a cross marker where a rider crashed or hit a wall.
template <class S>
std::string render_result_svg(const Instance<S>& inst, const MGResult<S>& res) {
  svgimpl::Box box = svgimpl::instance_box(inst);
  for (const auto& r : res.records) box.add(to_double(r.kappa.x), to_double(r.kappa.y));
  svgimpl::Canvas c(box);
  svgimpl::draw_walls(c, inst);
  for (const auto& r : res.records) {
    const auto& m = inst.riders[static_cast<size_t>(r.id - 1)];
    const char* col = svgimpl::palette(r.id);
    c.line(to_double(m.s.x), to_double(m.s.y), to_double(r.kappa.x), to_double(r.kappa.y), col,
           1.5, false);
    c.dot(to_double(m.s.x), to_double(m.s.y), col, 3.0);
    if (r.outcome.kind == OutcomeKind::Crashed || r.outcome.kind == OutcomeKind::HitWall)
      c.cross_marker(to_double(r.kappa.x), to_double(r.kappa.y), col);
  }
  return std::move(c).finish();
}

// Mid-run snapshot: confirmed prefixes solid, live tentative extensions
// dashed, markers on riders that already stopped.
template <class S>
std::string render_state_svg(const MotorcycleEngine<S>& eng) {
  const Instance<S>& inst = eng.instance();
  svgimpl::Box box = svgimpl::instance_box(eng.instance());
  for (const auto& m : inst.riders) {
    box.add(to_double(eng.confirmed_of(m.id).x), to_double(eng.confirmed_of(m.id).y));
    if (eng.alive(m.id))
      box.add(to_double(eng.tentative_of(m.id).x), to_double(eng.tentative_of(m.id).y));
  }
  svgimpl::Canvas c(box);
  svgimpl::draw_walls(c, inst);
  for (const auto& m : inst.riders) {
    const char* col = svgimpl::palette(m.id);
    Point2<S> conf = eng.confirmed_of(m.id);
    c.line(to_double(m.s.x), to_double(m.s.y), to_double(conf.x), to_double(conf.y), col, 1.5,
           false);
    c.dot(to_double(m.s.x), to_double(m.s.y), col, 3.0);
    if (eng.alive(m.id)) {
      Point2<S> tent = eng.tentative_of(m.id);
      c.line(to_double(conf.x), to_double(conf.y), to_double(tent.x), to_double(tent.y), col,
             1.0, true);
    } else {
      c.cross_marker(to_double(conf.x), to_double(conf.y), col);
    }
  }
  return std::move(c).finish();
}

}  // namespace moto
