#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "text.hpp"

namespace ppg {

namespace {

constexpr const char* kPalette[16] = {"#000000", "#0000AA", "#00AA00", "#00AAAA", "#AA0000", "#AA00AA",
                                      "#AA5500", "#AAAAAA", "#555555", "#5555FF", "#55FF55", "#55FFFF",
                                      "#FF5555", "#FF55FF", "#FFFF55", "#FFFFFF"};

struct LineStyle {
  bool thick;
  const char* dash;  // nullptr: solid
};

LineStyle line_style(std::int64_t type) {
  switch (type) {
    case 0: return {true, nullptr};                // Сплош_осн
    case 1: return {false, nullptr};               // Сплош_тонк
    case 2: return {true, "4,1.5"};                // Штрих_утол
    case 3: return {false, "4,1.5"};               // Штриховая
    case 4: return {false, "8,1.5,1,1.5"};         // Пункт_тонк
    case 5: return {true, "8,1.5,1,1.5"};          // Пункт_утол
    case 6: return {false, "12,3"};                // Разомкнутая
    default: return {false, nullptr};
  }
}

std::string num(double v) { return format_fixed(v, 3); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

/// Accumulates element markup and the paper-space bounding box.
class Renderer {
 public:
  Renderer(const Canvas& canvas, const RenderOptions& opts) : canvas_(canvas), opts_(opts) {}

  std::string run() {
    for (const auto& e : canvas_.elements()) {
      if (!e.removed) element(e);
    }
    double minx = -opts_.margin, miny = -opts_.margin, w = 2 * opts_.margin, h = 2 * opts_.margin;
    if (lo_.x <= hi_.x) {
      minx = lo_.x - opts_.margin;
      miny = -hi_.y - opts_.margin;
      w = hi_.x - lo_.x + 2 * opts_.margin;
      h = hi_.y - lo_.y + 2 * opts_.margin;
    }
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(w) + "mm\" height=\"" + num(h) +
           "mm\" viewBox=\"" + num(minx) + " " + num(miny) + " " + num(w) + " " + num(h) + "\">\n";
    if (opts_.background) {
      out += "<path d=\"M" + num(minx) + " " + num(miny) + " h" + num(w) + " v" + num(h) + " h" + num(-w) +
             " Z\" fill=\"#FFFFFF\" stroke=\"none\"/>\n";
    }
    out += body_;
    out += "</svg>\n";
    return out;
  }

 private:
  // Paper-space point (Y up) to SVG attribute text.
  std::string xy(Point p, const char* xa = "x", const char* ya = "y") {
    touch(p);
    return std::string(xa) + "=\"" + num(p.x) + "\" " + ya + "=\"" + num(-p.y) + "\"";
  }
  std::string pair(Point p) {
    touch(p);
    return num(p.x) + "," + num(-p.y);
  }
  void touch(Point p) {
    lo_.x = std::min(lo_.x, p.x);
    lo_.y = std::min(lo_.y, p.y);
    hi_.x = std::max(hi_.x, p.x);
    hi_.y = std::max(hi_.y, p.y);
  }

  void line(Point a, Point b) { body_ += "  <line " + xy(a, "x1", "y1") + " " + xy(b, "x2", "y2") + "/>\n"; }

  void polyline(const std::vector<Point>& pts, bool closed = false, bool filled = false) {
    std::string s;
    for (const auto& p : pts) s += (s.empty() ? "" : " ") + pair(p);
    body_ += std::string("  <") + (closed ? "polygon" : "polyline") + " points=\"" + s + "\"" +
             (filled ? " fill=\"currentColor\"" : "") + "/>\n";
  }

  void arc(Point c, double r, double a1, double a2) {
    double sweep = a2 - a1;
    if (std::fabs(sweep) >= 2 * std::numbers::pi - 1e-12) {
      touch({c.x - r, c.y - r});
      touch({c.x + r, c.y + r});
      body_ += "  <circle cx=\"" + num(c.x) + "\" cy=\"" + num(-c.y) + "\" r=\"" + num(r) + "\"/>\n";
      return;
    }
    if (sweep < 0) std::swap(a1, a2), sweep = -sweep;
    for (int i = 0; i <= 32; ++i) {
      double a = a1 + sweep * i / 32;
      touch({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    Point s{c.x + r * std::cos(a1), c.y + r * std::sin(a1)};
    Point e{c.x + r * std::cos(a2), c.y + r * std::sin(a2)};
    body_ += "  <path d=\"M" + num(s.x) + " " + num(-s.y) + " A" + num(r) + " " + num(r) + " 0 " +
             (sweep > std::numbers::pi ? "1" : "0") + " 0 " + num(e.x) + " " + num(-e.y) + "\"/>\n";
  }

  void text(Point at, const std::string& s, const FontSettings& f, double rotate_deg = 0, const char* anchor = nullptr) {
    double width = static_cast<double>(utf8_length(s)) * f.height * f.width * 0.6;
    double x0 = anchor ? at.x - width / 2 : at.x;
    if (rotate_deg == 0) {
      touch({x0, at.y});
      touch({x0 + width, at.y + f.height});
    } else {
      touch({at.x - f.height, at.y - width / 2});
      touch({at.x, at.y + width / 2});
    }
    std::string attrs = xy(at) + " font-family=\"monospace\" font-size=\"" + num(f.height) + "\" stroke=\"none\"" +
                        " fill=\"currentColor\"";
    if (anchor) attrs += std::string(" text-anchor=\"") + anchor + "\"";
    if (width > 0) attrs += " textLength=\"" + num(width) + "\" lengthAdjust=\"spacingAndGlyphs\"";
    if (rotate_deg != 0) attrs += " transform=\"rotate(" + num(rotate_deg) + " " + num(at.x) + " " + num(-at.y) + ")\"";
    body_ += "  <text " + attrs + ">" + escape(s) + "</text>\n";
  }

  void arrow(Point tip, Point dir, double length, double ratio) {
    double half = length / ratio / 2;
    Point base{tip.x + dir.x * length, tip.y + dir.y * length};
    Point n{-dir.y, dir.x};
    polyline({tip, {base.x + n.x * half, base.y + n.y * half}, {base.x - n.x * half, base.y - n.y * half}}, true, true);
  }

  void dimension(const DimensionShape& d, double f) {
    const auto& st = d.style;
    bool horiz = d.orientation == Orientation::horizontal;
    Point p1{d.p1.x * f, d.p1.y * f};
    Point p2{d.p2.x * f, d.p2.y * f};
    // Axis coordinate u runs along the measurement, v across it.
    auto mk = [&](double u, double v) { return horiz ? Point{u, v} : Point{v, u}; };
    double u1 = horiz ? p1.x : p1.y, u2 = horiz ? p2.x : p2.y;
    double v1 = horiz ? p1.y : p1.x, v2 = horiz ? p2.y : p2.x;
    double vd = v1 + d.offset * f;
    for (auto [u, v] : {std::pair{u1, v1}, std::pair{u2, v2}}) {
      double dir = vd >= v ? 1.0 : -1.0;
      line(mk(u, v + dir * st.gap), mk(u, vd + dir * st.extension));
    }
    double s = u2 > u1 ? 1.0 : -1.0;
    line(mk(u1 - s * st.overhang, vd), mk(u2 + s * st.overhang, vd));
    arrow(mk(u1, vd), mk(s, 0), st.arrow_length1, st.arrow_ratio1);
    arrow(mk(u2, vd), mk(-s, 0), st.arrow_length2, st.arrow_ratio2);
    double um = (u1 + u2) / 2;
    if (horiz) {
      text(mk(um, vd + 1.0), d.text, st.font, 0, "middle");
    } else {
      text(mk(um, vd - 1.0), d.text, st.font, -90, "middle");
    }
  }

  void element(const Element& e) {
    const auto& a = e.attribute;
    double f = a.units == 0 ? e.scale.factor() : 1.0;
    auto scaled = [f](Point p) { return Point{p.x * f, p.y * f}; };
    LineStyle ls = line_style(a.line_type);
    const char* color = palette_color(a.color);
    body_ += "<g id=\"e" + std::to_string(e.id) + "\" stroke=\"" + color + "\" color=\"" + color +
             "\" fill=\"none\" stroke-width=\"" + num(ls.thick ? opts_.thick_width : opts_.thin_width) + "\"";
    if (ls.dash) body_ += std::string(" stroke-dasharray=\"") + ls.dash + "\"";
    body_ += ">\n";
    std::visit(
        [&](const auto& sh) {
          using T = std::decay_t<decltype(sh)>;
          if constexpr (std::is_same_v<T, SegmentShape>) {
            line(scaled(sh.p1), scaled(sh.p2));
          } else if constexpr (std::is_same_v<T, RectangleShape>) {
            Point o = scaled(sh.origin);
            double w = sh.width * f, h = sh.height * f;
            touch(o);
            touch({o.x + w, o.y + h});
            body_ += "  <rect x=\"" + num(o.x) + "\" y=\"" + num(-(o.y + h)) + "\" width=\"" + num(w) +
                     "\" height=\"" + num(h) + "\"/>\n";
          } else if constexpr (std::is_same_v<T, ArcShape>) {
            arc(scaled(sh.center), sh.radius * f, sh.angle1, sh.angle2);
          } else if constexpr (std::is_same_v<T, PolylineShape>) {
            std::vector<Point> pts;
            for (const auto& p : sh.points) pts.push_back(scaled(p));
            polyline(pts);
          } else if constexpr (std::is_same_v<T, TextShape>) {
            Point at = scaled(sh.anchor);
            for (std::size_t i = 0; i < sh.lines.size(); ++i) {
              text({at.x, at.y - static_cast<double>(i) * sh.style.line_step}, sh.lines[i], sh.style.font);
            }
          } else if constexpr (std::is_same_v<T, DimensionShape>) {
            dimension(sh, f);
          } else if constexpr (std::is_same_v<T, HeightMarkShape>) {
            Point p = scaled(sh.point);
            const double leg = 3.0 / std::numbers::sqrt2;
            Point right{p.x + leg, p.y + leg};
            polyline({p, {p.x - leg, p.y + leg}, right}, true);
            const auto& font = sh.style.font;
            double shelf = std::max(3.0, static_cast<double>(utf8_length(sh.text)) * font.height * font.width * 0.6);
            line(right, {right.x + shelf, right.y});
            text({right.x, right.y + 0.5}, sh.text, font);
          } else if constexpr (std::is_same_v<T, PipeBreakShape>) {
            polyline(pipe_break_points(scaled(sh.center), sh.angle, sh.size * f));
          } else {
            ArcShape s = arc_through(scaled(sh.p1), scaled(sh.p2), sh.sagitta * f);
            arc(s.center, s.radius, s.angle1, s.angle2);
          }
        },
        e.shape);
    body_ += "</g>\n";
  }

  const Canvas& canvas_;
  const RenderOptions& opts_;
  std::string body_;
  Point lo_{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point hi_{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
};

}  // namespace

const char* palette_color(std::int64_t index) {
  if (index < 0 || index > 15) return kPalette[0];
  return kPalette[index];
}

std::string render_svg(const Canvas& canvas, const RenderOptions& options) {
  return Renderer(canvas, options).run();
}

}  // namespace ppg
