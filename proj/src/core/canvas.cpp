#include "canvas.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "text.hpp"

namespace ppg {

namespace {

void require_finite(std::initializer_list<double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::range_violation, std::string(what) + ": coordinate is not finite");
  }
}

void require_range(std::int64_t v, std::int64_t lo, std::int64_t hi, const char* field) {
  if (v < lo || v > hi) {
    fail(ErrorKind::range_violation, std::string(field) + " " + std::to_string(v) + " outside " +
                                         std::to_string(lo) + ".." + std::to_string(hi));
  }
}

void require_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) {
    fail(ErrorKind::range_violation, std::string(what) + " must be positive, got " + format_shortest(v));
  }
}

void require_non_negative(double v, const char* what) {
  if (!(v >= 0) || !std::isfinite(v)) {
    fail(ErrorKind::range_violation, std::string(what) + " must be non-negative, got " + format_shortest(v));
  }
}

void validate_font(double height, double slant, double width) {
  require_positive(height, "font height");
  if (!std::isfinite(slant) || std::fabs(slant) >= 90) {
    fail(ErrorKind::range_violation, "font slant " + format_shortest(slant) + " outside (-90, 90)");
  }
  if (!(width > 0 && width <= 2)) {
    fail(ErrorKind::range_violation, "font width factor " + format_shortest(width) + " outside (0, 2]");
  }
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }
bool same_point(Point a, Point b) { return same_bits(a.x, b.x) && same_bits(a.y, b.y); }

void translate(Point& p, Point d) {
  p.x += d.x;
  p.y += d.y;
}

}  // namespace

void validate_attribute(const Attribute& a) {
  require_range(a.layer, 0, 255, "слой");
  require_range(a.color, 0, 15, "цвет");
  require_range(a.line_type, 0, 6, "тип линии");
  require_range(a.units, 0, 1, "система отсчета");
}

const char* shape_name(const Shape& s) {
  static const char* const kNames[] = {"segment", "rectangle", "arc", "polyline", "text",
                                       "dimension", "height-mark", "pipe-break", "arc-break"};
  return kNames[s.index()];
}

bool same_element(const Element& a, const Element& b) {
  if (a.id != b.id || !(a.attribute == b.attribute) || !(a.scale == b.scale) || a.removed != b.removed) return false;
  if (a.shape.index() != b.shape.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.shape);
        if constexpr (std::is_same_v<T, SegmentShape>) {
          return same_point(x.p1, y.p1) && same_point(x.p2, y.p2);
        } else if constexpr (std::is_same_v<T, RectangleShape>) {
          return same_point(x.origin, y.origin) && same_bits(x.width, y.width) && same_bits(x.height, y.height);
        } else if constexpr (std::is_same_v<T, ArcShape>) {
          return same_point(x.center, y.center) && same_bits(x.radius, y.radius) && same_bits(x.angle1, y.angle1) &&
                 same_bits(x.angle2, y.angle2);
        } else if constexpr (std::is_same_v<T, PolylineShape>) {
          if (x.points.size() != y.points.size()) return false;
          for (std::size_t i = 0; i < x.points.size(); ++i) {
            if (!same_point(x.points[i], y.points[i])) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, TextShape>) {
          return same_point(x.anchor, y.anchor) && x.lines == y.lines && x.style == y.style;
        } else if constexpr (std::is_same_v<T, DimensionShape>) {
          return x.orientation == y.orientation && same_point(x.p1, y.p1) && same_point(x.p2, y.p2) &&
                 same_bits(x.offset, y.offset) && x.text == y.text && x.style == y.style;
        } else if constexpr (std::is_same_v<T, HeightMarkShape>) {
          return same_point(x.point, y.point) && x.text == y.text && x.style == y.style;
        } else if constexpr (std::is_same_v<T, PipeBreakShape>) {
          return same_point(x.center, y.center) && same_bits(x.angle, y.angle) && same_bits(x.size, y.size);
        } else {
          return same_point(x.p1, y.p1) && same_point(x.p2, y.p2) && same_bits(x.sagitta, y.sagitta);
        }
      },
      a.shape);
}

void Canvas::set_attribute(const Attribute& a) {
  validate_attribute(a);
  settings_.attribute = a;
}

void Canvas::set_scale(Scale s) {
  if (s.num < 1 || s.den < 1) {
    fail(ErrorKind::range_violation,
         "scale " + std::to_string(s.num) + ":" + std::to_string(s.den) + " must have both terms >= 1");
  }
  settings_.scale = s;
}

void Canvas::set_dim_precision(std::int64_t digits) {
  require_range(digits, 0, 6, "точность");
  settings_.dimension.precision = static_cast<int>(digits);
}

void Canvas::set_dim_extension(double gap, double extension, double overhang) {
  require_non_negative(gap, "extension gap");
  require_non_negative(extension, "extension length");
  require_non_negative(overhang, "overhang");
  settings_.dimension.gap = gap;
  settings_.dimension.extension = extension;
  settings_.dimension.overhang = overhang;
}

void Canvas::set_dim_font(double height, double slant, double width) {
  validate_font(height, slant, width);
  settings_.dimension.font = {height, slant, width};
}

void Canvas::set_dim_arrows(double length1, double ratio1, double length2, double ratio2) {
  require_positive(length1, "arrow length");
  require_positive(ratio1, "arrow ratio");
  require_positive(length2, "arrow length");
  require_positive(ratio2, "arrow ratio");
  auto& d = settings_.dimension;
  d.arrow_length1 = length1;
  d.arrow_ratio1 = ratio1;
  d.arrow_length2 = length2;
  d.arrow_ratio2 = ratio2;
}

void Canvas::set_dim_leaders(bool on) { settings_.dimension.leaders = on; }
void Canvas::set_text_leader(bool on) { settings_.text.leader = on; }

void Canvas::set_text_font(double height, double slant, double width, double line_step) {
  validate_font(height, slant, width);
  require_positive(line_step, "line step");
  settings_.text.font = {height, slant, width};
  settings_.text.line_step = line_step;
}

int Canvas::append(const Attribute& a, Shape shape) {
  validate_attribute(a);
  if (elements_.size() >= element_limit_) {
    fail(ErrorKind::range_violation, "canvas element limit " + std::to_string(element_limit_) + " reached");
  }
  Element e;
  e.id = next_id_++;
  e.attribute = a;
  e.scale = settings_.scale;
  e.shape = std::move(shape);
  elements_.push_back(std::move(e));
  batch_.push_back(elements_.back().id);
  return elements_.back().id;
}

int Canvas::add_segment(const Attribute& a, Point p1, Point p2) {
  require_finite({p1.x, p1.y, p2.x, p2.y}, "Отрез");
  return append(a, SegmentShape{p1, p2});
}

int Canvas::add_rectangle(const Attribute& a, Point origin, double width, double height) {
  require_finite({origin.x, origin.y, width, height}, "Прямоуг");
  require_positive(width, "rectangle width");
  require_positive(height, "rectangle height");
  return append(a, RectangleShape{origin, width, height});
}

int Canvas::add_arc(const Attribute& a, Point center, double radius, double angle1, double angle2) {
  require_finite({center.x, center.y, radius, angle1, angle2}, "ДугаОкружн");
  require_positive(radius, "arc radius");
  return append(a, ArcShape{center, radius, angle1, angle2});
}

int Canvas::add_polyline(const Attribute& a, std::vector<Point> points) {
  if (points.size() > 16) {
    fail(ErrorKind::range_violation, "polyline has " + std::to_string(points.size()) + " points, at most 16 allowed");
  }
  for (const auto& p : points) require_finite({p.x, p.y}, "polyline");
  return append(a, PolylineShape{std::move(points)});
}

std::string dimension_text(Orientation o, Point p1, Point p2, int precision) {
  double d = o == Orientation::horizontal ? std::fabs(p2.x - p1.x) : std::fabs(p2.y - p1.y);
  return format_fixed(d, precision);
}

int Canvas::add_linear_dim(const Attribute& a, Orientation o, Point p1, Point p2, double offset) {
  require_finite({p1.x, p1.y, p2.x, p2.y, offset}, "linear dimension");
  double extent = o == Orientation::horizontal ? p2.x - p1.x : p2.y - p1.y;
  if (extent == 0) fail(ErrorKind::range_violation, "dimension has zero extent along its axis");
  DimensionShape s;
  s.orientation = o;
  s.p1 = p1;
  s.p2 = p2;
  s.offset = offset;
  s.style = settings_.dimension;
  s.text = dimension_text(o, p1, p2, s.style.precision);
  return append(a, std::move(s));
}

std::pair<int, int> Canvas::add_dim_frame(const Attribute& a, Point origin, double width, double height,
                                          double offset) {
  require_finite({origin.x, origin.y, width, height, offset}, "РамкаРазм");
  require_positive(width, "frame width");
  require_positive(height, "frame height");
  validate_attribute(a);
  int h = add_linear_dim(a, Orientation::horizontal, origin, {origin.x + width, origin.y}, -offset);
  int v = add_linear_dim(a, Orientation::vertical, origin, {origin.x, origin.y + height}, -offset);
  return {h, v};
}

void Canvas::begin_text(std::string first_line) { pending_text_ = std::vector<std::string>{std::move(first_line)}; }

void Canvas::append_line(std::string line) {
  if (!pending_text_) fail(ErrorKind::domain_error, "ДобСтроку without НачатьТекст");
  pending_text_->push_back(std::move(line));
}

int Canvas::commit_text(const Attribute& a, Point anchor) {
  if (!pending_text_) fail(ErrorKind::domain_error, "text placement without НачатьТекст");
  require_finite({anchor.x, anchor.y}, "text");
  TextShape s{anchor, *pending_text_, settings_.text};
  int id = append(a, std::move(s));
  pending_text_.reset();
  return id;
}

double Canvas::string_width(const std::string& s) const {
  const auto& f = settings_.text.font;
  return static_cast<double>(utf8_length(s)) * f.height * f.width * 0.6;
}

int Canvas::add_height_mark(const Attribute& a, Point p, std::string level_text) {
  require_finite({p.x, p.y}, "ОтмВысоты");
  return append(a, HeightMarkShape{p, std::move(level_text), settings_.text});
}

int Canvas::add_pipe_break(const Attribute& a, Point center, double angle, double size) {
  require_finite({center.x, center.y, angle, size}, "ОбрывТрубы");
  require_positive(size, "break size");
  return append(a, PipeBreakShape{center, angle, size});
}

int Canvas::add_arc_break(const Attribute& a, Point p1, Point p2, double sagitta) {
  require_finite({p1.x, p1.y, p2.x, p2.y, sagitta}, "ОбрывПоДуге");
  if (p1 == p2) fail(ErrorKind::range_violation, "arc break end points coincide");
  if (sagitta == 0) fail(ErrorKind::range_violation, "arc break sagitta is zero");
  return append(a, ArcBreakShape{p1, p2, sagitta});
}

void Canvas::remove_element(int id) {
  for (auto& e : elements_) {
    if (e.id == id) {
      if (e.removed) fail(ErrorKind::range_violation, "element " + std::to_string(id) + " already removed");
      e.removed = true;
      return;
    }
  }
  fail(ErrorKind::range_violation, "no element with id " + std::to_string(id));
}

const Element* Canvas::find(int id) const {
  for (const auto& e : elements_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::size_t Canvas::visible_count() const {
  std::size_t n = 0;
  for (const auto& e : elements_) n += e.removed ? 0 : 1;
  return n;
}

void Canvas::finalize_placement(std::span<const int> ids, Point offset, std::optional<std::int64_t> color) {
  if (color) require_range(*color, 0, 15, "цвет");
  for (int id : ids) {
    if (!find(id)) fail(ErrorKind::range_violation, "no element with id " + std::to_string(id));
  }
  for (auto& e : elements_) {
    bool in_batch = false;
    for (int id : ids) in_batch = in_batch || id == e.id;
    if (!in_batch) continue;
    if (color) e.attribute.color = *color;
    std::visit(
        [&](auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, SegmentShape> || std::is_same_v<T, ArcBreakShape>) {
            translate(s.p1, offset);
            translate(s.p2, offset);
          } else if constexpr (std::is_same_v<T, DimensionShape>) {
            translate(s.p1, offset);
            translate(s.p2, offset);
          } else if constexpr (std::is_same_v<T, RectangleShape>) {
            translate(s.origin, offset);
          } else if constexpr (std::is_same_v<T, ArcShape> || std::is_same_v<T, PipeBreakShape>) {
            translate(s.center, offset);
          } else if constexpr (std::is_same_v<T, PolylineShape>) {
            for (auto& p : s.points) translate(p, offset);
          } else if constexpr (std::is_same_v<T, TextShape>) {
            translate(s.anchor, offset);
          } else {
            translate(s.point, offset);
          }
        },
        e.shape);
  }
}

ArcShape arc_through(Point p1, Point p2, double sagitta) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double dx = p2.x - p1.x;
  double dy = p2.y - p1.y;
  double chord = std::hypot(dx, dy);
  Point normal{-dy / chord, dx / chord};
  Point mid{(p1.x + p2.x) / 2, (p1.y + p2.y) / 2};
  double s = std::fabs(sagitta);
  double radius = (chord * chord / 4 + s * s) / (2 * s);
  double along = sagitta - std::copysign(radius, sagitta);
  Point center{mid.x + normal.x * along, mid.y + normal.y * along};
  Point apex{mid.x + normal.x * sagitta, mid.y + normal.y * sagitta};

  auto angle_of = [&](Point p) { return std::atan2(p.y - center.y, p.x - center.x); };
  auto ccw = [&](double from, double to) { return std::fmod(to - from + 2 * two_pi, two_pi); };
  double a1 = angle_of(p1);
  double a2 = angle_of(p2);
  double sweep = ccw(a1, a2);
  if (ccw(a1, angle_of(apex)) < sweep) return ArcShape{center, radius, a1, a1 + sweep};
  return ArcShape{center, radius, a2, a2 + (two_pi - sweep)};
}

std::vector<Point> pipe_break_points(Point center, double angle, double size) {
  constexpr int kSegments = 12;
  std::vector<Point> pts;
  pts.reserve(kSegments + 1);
  double c = std::cos(angle);
  double s = std::sin(angle);
  for (int i = 0; i <= kSegments; ++i) {
    double u = -size / 2 + size * i / kSegments;
    double v = size / 4 * std::sin(2 * std::numbers::pi * i / kSegments);
    pts.push_back({center.x + u * c - v * s, center.y + u * s + v * c});
  }
  return pts;
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(ch);
  }
  return out + "\"";
}

std::string pt(Point p) { return format_shortest(p.x) + "," + format_shortest(p.y); }

}  // namespace

std::string dump_canvas(const Canvas& canvas) {
  const auto& s = canvas.settings();
  std::string out = "ppg-canvas 1\n";
  out += "scale " + std::to_string(s.scale.num) + ":" + std::to_string(s.scale.den) + "\n";
  for (const auto& e : canvas.elements()) {
    const auto& a = e.attribute;
    out += std::to_string(e.id) + " " + shape_name(e.shape) + " layer=" + std::to_string(a.layer) +
           " color=" + std::to_string(a.color) + " ltype=" + std::to_string(a.line_type) +
           " units=" + std::to_string(a.units) + " scale=" + std::to_string(e.scale.num) + ":" +
           std::to_string(e.scale.den);
    std::visit(
        [&](const auto& sh) {
          using T = std::decay_t<decltype(sh)>;
          if constexpr (std::is_same_v<T, SegmentShape>) {
            out += " p1=" + pt(sh.p1) + " p2=" + pt(sh.p2);
          } else if constexpr (std::is_same_v<T, RectangleShape>) {
            out += " origin=" + pt(sh.origin) + " size=" + format_shortest(sh.width) + "," +
                   format_shortest(sh.height);
          } else if constexpr (std::is_same_v<T, ArcShape>) {
            out += " center=" + pt(sh.center) + " r=" + format_shortest(sh.radius) +
                   " angles=" + format_shortest(sh.angle1) + "," + format_shortest(sh.angle2);
          } else if constexpr (std::is_same_v<T, PolylineShape>) {
            out += " points=";
            for (std::size_t i = 0; i < sh.points.size(); ++i) out += (i ? ";" : "") + pt(sh.points[i]);
          } else if constexpr (std::is_same_v<T, TextShape>) {
            out += " anchor=" + pt(sh.anchor) + " lines=";
            for (std::size_t i = 0; i < sh.lines.size(); ++i) out += (i ? "," : "") + quoted(sh.lines[i]);
          } else if constexpr (std::is_same_v<T, DimensionShape>) {
            out += std::string(" axis=") + (sh.orientation == Orientation::horizontal ? "h" : "v") +
                   " p1=" + pt(sh.p1) + " p2=" + pt(sh.p2) + " offset=" + format_shortest(sh.offset) +
                   " text=" + quoted(sh.text);
          } else if constexpr (std::is_same_v<T, HeightMarkShape>) {
            out += " point=" + pt(sh.point) + " text=" + quoted(sh.text);
          } else if constexpr (std::is_same_v<T, PipeBreakShape>) {
            out += " center=" + pt(sh.center) + " angle=" + format_shortest(sh.angle) +
                   " size=" + format_shortest(sh.size);
          } else {
            out += " p1=" + pt(sh.p1) + " p2=" + pt(sh.p2) + " sagitta=" + format_shortest(sh.sagitta);
          }
        },
        e.shape);
    if (e.removed) out += " removed";
    out += "\n";
  }
  return out;
}

}  // namespace ppg
