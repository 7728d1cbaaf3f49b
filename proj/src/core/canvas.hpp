#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ppg {

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Layer, color, line type and unit system stamped on every element.
struct Attribute {
  std::int64_t layer = 0;      // 0..255
  std::int64_t color = 0;      // 0..15
  std::int64_t line_type = 0;  // 0..6
  std::int64_t units = 0;      // 0 = Натура (model), 1 = Бумага (paper)
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Throws RuntimeError(range_violation) naming the first field out of range.
void validate_attribute(const Attribute& a);

/// Drawing scale num:den; paper length = model length * num / den.
struct Scale {
  std::int64_t num = 1;
  std::int64_t den = 1;
  double factor() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Scale&, const Scale&) = default;
};

struct FontSettings {
  double height = 3.5;  // mm
  double slant = 0;     // degrees
  double width = 1.0;   // width factor
  friend bool operator==(const FontSettings&, const FontSettings&) = default;
};

struct DimensionSettings {
  int precision = 2;
  double gap = 1.0;        // measured point to extension line start, mm
  double extension = 2.0;  // extension line beyond the dimension line, mm
  double overhang = 0.0;   // dimension line beyond the extension lines, mm
  FontSettings font;
  double arrow_length1 = 3.0;
  double arrow_ratio1 = 1.4142135623730951;
  double arrow_length2 = 3.0;
  double arrow_ratio2 = 1.4142135623730951;
  bool leaders = false;
  friend bool operator==(const DimensionSettings&, const DimensionSettings&) = default;
};

struct TextSettings {
  bool leader = false;
  FontSettings font;
  double line_step = 5.0;  // mm between baselines
  friend bool operator==(const TextSettings&, const TextSettings&) = default;
};

/// Defaults that drawing operations read; snapshotted and restored around runs.
struct GlobalSettings {
  Attribute attribute;
  Scale scale;
  DimensionSettings dimension;
  TextSettings text;
  friend bool operator==(const GlobalSettings&, const GlobalSettings&) = default;
};

enum class Orientation { horizontal, vertical };

struct SegmentShape {
  Point p1, p2;
};
struct RectangleShape {
  Point origin;
  double width = 0, height = 0;
};
struct ArcShape {
  Point center;
  double radius = 0, angle1 = 0, angle2 = 0;  // radians, counter-clockwise
};
struct PolylineShape {
  std::vector<Point> points;
};
struct TextShape {
  Point anchor;
  std::vector<std::string> lines;
  TextSettings style;
};
struct DimensionShape {
  Orientation orientation = Orientation::horizontal;
  Point p1, p2;
  double offset = 0;
  std::string text;
  DimensionSettings style;
};
struct HeightMarkShape {
  Point point;
  std::string text;
  TextSettings style;
};
struct PipeBreakShape {
  Point center;
  double angle = 0, size = 0;
};
struct ArcBreakShape {
  Point p1, p2;
  double sagitta = 0;
};

using Shape = std::variant<SegmentShape, RectangleShape, ArcShape, PolylineShape, TextShape, DimensionShape,
                           HeightMarkShape, PipeBreakShape, ArcBreakShape>;

struct Element {
  int id = 0;
  Attribute attribute;
  Scale scale;  // drawing scale in force at creation; applies to Натура elements
  Shape shape;
  bool removed = false;
};

/// Element-wise equality with exact coordinate comparison.
bool same_element(const Element& a, const Element& b);
const char* shape_name(const Shape& s);

/// Drawing model. Element ids are 1, 2, 3, ... in insertion order and are
/// never reused; removal only marks an element.
class Canvas {
 public:
  Canvas() = default;

  const GlobalSettings& settings() const { return settings_; }
  GlobalSettings snapshot_settings() const { return settings_; }
  void restore_settings(const GlobalSettings& s) { settings_ = s; }

  const Attribute& global_attribute() const { return settings_.attribute; }
  void set_attribute(const Attribute& a);
  void set_scale(Scale s);
  void set_dim_precision(std::int64_t digits);
  void set_dim_extension(double gap, double extension, double overhang);
  void set_dim_font(double height, double slant, double width);
  void set_dim_arrows(double length1, double ratio1, double length2, double ratio2);
  void set_dim_leaders(bool on);
  void set_text_leader(bool on);
  void set_text_font(double height, double slant, double width, double line_step);

  int add_segment(const Attribute& a, Point p1, Point p2);
  int add_rectangle(const Attribute& a, Point origin, double width, double height);
  int add_arc(const Attribute& a, Point center, double radius, double angle1, double angle2);
  int add_polyline(const Attribute& a, std::vector<Point> points);
  int add_linear_dim(const Attribute& a, Orientation o, Point p1, Point p2, double offset);
  /// Bottom horizontal and left vertical dimension of a rectangle.
  std::pair<int, int> add_dim_frame(const Attribute& a, Point origin, double width, double height, double offset);

  void begin_text(std::string first_line);
  void append_line(std::string line);
  int commit_text(const Attribute& a, Point anchor);
  bool text_open() const { return pending_text_.has_value(); }

  /// Monospace width model: chars * height * width factor * 0.6.
  double string_width(const std::string& s) const;

  int add_height_mark(const Attribute& a, Point p, std::string level_text);
  int add_pipe_break(const Attribute& a, Point center, double angle, double size);
  int add_arc_break(const Attribute& a, Point p1, Point p2, double sagitta);

  void remove_element(int id);

  const std::vector<Element>& elements() const { return elements_; }
  const Element* find(int id) const;
  std::size_t visible_count() const;

  /// Ids added since the last begin_batch().
  void begin_batch() { batch_.clear(); }
  const std::vector<int>& batch() const { return batch_; }

  /// Translates the given elements and optionally recolors them.
  void finalize_placement(std::span<const int> ids, Point offset, std::optional<std::int64_t> color);

  void set_element_limit(std::size_t limit) { element_limit_ = limit; }

 private:
  int append(const Attribute& a, Shape shape);

  GlobalSettings settings_;
  std::vector<Element> elements_;
  std::vector<int> batch_;
  std::optional<std::vector<std::string>> pending_text_;
  int next_id_ = 1;
  std::size_t element_limit_ = 100000;
};

/// Measured text of a linear dimension: |delta| along the axis at `precision` digits.
std::string dimension_text(Orientation o, Point p1, Point p2, int precision);

/// Circular arc through p1 and p2 bulging by `sagitta` to the left of p1->p2.
ArcShape arc_through(Point p1, Point p2, double sagitta);

/// S-shaped break symbol: 13 points spanning `size` along direction `angle`.
std::vector<Point> pipe_break_points(Point center, double angle, double size);

/// UTF-8 text fixture, one element per line (see docs/canvas-dump.md).
std::string dump_canvas(const Canvas& canvas);

}  // namespace ppg
