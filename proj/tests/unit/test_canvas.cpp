#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "errors.hpp"
#include "support.hpp"
#include "svg.hpp"

using namespace ppg;

namespace {

const Attribute kDefault{};

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("default settings") {
  Canvas c;
  const auto& s = c.settings();
  CHECK(s.attribute == Attribute{0, 0, 0, 0});
  CHECK(s.scale == Scale{1, 1});
  CHECK(s.dimension.precision == 2);
  CHECK(s.dimension.font.height == 3.5);
  CHECK(s.dimension.arrow_ratio1 == std::sqrt(2.0));
  CHECK_FALSE(s.dimension.leaders);
}

TEST_CASE("attribute ranges") {
  CHECK_NOTHROW(validate_attribute({255, 15, 6, 1}));
  CHECK_THROWS_AS(validate_attribute({0, 16, 0, 0}), RuntimeError);
  CHECK_THROWS_AS(validate_attribute({256, 0, 0, 0}), RuntimeError);
  CHECK_THROWS_AS(validate_attribute({0, 0, 7, 0}), RuntimeError);
  CHECK_THROWS_AS(validate_attribute({0, 0, 0, 2}), RuntimeError);
  Canvas c;
  c.set_attribute({0, 15, 0, 0});
  CHECK(c.global_attribute().color == 15);
}

TEST_CASE("ids increase and are never reused") {
  Canvas c;
  CHECK(c.add_segment(kDefault, {0, 0}, {100, 0}) == 1);
  CHECK(c.add_segment(kDefault, {0, 0}, {0, 0}) == 2);
  c.remove_element(2);
  CHECK(c.add_rectangle(kDefault, {0, 0}, 1, 1) == 3);
  CHECK(c.visible_count() == 2);
  CHECK_THROWS_AS(c.remove_element(2), RuntimeError);
  CHECK_THROWS_AS(c.remove_element(999), RuntimeError);
}

TEST_CASE("shape preconditions") {
  Canvas c;
  CHECK_THROWS_AS(c.add_rectangle(kDefault, {0, 0}, 0, 5), RuntimeError);
  CHECK_THROWS_AS(c.add_arc(kDefault, {0, 0}, -1, 0, 1), RuntimeError);
  CHECK_NOTHROW(c.add_arc(kDefault, {0, 0}, 10, 0, 2 * std::numbers::pi));
  CHECK_THROWS_AS(c.add_linear_dim(kDefault, Orientation::horizontal, {5, 0}, {5, 10}, 10), RuntimeError);
  CHECK_THROWS_AS(c.add_pipe_break(kDefault, {0, 0}, 0, 0), RuntimeError);
  CHECK_THROWS_AS(c.add_arc_break(kDefault, {0, 0}, {10, 0}, 0), RuntimeError);
  CHECK_THROWS_AS(c.commit_text(kDefault, {0, 0}), RuntimeError);
  std::vector<Point> many(17, Point{1, 1});
  CHECK_THROWS_AS(c.add_polyline(kDefault, many), RuntimeError);
}

TEST_CASE("elements keep the attribute in force at creation") {
  Canvas c;
  Attribute a{1, 2, 3, 0};
  int id = c.add_segment(a, {0, 0}, {1, 1});
  c.set_attribute({0, 5, 0, 0});
  CHECK(c.find(id)->attribute == a);
}

TEST_CASE("dimension texts") {
  CHECK(dimension_text(Orientation::horizontal, {0, 0}, {880, 0}, 0) == "880");
  CHECK(dimension_text(Orientation::vertical, {0, 0}, {0, 600}, 0) == "600");
  CHECK(dimension_text(Orientation::horizontal, {10, 0}, {0, 3}, 2) == "10.00");
  Canvas c;
  c.set_dim_precision(0);
  auto [h, v] = c.add_dim_frame(kDefault, {0, 0}, 880, 450, 20);
  CHECK(v == h + 1);
  CHECK(std::get<DimensionShape>(c.find(h)->shape).text == "880");
  CHECK(std::get<DimensionShape>(c.find(v)->shape).text == "450");
  CHECK_THROWS_AS(c.add_dim_frame(kDefault, {0, 0}, 10, 0, 5), RuntimeError);
  CHECK_THROWS_AS(c.set_dim_precision(7), RuntimeError);
}

TEST_CASE("text buffer") {
  Canvas c;
  c.begin_text("a");
  c.append_line("b");
  int id = c.commit_text(kDefault, {0, 0});
  CHECK(std::get<TextShape>(c.find(id)->shape).lines == std::vector<std::string>{"a", "b"});
  CHECK_FALSE(c.text_open());
  CHECK_THROWS_AS(c.append_line("c"), RuntimeError);
}

TEST_CASE("string width model") {
  Canvas c;
  c.set_text_font(3.5, 0, 0.8, 5);
  CHECK(c.string_width("") == 0.0);
  CHECK(c.string_width("abc") == doctest::Approx(5.04).epsilon(1e-12));
  CHECK(c.string_width("абв") == doctest::Approx(5.04).epsilon(1e-12));
  double w = c.string_width("abc");
  c.set_text_font(7, 0, 0.8, 5);
  CHECK(c.string_width("abc") == doctest::Approx(2 * w));
}

TEST_CASE("pipe break spans its size") {
  auto pts = pipe_break_points({0, 0}, 0, 10);
  CHECK(pts.size() == 13);
  double lo = 1e9, hi = -1e9;
  for (auto p : pts) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  CHECK(hi - lo == doctest::Approx(10.0));
}

TEST_CASE("arc break mirror symmetry") {
  auto a = arc_through({0, 0}, {10, 0}, 2);
  auto b = arc_through({10, 0}, {0, 0}, -2);
  CHECK(a.center.x == doctest::Approx(b.center.x));
  CHECK(a.center.y == doctest::Approx(b.center.y));
  CHECK(a.radius == doctest::Approx(b.radius));
  // Sagitta and chord half-length determine the radius: r = (s^2 + c^2) / 2s.
  CHECK(a.radius == doctest::Approx((4.0 + 25.0) / 4.0));
}

TEST_CASE("snapshot and restore") {
  Canvas c;
  auto s = c.snapshot_settings();
  CHECK(s == s);
  c.set_dim_precision(5);
  CHECK_FALSE(c.settings() == s);
  c.restore_settings(s);
  CHECK(c.settings().dimension.precision == 2);
}

TEST_CASE("placement translates and recolors the batch only") {
  Canvas c;
  int keep = c.add_segment(kDefault, {0, 0}, {1, 0});
  c.begin_batch();
  int moved = c.add_height_mark(kDefault, {5, 5}, "0.000");
  std::vector<int> ids = c.batch();
  c.finalize_placement(ids, {100, 50}, 3);
  const auto& mark = std::get<HeightMarkShape>(c.find(moved)->shape);
  CHECK(mark.point == Point{105, 55});
  CHECK(c.find(moved)->attribute.color == 3);
  CHECK(std::get<SegmentShape>(c.find(keep)->shape).p2 == Point{1, 0});
}

TEST_CASE("dump format") {
  Canvas c;
  c.add_rectangle(Attribute{0, 1, 0, 0}, {0, 0}, 880, 450);
  c.add_rectangle(Attribute{0, 1, 0, 0}, {220.0 / 3.0, 112.5}, 440.0 / 3.0, 225);
  std::string d = dump_canvas(c);
  CHECK(d.rfind("ppg-canvas 1\nscale 1:1\n", 0) == 0);
  CHECK(d.find("1 rectangle layer=0 color=1 ltype=0 units=0 scale=1:1 origin=0,0 size=880,450\n") != std::string::npos);
  CHECK(d.find("origin=73.33333333333333,112.5 size=146.66666666666666,225") != std::string::npos);
}

TEST_CASE("svg rendering") {
  Canvas c;
  c.add_rectangle(kDefault, {0, 0}, 100, 50);
  int gone = c.add_segment(kDefault, {0, 0}, {10, 10});
  c.add_linear_dim(kDefault, Orientation::horizontal, {0, 0}, {100, 0}, -10);
  c.remove_element(gone);
  std::string a = render_svg(c);
  CHECK(a == render_svg(c));
  CHECK(count(a, "<rect") == 1);
  CHECK(a.find("<?xml") == 0);
  CHECK(a.find(">100.00<") != std::string::npos);
  CHECK(std::string(palette_color(0)) == "#000000");
  RenderOptions bg;
  bg.background = true;
  CHECK(render_svg(c, bg) != a);
}

TEST_CASE("scale shrinks model elements but not paper elements") {
  Canvas c1, c2;
  c1.set_scale({1, 10});
  c1.add_segment(Attribute{0, 0, 0, 0}, {0, 0}, {1000, 0});
  c2.set_scale({1, 10});
  c2.add_segment(Attribute{0, 0, 0, 1}, {0, 0}, {100, 0});
  CHECK(render_svg(c1) == render_svg(c2));
}
