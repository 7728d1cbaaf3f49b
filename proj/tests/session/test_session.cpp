// HTTP and WebSocket behaviour of the session server, driven by a Beast client.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "doctest.h"
#include "json.hpp"
#include "ppg/ppg.h"
#include "session/server.hpp"

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
namespace fs = std::filesystem;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ppg_program* listing() {
  std::string src = slurp(fs::path(PPG_SOURCE_DIR) / "tests/fixtures/ogolovok.ppg");
  ppg_compilation* c = nullptr;
  REQUIRE(ppg_compile(src.c_str(), "ogolovok.ppg", &c) == PPG_OK);
  ppg_program* p = nullptr;
  REQUIRE(ppg_compilation_take_program(c, &p) == PPG_OK);
  ppg_compilation_free(c);
  return p;
}

std::string local_svg(const char* answers) {
  ppg_program* p = listing();
  ppg_canvas* canvas = ppg_canvas_new();
  ppg_run_options o;
  ppg_run_options_init(&o);
  o.answers_json = answers;
  ppg_run_result* r = nullptr;
  REQUIRE(ppg_run(p, canvas, &o, &r) == PPG_OK);
  char* svg = nullptr;
  REQUIRE(ppg_canvas_render_svg(canvas, 10.0, 0, &svg) == PPG_OK);
  std::string out = svg;
  ppg_string_free(svg);
  ppg_run_result_free(r);
  ppg_canvas_free(canvas);
  ppg_program_free(p);
  return out;
}

std::size_t count_rects(const std::string& svg) {
  std::size_t n = 0;
  for (auto p = svg.find("<rect"); p != std::string::npos; p = svg.find("<rect", p + 1)) ++n;
  return n;
}

/// Temporary library directory holding vent.ppglib with the listing.
struct Fixture {
  fs::path dir;
  ppg::session::Server server;

  static ppg::session::ServerOptions options(const fs::path& dir) {
    ppg::session::ServerOptions o;
    o.port = 0;
    o.library_dir = dir.string();
    return o;
  }

  Fixture() : dir(make_dir()), server(options(dir)) {
    ppg_library* lib = nullptr;
    REQUIRE(ppg_library_open((dir / "vent.ppglib").c_str(), &lib) == PPG_OK);
    ppg_program* p = listing();
    REQUIRE(ppg_library_add(lib, "оголовок", "вентпанели", p) == PPG_OK);
    ppg_program_free(p);
    ppg_library_free(lib);
    std::ofstream(dir / "notes.txt") << "not a library";
    server.start();
  }

  ~Fixture() {
    server.stop();
    fs::remove_all(dir);
  }

  static fs::path make_dir() {
    static int n = 0;
    fs::path d = fs::temp_directory_path() / ("ppg-session-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::create_directories(d);
    return d;
  }

  struct Reply {
    int status;
    std::string body;
    json js() const { return json::parse(body); }
  };

  Reply request(http::verb verb, const std::string& target, const std::string& body = "") {
    net::io_context ioc;
    tcp::socket sock(ioc);
    sock.connect({net::ip::make_address("127.0.0.1"), static_cast<unsigned short>(server.port())});
    http::request<http::string_body> req{verb, target, 11};
    req.set(http::field::host, "localhost");
    if (!body.empty()) {
      req.set(http::field::content_type, "application/json");
      req.body() = body;
    }
    req.prepare_payload();
    http::write(sock, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(sock, buf, res);
    beast::error_code ec;
    sock.shutdown(tcp::socket::shutdown_both, ec);
    return {static_cast<int>(res.result_int()), res.body()};
  }

  Reply get(const std::string& t) { return request(http::verb::get, t); }
  Reply post(const std::string& t, const std::string& b) { return request(http::verb::post, t, b); }

  std::string new_session() {
    auto r = post("/api/sessions", R"({"lib":"vent.ppglib","entry":"оголовок"})");
    REQUIRE(r.status == 201);
    return r.js()["id"];
  }

  std::string wait_state(const std::string& id, const std::string& want) {
    std::string state;
    for (int i = 0; i < 500; ++i) {
      state = get("/api/sessions/" + id).js()["state"];
      if (state == want) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    return state;
  }
};

struct Ws {
  net::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};

  Ws(int port, const std::string& target) {
    ws.next_layer().connect({net::ip::make_address("127.0.0.1"), static_cast<unsigned short>(port)});
    ws.handshake("localhost", target);
    ws.text(true);
  }

  json read() {
    beast::flat_buffer buf;
    ws.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }

  void send(const std::string& text) { ws.write(net::buffer(text)); }
};

}  // namespace

TEST_CASE("library listing") {
  Fixture f;
  auto libs = f.get("/api/libraries");
  CHECK(libs.status == 200);
  CHECK(libs.js() == json::array({"vent.ppglib"}));
  auto entries = f.get("/api/libraries/vent.ppglib/entries");
  CHECK(entries.status == 200);
  CHECK(entries.js()[0]["name"] == "оголовок");
  CHECK(entries.js()[0]["comment"] == "вентпанели");
  CHECK(f.get("/api/libraries/nope.ppglib/entries").status == 404);
  CHECK(f.get("/api/libraries/notes.txt/entries").status == 404);
  CHECK(f.get("/api/libraries/..%2Fvent.ppglib/entries").status == 404);
}

TEST_CASE("session creation errors") {
  Fixture f;
  CHECK(f.post("/api/sessions", "not json").status == 400);
  CHECK(f.post("/api/sessions", R"({"lib":"vent.ppglib"})").status == 400);
  CHECK(f.post("/api/sessions", R"({"lib":"vent.ppglib","entry":"оголовок","x":1})").status == 400);
  CHECK(f.post("/api/sessions", R"({"lib":1,"entry":"оголовок"})").status == 400);
  CHECK(f.post("/api/sessions", R"({"lib":"none.ppglib","entry":"оголовок"})").status == 404);
  CHECK(f.post("/api/sessions", R"({"lib":"vent.ppglib","entry":"нет"})").status == 404);
  CHECK(f.get("/api/sessions/deadbeef").status == 404);
  CHECK(f.post("/api/sessions/deadbeef/answer", R"({"type":"answer","answer":{"menu":1}})").status == 404);
  CHECK(f.get("/api/unknown").status == 404);
  CHECK(f.get("/api/sessions").status == 405);
}

TEST_CASE("websocket dialog to a result") {
  Fixture f;
  std::string id = f.new_session();
  CHECK(f.get("/api/sessions/" + id + "/result.svg").status == 409);

  Ws ws(f.server.port(), "/api/sessions/" + id);
  json prompt = ws.read();
  REQUIRE(prompt["type"] == "prompt");
  CHECK(prompt["prompt"]["kind"] == "menu");
  CHECK(prompt["prompt"]["options"].size() == 3);
  CHECK(f.wait_state(id, "awaiting-prompt-answer") == "awaiting-prompt-answer");

  ws.send(R"({"type":"answer","answer":{"menu":"one"}})");
  json bad = ws.read();
  CHECK(bad["type"] == "error");
  CHECK(bad["status"] == 400);
  ws.send(R"({"type":"reply"})");
  CHECK(ws.read()["status"] == 400);

  ws.send(R"({"type":"answer","answer":{"menu":1}})");
  json result = ws.read();
  REQUIRE(result["type"] == "result");
  CHECK(result["outcome"] == "completed");
  CHECK(result["error"].is_null());
  std::string svg = result["svg"];
  CHECK(count_rects(svg) == 4);
  CHECK(svg == local_svg(R"([{"menu":1}])"));

  ws.send(R"({"type":"answer","answer":{"menu":1}})");
  json late = ws.read();
  CHECK(late["type"] == "error");
  CHECK(late["status"] == 409);

  CHECK(f.get("/api/sessions/" + id).js()["state"] == "finished");
  auto file = f.get("/api/sessions/" + id + "/result.svg");
  CHECK(file.status == 200);
  CHECK(file.body == svg);
  CHECK(f.post("/api/sessions/" + id + "/answer", R"({"type":"answer","answer":{"menu":1}})").status == 409);
}

TEST_CASE("answers over plain HTTP") {
  Fixture f;
  std::string id = f.new_session();
  REQUIRE(f.wait_state(id, "awaiting-prompt-answer") == "awaiting-prompt-answer");
  CHECK(f.post("/api/sessions/" + id + "/answer", R"({"answer":{"menu":2}})").status == 400);
  CHECK(f.post("/api/sessions/" + id + "/answer", R"({"type":"answer","answer":{"menu":2}})").status == 202);
  CHECK(f.wait_state(id, "finished") == "finished");
  auto svg = f.get("/api/sessions/" + id + "/result.svg");
  CHECK(svg.status == 200);
  CHECK(count_rects(svg.body) == 1);
  CHECK(svg.body == local_svg(R"([{"menu":2}])"));

  // A late subscriber gets the result replayed.
  Ws ws(f.server.port(), "/api/sessions/" + id);
  json result = ws.read();
  CHECK(result["type"] == "result");
  CHECK(result["outcome"] == "completed");
}

TEST_CASE("menu cancel ends with exit") {
  Fixture f;
  std::string id = f.new_session();
  Ws ws(f.server.port(), "/api/sessions/" + id);
  REQUIRE(ws.read()["type"] == "prompt");
  ws.send(R"({"type":"answer","answer":{"menu":0}})");
  json result = ws.read();
  CHECK(result["outcome"] == "exit");
  CHECK(count_rects(result["svg"]) == 0);
}

TEST_CASE("closing the socket aborts the run") {
  Fixture f;
  std::string id = f.new_session();
  {
    Ws ws(f.server.port(), "/api/sessions/" + id);
    REQUIRE(ws.read()["type"] == "prompt");
    ws.ws.close(websocket::close_code::normal);
  }
  CHECK(f.wait_state(id, "error") == "error");
  Ws again(f.server.port(), "/api/sessions/" + id);
  json result = again.read();
  CHECK(result["type"] == "result");
  CHECK(result["outcome"] == "error");
  CHECK(result["error"]["kind"] == "interaction-abort");
}

TEST_CASE("websocket to an unknown session is refused") {
  Fixture f;
  CHECK_THROWS(Ws(f.server.port(), "/api/sessions/nope"));
}

TEST_CASE("two sessions run independently") {
  Fixture f;
  std::string a = f.new_session(), b = f.new_session();
  CHECK(a != b);
  REQUIRE(f.wait_state(a, "awaiting-prompt-answer") == "awaiting-prompt-answer");
  REQUIRE(f.wait_state(b, "awaiting-prompt-answer") == "awaiting-prompt-answer");
  CHECK(f.post("/api/sessions/" + b + "/answer", R"({"type":"answer","answer":{"menu":3}})").status == 202);
  CHECK(f.wait_state(b, "finished") == "finished");
  CHECK(f.get("/api/sessions/" + a).js()["state"] == "awaiting-prompt-answer");
  CHECK(f.post("/api/sessions/" + a + "/answer", R"({"type":"answer","answer":{"menu":1}})").status == 202);
  CHECK(f.wait_state(a, "finished") == "finished");
  CHECK(count_rects(f.get("/api/sessions/" + a + "/result.svg").body) == 4);
  CHECK(count_rects(f.get("/api/sessions/" + b + "/result.svg").body) == 1);
}
