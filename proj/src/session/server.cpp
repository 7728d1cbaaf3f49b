#include "server.hpp"

#include <pthread.h>
#include <signal.h>
#include <sys/socket.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "json.hpp"
#include "ppg/ppg.h"

namespace ppg::session {

namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
namespace fs = std::filesystem;
using tcp = net::ip::tcp;
using nlohmann::json;

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

// ---------------------------------------------------------------------------
// Sessions

/// One program run. The VM thread blocks in on_prompt() until a client
/// delivers an answer or the session is aborted.
class Session {
 public:
  enum class State { running, awaiting, finished, error };
  using Listener = std::function<void(const std::string& message, std::uint64_t prompt_seq)>;

  Session(std::string id, std::string lib, std::string entry)
      : id_(std::move(id)), lib_(std::move(lib)), entry_(std::move(entry)) {}

  ~Session() {
    abort();
    if (worker_.joinable()) worker_.join();
  }

  const std::string& id() const { return id_; }

  void start(ppg_program* program) {
    worker_ = std::thread([this, program] { run(program); });
  }

  json describe() {
    std::lock_guard lock(m_);
    return {{"id", id_}, {"lib", lib_}, {"entry", entry_}, {"state", state_name(state_)}};
  }

  /// 202 when delivered, 409 when no prompt is waiting for it. `seq` names the
  /// prompt the client saw; nullopt means the current one.
  int deliver(std::string answer, std::optional<std::uint64_t> seq) {
    std::lock_guard lock(m_);
    if (state_ != State::awaiting || answer_ || (seq && *seq != prompt_seq_)) return 409;
    answer_ = std::move(answer);
    cv_.notify_all();
    return 202;
  }

  /// Unblocks a waiting VM with an interaction abort; no-op once finished.
  void abort() {
    std::lock_guard lock(m_);
    if (state_ == State::running || state_ == State::awaiting) {
      aborted_ = true;
      cv_.notify_all();
    }
  }

  /// Registers a listener and immediately replays the pending prompt or the
  /// result, so late subscribers see the current state.
  int subscribe(Listener fn) {
    std::lock_guard lock(m_);
    int id = next_listener_++;
    if (state_ == State::awaiting) fn(prompt_message_, prompt_seq_);
    if (state_ == State::finished || state_ == State::error) fn(result_message_, 0);
    listeners_.emplace(id, std::move(fn));
    return id;
  }

  void unsubscribe(int id) {
    std::lock_guard lock(m_);
    listeners_.erase(id);
  }

  bool finished() {
    std::lock_guard lock(m_);
    return state_ == State::finished || state_ == State::error;
  }

  std::optional<std::string> svg() {
    std::lock_guard lock(m_);
    if (state_ != State::finished && state_ != State::error) return std::nullopt;
    return svg_;
  }

 private:
  static const char* state_name(State s) {
    switch (s) {
      case State::running: return "running";
      case State::awaiting: return "awaiting-prompt-answer";
      case State::finished: return "finished";
      default: return "error";
    }
  }

  void publish(const std::string& message, std::uint64_t seq) {
    for (auto& [_, fn] : listeners_) fn(message, seq);
  }

  static const char* prompt_hook(void* user, const char* prompt_json) {
    return static_cast<Session*>(user)->on_prompt(prompt_json);
  }

  const char* on_prompt(const char* prompt_json) {
    std::unique_lock lock(m_);
    if (aborted_) return nullptr;
    state_ = State::awaiting;
    ++prompt_seq_;
    prompt_message_ = json{{"type", "prompt"}, {"prompt", json::parse(prompt_json)}}.dump();
    answer_.reset();
    publish(prompt_message_, prompt_seq_);
    cv_.wait(lock, [&] { return answer_.has_value() || aborted_; });
    if (aborted_) return nullptr;
    answer_store_ = std::move(*answer_);
    answer_.reset();
    prompt_message_.clear();
    state_ = State::running;
    return answer_store_.c_str();
  }

  void run(ppg_program* program) {
    ppg_canvas* canvas = ppg_canvas_new();
    ppg_run_options opts;
    ppg_run_options_init(&opts);
    opts.mode = PPG_INTERACT_CALLBACK;
    opts.callback = &Session::prompt_hook;
    opts.callback_user = this;
    ppg_run_result* result = nullptr;
    ppg_status st = ppg_run(program, canvas, &opts, &result);

    json msg = {{"type", "result"}};
    json error = nullptr;
    std::string outcome = "error";
    if (result && st == PPG_OK) {
      outcome = ppg_run_result_status(result) == PPG_RUN_HALTED ? "exit" : "completed";
    } else if (result) {
      error = {{"kind", ppg_run_result_error_kind(result)},
               {"message", ppg_run_result_error_message(result)},
               {"position", ppg_run_result_error_position(result)}};
    } else {
      error = {{"kind", "internal"}, {"message", ppg_last_error()}, {"position", 0}};
    }
    char* svg = nullptr;
    std::string svg_text;
    if (ppg_canvas_render_svg(canvas, 10.0, 0, &svg) == PPG_OK) svg_text = svg;
    ppg_string_free(svg);
    msg["svg"] = svg_text;
    msg["outcome"] = outcome;
    msg["error"] = error;
    ppg_run_result_free(result);
    ppg_canvas_free(canvas);
    ppg_program_free(program);

    std::lock_guard lock(m_);
    state_ = outcome == "error" ? State::error : State::finished;
    svg_ = std::move(svg_text);
    result_message_ = msg.dump();
    publish(result_message_, 0);
  }

  std::string id_, lib_, entry_;
  std::mutex m_;
  std::condition_variable cv_;
  State state_ = State::running;
  std::uint64_t prompt_seq_ = 0;
  std::string prompt_message_;
  std::optional<std::string> answer_;
  std::string answer_store_;
  bool aborted_ = false;
  std::string result_message_;
  std::string svg_;
  std::map<int, Listener> listeners_;
  int next_listener_ = 0;
  std::thread worker_;
};

/// Checks a client wire message; returns the answer object as text.
std::optional<std::string> parse_answer_message(const std::string& text, std::string& why) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    why = "message is not a JSON object";
    return std::nullopt;
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "type" && key != "answer") {
      why = "unknown field '" + key + "'";
      return std::nullopt;
    }
  }
  if (!j.contains("type") || j["type"] != "answer") {
    why = "type must be \"answer\"";
    return std::nullopt;
  }
  if (!j.contains("answer") || !j["answer"].is_object()) {
    why = "answer object missing";
    return std::nullopt;
  }
  std::string answer = j["answer"].dump();
  if (ppg_answer_validate(answer.c_str()) != PPG_OK) {
    why = ppg_last_error();
    return std::nullopt;
  }
  return answer;
}

std::string error_message(int status, const std::string& message) {
  return json{{"type", "error"}, {"status", status}, {"message", message}}.dump();
}

// ---------------------------------------------------------------------------
// Connections

struct Connection {
  net::io_context ioc;
  std::thread thread;
  std::atomic<int> fd{-1};
  std::atomic<bool> done{false};
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, std::shared_ptr<Session> session)
      : ws_(std::move(socket)), session_(std::move(session)) {}

  void start(Request req) {
    ws_.set_option(websocket::stream_base::decorator(
        [](websocket::response_type& res) { res.set(http::field::server, "ppg"); }));
    beast::error_code ec;
    ws_.accept(req, ec);
    if (ec) return;
    ws_.text(true);
    std::weak_ptr<WsSession> weak = shared_from_this();
    auto executor = ws_.get_executor();
    listener_ = session_->subscribe([weak, executor](const std::string& message, std::uint64_t seq) {
      net::post(executor, [weak, message, seq] {
        if (auto self = weak.lock()) self->send(message, seq);
      });
    });
    subscribed_ = true;
    read();
  }

 private:
  void send(std::string message, std::uint64_t seq) {
    if (closed_) return;
    if (seq) sent_prompt_ = seq;
    queue_.push_back(std::move(message));
    if (queue_.size() == 1) write();
  }

  void write() {
    ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->handle(text);
      self->read();
    });
  }

  void handle(const std::string& text) {
    std::string why;
    auto answer = parse_answer_message(text, why);
    if (!answer) return send(error_message(400, why), 0);
    if (sent_prompt_ == 0 || session_->deliver(*answer, sent_prompt_) == 409) {
      send(error_message(409, "no prompt is awaiting an answer"), 0);
      return;
    }
    sent_prompt_ = 0;
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    if (subscribed_) session_->unsubscribe(listener_);
    // A client that goes away mid-dialog cannot answer any more.
    session_->abort();
    beast::error_code ec;
    beast::get_lowest_layer(ws_).shutdown(tcp::socket::shutdown_both, ec);
  }

  websocket::stream<tcp::socket> ws_;
  std::shared_ptr<Session> session_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::uint64_t sent_prompt_ = 0;
  int listener_ = 0;
  bool subscribed_ = false;
  bool closed_ = false;
};

std::string percent_decode(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::vector<std::string> split_path(std::string_view target) {
  auto q = target.find('?');
  if (q != std::string_view::npos) target = target.substr(0, q);
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < target.size()) {
    auto j = target.find('/', i);
    if (j == std::string_view::npos) j = target.size();
    if (j > i) parts.push_back(percent_decode(std::string(target.substr(i, j - i))));
    i = j + 1;
  }
  return parts;
}

const char* mime_type(const fs::path& p) {
  auto ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".json") return "application/json";
  return "application/octet-stream";
}

}  // namespace

// ---------------------------------------------------------------------------

struct Server::Impl {
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::thread accept_thread;
  std::atomic<bool> stopping{false};
  int bound_port = 0;

  std::mutex sessions_mutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::mt19937_64 rng{std::random_device{}()};

  std::mutex conns_mutex;
  std::list<std::shared_ptr<Connection>> conns;

  explicit Impl(ServerOptions o) : options(std::move(o)) {}

  Response reply(const Request& req, http::status status, std::string body,
                 const char* type = "application/json") {
    Response res{status, req.version()};
    res.set(http::field::server, "ppg");
    res.set(http::field::content_type, type);
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  Response fail(const Request& req, http::status status, const std::string& message) {
    return reply(req, status, json{{"error", message}}.dump());
  }

  /// Library file inside library_dir, or nullopt for anything else.
  std::optional<fs::path> library_path(const std::string& name) {
    if (name.empty() || name.find('/') != std::string::npos || name == "." || name == ".." ||
        fs::path(name).extension() != ".ppglib")
      return std::nullopt;
    fs::path p = fs::path(options.library_dir) / name;
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) return std::nullopt;
    return p;
  }

  std::shared_ptr<Session> find_session(const std::string& id) {
    std::lock_guard lock(sessions_mutex);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  Response list_libraries(const Request& req) {
    json names = json::array();
    std::vector<std::string> found;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(options.library_dir, ec)) {
      if (e.is_regular_file() && e.path().extension() == ".ppglib") found.push_back(e.path().filename().string());
    }
    std::sort(found.begin(), found.end());
    for (auto& n : found) names.push_back(n);
    return reply(req, http::status::ok, names.dump());
  }

  Response list_entries(const Request& req, const std::string& lib) {
    auto path = library_path(lib);
    if (!path) return fail(req, http::status::not_found, "no library '" + lib + "'");
    ppg_library* l = nullptr;
    std::size_t n = 0;
    json out = json::array();
    ppg_status st = ppg_library_open(path->c_str(), &l);
    if (st == PPG_OK) st = ppg_library_count(l, &n);
    for (std::size_t i = 0; st == PPG_OK && i < n; ++i) {
      const char* name = nullptr;
      const char* comment = nullptr;
      st = ppg_library_entry(l, i, &name, &comment);
      if (st == PPG_OK) out.push_back({{"name", name}, {"comment", comment}});
    }
    std::string err = ppg_last_error();
    ppg_library_free(l);
    if (st != PPG_OK) return fail(req, http::status::internal_server_error, err);
    return reply(req, http::status::ok, out.dump());
  }

  Response create_session(const Request& req) {
    json body = json::parse(req.body(), nullptr, false);
    if (body.is_discarded() || !body.is_object())
      return fail(req, http::status::bad_request, "body must be a JSON object");
    for (const auto& [key, _] : body.items()) {
      if (key != "lib" && key != "entry") return fail(req, http::status::bad_request, "unknown field '" + key + "'");
    }
    if (!body.contains("lib") || !body["lib"].is_string() || !body.contains("entry") || !body["entry"].is_string())
      return fail(req, http::status::bad_request, "lib and entry must be strings");
    std::string lib = body["lib"], entry = body["entry"];
    auto path = library_path(lib);
    if (!path) return fail(req, http::status::not_found, "no library '" + lib + "'");

    ppg_library* l = nullptr;
    ppg_program* program = nullptr;
    ppg_status st = ppg_library_open(path->c_str(), &l);
    if (st == PPG_OK) st = ppg_library_load(l, entry.c_str(), &program);
    std::string err = ppg_last_error();
    ppg_library_free(l);
    if (st == PPG_ERR_LIBRARY) return fail(req, http::status::not_found, err);
    if (st != PPG_OK) return fail(req, http::status::internal_server_error, err);

    std::shared_ptr<Session> s;
    {
      std::lock_guard lock(sessions_mutex);
      std::string id;
      do {
        std::ostringstream ss;
        ss << std::hex << rng();
        id = ss.str();
      } while (sessions.count(id));
      s = std::make_shared<Session>(id, lib, entry);
      sessions.emplace(id, s);
    }
    s->start(program);
    return reply(req, http::status::created, json{{"id", s->id()}}.dump());
  }

  Response post_answer(const Request& req, Session& s) {
    std::string why;
    auto answer = parse_answer_message(req.body(), why);
    if (!answer) return fail(req, http::status::bad_request, why);
    if (s.deliver(*answer, std::nullopt) == 409)
      return fail(req, http::status::conflict, "no prompt is awaiting an answer");
    return reply(req, http::status::accepted, "{}");
  }

  Response serve_static(const Request& req, const std::vector<std::string>& parts) {
    if (options.static_dir.empty()) return fail(req, http::status::not_found, "not found");
    fs::path p = options.static_dir;
    for (const auto& part : parts) {
      if (part == ".." || part == ".") return fail(req, http::status::not_found, "not found");
      p /= part;
    }
    std::error_code ec;
    if (parts.empty() || fs::is_directory(p, ec)) p /= "index.html";
    std::ifstream in(p, std::ios::binary);
    if (!in) return fail(req, http::status::not_found, "not found");
    std::ostringstream ss;
    ss << in.rdbuf();
    return reply(req, http::status::ok, ss.str(), mime_type(p));
  }

  Response route(const Request& req) {
    auto parts = split_path(std::string_view(req.target().data(), req.target().size()));
    auto method = req.method();
    bool get = method == http::verb::get, post = method == http::verb::post;
    if (parts.empty() || parts[0] != "api") {
      if (!get) return fail(req, http::status::method_not_allowed, "method not allowed");
      return serve_static(req, parts);
    }
    if (parts.size() == 2 && parts[1] == "libraries") {
      if (!get) return fail(req, http::status::method_not_allowed, "method not allowed");
      return list_libraries(req);
    }
    if (parts.size() == 4 && parts[1] == "libraries" && parts[3] == "entries") {
      if (!get) return fail(req, http::status::method_not_allowed, "method not allowed");
      return list_entries(req, parts[2]);
    }
    if (parts.size() == 2 && parts[1] == "sessions") {
      if (!post) return fail(req, http::status::method_not_allowed, "method not allowed");
      return create_session(req);
    }
    if (parts.size() >= 3 && parts.size() <= 4 && parts[1] == "sessions") {
      auto s = find_session(parts[2]);
      if (!s) return fail(req, http::status::not_found, "no session '" + parts[2] + "'");
      if (parts.size() == 3) {
        if (!get) return fail(req, http::status::method_not_allowed, "method not allowed");
        return reply(req, http::status::ok, s->describe().dump());
      }
      if (parts[3] == "answer") {
        if (!post) return fail(req, http::status::method_not_allowed, "method not allowed");
        return post_answer(req, *s);
      }
      if (parts[3] == "result.svg") {
        if (!get) return fail(req, http::status::method_not_allowed, "method not allowed");
        auto svg = s->svg();
        if (!svg) return fail(req, http::status::conflict, "session has not finished");
        return reply(req, http::status::ok, *svg, "image/svg+xml");
      }
    }
    return fail(req, http::status::not_found, "not found");
  }

  void handle(std::shared_ptr<Connection> conn, tcp::socket socket) {
    beast::flat_buffer buffer;
    beast::error_code ec;
    for (;;) {
      Request req;
      http::read(socket, buffer, req, ec);
      if (ec) break;
      if (websocket::is_upgrade(req)) {
        auto parts = split_path(std::string_view(req.target().data(), req.target().size()));
        std::shared_ptr<Session> s;
        if (parts.size() == 3 && parts[0] == "api" && parts[1] == "sessions") s = find_session(parts[2]);
        if (!s) {
          http::write(socket, fail(req, http::status::not_found, "no such session"), ec);
          break;
        }
        std::make_shared<WsSession>(std::move(socket), std::move(s))->start(std::move(req));
        conn->ioc.run();
        return;
      }
      Response res;
      try {
        res = route(req);
      } catch (const std::exception& e) {
        res = fail(req, http::status::internal_server_error, e.what());
      }
      bool keep = res.keep_alive();
      http::write(socket, res, ec);
      if (ec || !keep) break;
    }
    socket.shutdown(tcp::socket::shutdown_send, ec);
  }

  void reap() {
    std::lock_guard lock(conns_mutex);
    for (auto it = conns.begin(); it != conns.end();) {
      if ((*it)->done) {
        (*it)->thread.join();
        it = conns.erase(it);
      } else {
        ++it;
      }
    }
  }

  void accept_loop() {
    while (!stopping) {
      auto conn = std::make_shared<Connection>();
      tcp::socket socket(conn->ioc);
      beast::error_code ec;
      acceptor.accept(socket, ec);
      if (ec) {
        if (stopping) break;
        continue;
      }
      reap();
      conn->fd = socket.native_handle();
      std::lock_guard lock(conns_mutex);
      conn->thread = std::thread([this, conn, s = std::move(socket)]() mutable {
        handle(conn, std::move(s));
        conn->done = true;
      });
      conns.push_back(conn);
    }
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& im = *impl_;
  tcp::endpoint ep{net::ip::make_address(im.options.address), static_cast<unsigned short>(im.options.port)};
  im.acceptor.open(ep.protocol());
  im.acceptor.set_option(net::socket_base::reuse_address(true));
  im.acceptor.bind(ep);
  im.acceptor.listen();
  im.bound_port = im.acceptor.local_endpoint().port();
  im.accept_thread = std::thread([&im] { im.accept_loop(); });
}

void Server::stop() {
  auto& im = *impl_;
  if (im.stopping.exchange(true)) return;
  if (im.acceptor.is_open()) ::shutdown(im.acceptor.native_handle(), SHUT_RDWR);
  if (im.accept_thread.joinable()) im.accept_thread.join();
  beast::error_code ec;
  im.acceptor.close(ec);
  {
    std::lock_guard lock(im.conns_mutex);
    for (auto& c : im.conns) {
      int fd = c->fd;
      if (fd >= 0) ::shutdown(fd, SHUT_RDWR);
      c->ioc.stop();
    }
  }
  for (auto& c : im.conns) {
    if (c->thread.joinable()) c->thread.join();
  }
  im.conns.clear();
  std::map<std::string, std::shared_ptr<Session>> sessions;
  {
    std::lock_guard lock(im.sessions_mutex);
    sessions.swap(im.sessions);
  }
  for (auto& [_, s] : sessions) s->abort();
  sessions.clear();
}

int Server::port() const { return impl_->bound_port; }

int serve_forever(const ServerOptions& options) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  Server server(options);
  try {
    server.start();
  } catch (const std::exception& e) {
    std::cerr << "ppg: cannot listen on " << options.address << ":" << options.port << ": " << e.what() << "\n";
    return 3;
  }
  std::cerr << "ppg: serving " << options.library_dir << " on http://" << options.address << ":" << server.port()
            << "\n";
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  return 0;
}

}  // namespace ppg::session
