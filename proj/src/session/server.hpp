#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace ppg::session {

struct ServerOptions {
  std::string address = "127.0.0.1";
  int port = 8741;  // 0 picks a free port
  std::string library_dir = ".";
  std::string static_dir;  // optional web client assets
};

/// HTTP + WebSocket front end for interactive runs of library programs.
///
///   GET  /api/libraries                    -> ["a.ppglib", ...]
///   GET  /api/libraries/{lib}/entries      -> [{"name":..,"comment":..}]
///   POST /api/sessions {"lib":..,"entry":..} -> {"id":..}
///   GET  /api/sessions/{id}                -> {"id":..,"state":..}
///   POST /api/sessions/{id}/answer         -> 202, or 409 without a pending prompt
///   GET  /api/sessions/{id}/result.svg
///   WS   /api/sessions/{id}                -> prompt / answer / result messages
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts serving on a background thread. Throws on bind failure.
  void start();
  /// Closes the listener and all connections and aborts running sessions.
  void stop();
  /// Actual port once started.
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs a server until SIGINT/SIGTERM; returns a process exit code.
int serve_forever(const ServerOptions& options);

}  // namespace ppg::session
