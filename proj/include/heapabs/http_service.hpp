#pragma once

#include <memory>
#include <string>

#include "heapabs/session.hpp"

namespace heapabs {

inline constexpr std::size_t kMaxZoomIds = 64;

/// Read-mostly JSON API over a SessionStore:
///   GET  /api/snapshots
///   GET  /api/graph/{hash}?view=abstract|reduced
///   GET  /api/graph/{hash}/node/{id}
///   GET  /api/graph/{hash}/diagnostics
///   POST /api/graph/{hash}/zoom        {"interesting":[objectIds]}
///   GET  /api/graph/{hash}/expand/{reducedId}
class HttpService {
 public:
  explicit HttpService(SessionStore& store);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds `host` on `port` (0 picks a free port); returns the bound port
  /// or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace heapabs
