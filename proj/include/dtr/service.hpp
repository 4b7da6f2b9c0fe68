#pragma once

// Local HTTP service exposing transformation sessions to an interactive
// front end. Payloads are JSON objects:
//
//   POST /session                     {source}
//   GET  /session/{id}/source
//   POST /session/{id}/focus          {selector}        (null clears)
//   GET  /session/{id}/ops
//   POST /session/{id}/apply          {opInvocation}    (script line or {op, args})
//   POST /session/{id}/fold           {range, typeName, kind, consName, introduce}
//   GET  /session/{id}/todos
//   GET  /session/{id}/history
//   POST /session/{id}/undo
//   GET  /session/{id}/occurrences    ?predicate=...    (or {predicate})
//
// 400 malformed payload, 404 unknown session, 409 refusal.

#include <map>
#include <memory>
#include <string>

namespace dtr {

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

class RefactorService {
 public:
  RefactorService();
  ~RefactorService();
  RefactorService(const RefactorService&) = delete;
  RefactorService& operator=(const RefactorService&) = delete;

  /// Transport-independent dispatch. Thread-safe; requests on one session
  /// are serialized.
  ServiceResponse handle(const std::string& method, const std::string& path,
                         const std::string& body,
                         const std::map<std::string, std::string>& query = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Serves a RefactorService over HTTP.
class HttpServer {
 public:
  explicit HttpServer(RefactorService& service);
  ~HttpServer();

  /// Binds and starts serving on a background thread. Port 0 picks a free
  /// port. Returns the bound port, or -1 when binding failed.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dtr
