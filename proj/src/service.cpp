#include "dtr/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <mutex>
#include <random>
#include <thread>

#include "dtr/concrete.hpp"
#include "dtr/engine.hpp"
#include "dtr/focus.hpp"

namespace dtr {

using nlohmann::json;

namespace {

struct HttpError {
  int status;
  json body;
};

json errorJson(const Error& e) {
  return {{"code", std::string(codeName(e.code()))},
          {"detail", e.detail()},
          {"locations", e.locations()}};
}

[[noreturn]] void badRequest(const std::string& why) {
  throw HttpError{400, {{"error", errorJson(Error(ErrorCode::BadArguments, why))}}};
}

json rendering(const Module& m) {
  std::vector<Span> spans;
  std::string text = printModule(m, spans);
  json js = json::array();
  for (const auto& s : spans)
    js.push_back({{"kind", s.kind}, {"ref", s.ref}, {"begin", s.begin}, {"end", s.end}});
  return {{"source", text}, {"spans", js}};
}

json todosJson(const std::vector<TodoMarker>& ts) {
  json out = json::array();
  for (const auto& t : ts) out.push_back(toString(t));
  return out;
}

json invocationJson(const OpInvocation& inv) {
  return {{"op", inv.op}, {"args", inv.args}, {"line", inv.toString()}};
}

json resultJson(const TrafoResult& r) {
  json steps = json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"invocation", invocationJson(s.inv)},
                     {"changed", s.changed},
                     {"todos", todosJson(s.todos)}});
  if (!r.ok)
    return {{"ok", false},
            {"error", errorJson(Error(r.code, r.detail, r.locations))},
            {"failedStep", r.failedStep},
            {"steps", steps}};
  json out = rendering(r.module);
  out["ok"] = true;
  out["changed"] = r.changed;
  out["todos"] = todosJson(r.todos);
  out["steps"] = steps;
  return out;
}

json parseBody(const std::string& body) {
  if (body.empty()) return json::object();
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) badRequest("request body must be a JSON object");
  return j;
}

std::string stringField(const json& j, const char* name, bool required = true) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) {
    if (required) badRequest(std::string("missing field '") + name + "'");
    return "";
  }
  if (!it->is_string()) badRequest(std::string("field '") + name + "' must be a string");
  return it->get<std::string>();
}

template <class F>
auto orBadRequest(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw HttpError{400, {{"error", errorJson(e)}}};
  }
}

OpInvocation invocationFrom(const json& j) {
  auto it = j.find("opInvocation");
  if (it == j.end()) badRequest("missing field 'opInvocation'");
  if (it->is_string()) return orBadRequest([&] { return parseInvocation(it->get<std::string>()); });
  if (!it->is_object()) badRequest("opInvocation must be a script line or {op, args}");
  OpInvocation inv;
  inv.op = stringField(*it, "op");
  if (auto a = it->find("args"); a != it->end()) {
    if (!a->is_array()) badRequest("args must be an array of strings");
    for (const auto& x : *a) {
      if (!x.is_string()) badRequest("args must be an array of strings");
      inv.args.push_back(x.get<std::string>());
    }
  }
  orBadRequest([&] { return opUsage(inv.op); });
  return inv;
}

FoldRequest foldFrom(const json& j) {
  FoldRequest r;
  r.range = orBadRequest([&] { return parseCompRangeSel(stringField(j, "range")); });
  r.typeName = stringField(j, "typeName");
  std::string kind = stringField(j, "kind", false);
  if (kind.empty() || kind == "data") r.kind = FoldKind::Data;
  else if (kind == "newtype") r.kind = FoldKind::Newtype;
  else if (kind == "alias" || kind == "type") r.kind = FoldKind::Alias;
  else badRequest("kind must be type, alias, newtype or data");
  r.consName = stringField(j, "consName", false);
  if (auto it = j.find("introduce"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) badRequest("introduce must be a boolean");
    r.introduce = it->get<bool>();
  }
  return r;
}

}  // namespace

struct RefactorService::Impl {
  struct Entry {
    std::mutex lock;
    Session session;
    explicit Entry(Module m) : session(std::move(m)) {}
  };

  std::mutex lock;
  std::map<std::string, std::shared_ptr<Entry>> sessions;
  std::mt19937_64 rng{std::random_device{}()};

  std::string newId() {
    static const char* hex = "0123456789abcdef";
    std::string id;
    for (int i = 0; i < 16; ++i) id += hex[rng() % 16];
    return id;
  }

  std::shared_ptr<Entry> find(const std::string& id) {
    std::lock_guard g(lock);
    auto it = sessions.find(id);
    if (it == sessions.end())
      throw HttpError{404, {{"error", {{"code", "UnknownSession"},
                                       {"detail", "no session " + id},
                                       {"locations", json::array()}}}}};
    return it->second;
  }

  json open(const json& body) {
    std::string source = stringField(body, "source");
    Module m;
    try {
      m = parseModule(source);
    } catch (const Error& e) {
      json diag = errorJson(e);
      if (const auto* se = dynamic_cast<const SyntaxError*>(&e))
        diag["locations"] = {std::to_string(se->line()) + ":" + std::to_string(se->column())};
      throw HttpError{400, {{"error", diag}, {"diagnostics", json::array({diag})}}};
    }
    auto entry = std::make_shared<Entry>(std::move(m));
    std::string id;
    {
      std::lock_guard g(lock);
      do id = newId();
      while (sessions.count(id));
      sessions[id] = entry;
    }
    json out = rendering(entry->session.current());
    out["sessionId"] = id;
    out["diagnostics"] = json::array();
    return out;
  }

  static json focusJson(const Session& s) {
    return s.focus() ? json(toString(*s.focus())) : json(nullptr);
  }

  ServiceResponse sessionCall(const std::string& method, const std::string& id,
                              const std::string& verb, const json& body,
                              const std::map<std::string, std::string>& query) {
    auto entry = find(id);
    std::lock_guard g(entry->lock);
    Session& s = entry->session;
    auto expect = [&](const char* m) {
      if (method != m) throw HttpError{405, {{"error", {{"code", "MethodNotAllowed"},
                                                         {"detail", method + " " + verb},
                                                         {"locations", json::array()}}}}};
    };
    auto refusalOr = [](const TrafoResult& r) {
      return ServiceResponse{r.ok ? 200 : 409, resultJson(r).dump()};
    };
    if (verb == "source") {
      expect("GET");
      json out = rendering(s.current());
      out["focus"] = focusJson(s);
      return {200, out.dump()};
    }
    if (verb == "focus") {
      expect("POST");
      auto it = body.find("selector");
      if (it == body.end()) badRequest("missing field 'selector'");
      if (it->is_null() || (it->is_string() && it->get<std::string>().empty())) {
        s.setFocus(std::nullopt);
      } else {
        if (!it->is_string()) badRequest("selector must be a string");
        FocusTarget t = orBadRequest([&] { return parseFocusTarget(it->get<std::string>()); });
        orBadRequest([&] {
          s.setFocus(t);
          return 0;
        });
      }
      json out = s.focus() ? rendering(selectorToFocus(s.current(), *s.focus()))
                           : rendering(s.current());
      out["focus"] = focusJson(s);
      return {200, out.dump()};
    }
    if (verb == "ops") {
      expect("GET");
      json ops = json::array();
      for (const auto& inv : applicableOps(s.current(), s.focus())) {
        json j = invocationJson(inv);
        j["usage"] = opUsage(inv.op);
        ops.push_back(j);
      }
      return {200, json{{"focus", focusJson(s)}, {"ops", ops}}.dump()};
    }
    if (verb == "apply") {
      expect("POST");
      return refusalOr(s.apply(invocationFrom(body)));
    }
    if (verb == "fold") {
      expect("POST");
      return refusalOr(s.fold(foldFrom(body)));
    }
    if (verb == "todos") {
      expect("GET");
      return {200, json{{"todos", todosJson(s.todos())}}.dump()};
    }
    if (verb == "history") {
      expect("GET");
      json h = json::array();
      for (const auto& e : s.history()) h.push_back(invocationJson(e.inv));
      return {200, json{{"history", h}}.dump()};
    }
    if (verb == "undo") {
      expect("POST");
      try {
        s.undo();
      } catch (const Error& e) {
        return {409, json{{"ok", false}, {"error", errorJson(e)}}.dump()};
      }
      json out = rendering(s.current());
      out["ok"] = true;
      return {200, out.dump()};
    }
    if (verb == "occurrences") {
      expect("GET");
      std::string text;
      if (auto q = query.find("predicate"); q != query.end()) text = q->second;
      else text = stringField(body, "predicate");
      TypePredicate p = orBadRequest([&] { return parsePredicate(text); });
      json sels = json::array();
      for (const auto& sel : selectorsMatching(s.current(), p)) sels.push_back(toString(sel));
      return {200, json{{"predicate", toString(p)}, {"selectors", sels}}.dump()};
    }
    throw HttpError{404, {{"error", {{"code", "UnknownEndpoint"},
                                     {"detail", "no endpoint " + verb},
                                     {"locations", json::array()}}}}};
  }
};

RefactorService::RefactorService() : impl_(std::make_unique<Impl>()) {}
RefactorService::~RefactorService() = default;

ServiceResponse RefactorService::handle(const std::string& method, const std::string& path,
                                        const std::string& body,
                                        const std::map<std::string, std::string>& query) {
  try {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start < path.size()) {
      std::size_t slash = path.find('/', start);
      if (slash == std::string::npos) slash = path.size();
      if (slash > start) parts.push_back(path.substr(start, slash - start));
      start = slash + 1;
    }
    json j = parseBody(body);
    if (parts.size() == 1 && parts[0] == "session" && method == "POST")
      return {200, impl_->open(j).dump()};
    if (parts.size() == 3 && parts[0] == "session")
      return impl_->sessionCall(method, parts[1], parts[2], j, query);
    throw HttpError{404, {{"error", {{"code", "UnknownEndpoint"},
                                     {"detail", method + " " + path},
                                     {"locations", json::array()}}}}};
  } catch (const HttpError& e) {
    return {e.status, e.body.dump()};
  } catch (const Error& e) {
    return {409, json{{"ok", false}, {"error", errorJson(e)}}.dump()};
  }
}

struct HttpServer::Impl {
  RefactorService& service;
  httplib::Server server;
  std::thread worker;

  explicit Impl(RefactorService& s) : service(s) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> query(req.params.begin(), req.params.end());
      ServiceResponse r = service.handle(req.method, req.path, req.body, query);
      res.status = r.status;
      res.set_content(r.body, "application/json");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
  }
};

HttpServer::HttpServer(RefactorService& service)
    : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                        : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) return -1;
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

bool HttpServer::listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace dtr
