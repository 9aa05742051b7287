#pragma once

// Session-oriented HTTP/JSON facade over the solver.
//
//   POST /sessions                           -> {id, revision}
//   GET  /sessions/{id}                      -> full session state
//   PUT  /sessions/{id}/prescription         -> {dimension, free_slots, revision} | 422
//   POST /sessions/{id}/repair   {mode}      -> same as above, after repairing the pair
//   PUT  /sessions/{id}/free/{i,j}  [x,y,z]  -> {revision}
//   GET  /sessions/{id}/net                  -> net document
//   GET  /sessions/{id}/mesh?samples=K&diagonals=1 -> OBJ
//   GET  /sessions/{id}/report               -> report document
//
// Mutations accept an If-Match header holding the expected revision and
// answer 409 when it is stale. Mutations of one session are serialized.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "diagbez/constraints.hpp"
#include "diagbez/diagonals.hpp"
#include "diagbez/io.hpp"

// After Eigen: resolv.h, pulled in here, defines a _res macro.
#include <httplib.h>

namespace diagbez::service {

using Json = io::Json;

inline constexpr int kMaxMeshSamples = 256;

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class DesignService {
 public:
  Response handle(const Request& req) {
    try {
      return route(req);
    } catch (const HttpError& e) {
      return json_response(e.status, e.body);
    } catch (const std::exception& e) {
      Json body;
      body["code"] = "internal";
      body["message"] = e.what();
      return json_response(500, body);
    }
  }

  /// All sessions as one JSON object (prescriptions as documents).
  Json snapshot() const {
    std::shared_lock lock(sessions_mu_);
    Json out;
    out["kind"] = "session_snapshot";
    out["version"] = io::kVersion;
    out["next_id"] = next_id_.load();
    Json list = Json::array();
    for (const auto& [id, s] : sessions_) {
      std::lock_guard guard(s->mu);
      Json e;
      e["id"] = id;
      e["revision"] = s->revision;
      if (s->prescription) e["prescription"] = io::to_json(*s->prescription);
      e["free_values"] = free_values_json(s->free_values);
      list.push_back(std::move(e));
    }
    out["sessions"] = std::move(list);
    return out;
  }

  /// Replaces all sessions with a snapshot; prescriptions are re-solved.
  void restore(const Json& snap) {
    std::unique_lock lock(sessions_mu_);
    sessions_.clear();
    next_id_ = snap.value("next_id", std::uint64_t{1});
    for (const auto& e : snap.at("sessions")) {
      auto s = std::make_shared<Session>();
      s->id = e.at("id").get<std::string>();
      s->revision = e.at("revision").get<std::uint64_t>();
      if (e.contains("prescription")) {
        s->prescription = io::from_json(e.at("prescription")).as<Prescription>();
        try {
          s->space = solve_space(build_system(*s->prescription));
        } catch (const Error&) {
          s->space.reset();
        }
      }
      for (const auto& fv : e.at("free_values"))
        s->free_values[io::detail::slot(fv.at("slot"), s->prescription ? s->prescription->n : 0, "/slot")] =
            io::detail::point(fv.at("point"), "/point");
      sessions_[s->id] = std::move(s);
    }
  }

 private:
  struct Session {
    std::string id;
    std::optional<Prescription> prescription;
    std::optional<SolutionSpace> space;
    FreeValues free_values;
    std::uint64_t revision = 0;
    mutable std::mutex mu;
  };

  struct HttpError {
    int status;
    Json body;
  };

  static Response json_response(int status, const Json& body) {
    return Response{status, "application/json", body.dump() + "\n"};
  }

  [[noreturn]] static void fail(int status, std::string_view code, const std::string& message) {
    Json body;
    body["code"] = std::string(code);
    body["message"] = message;
    throw HttpError{status, std::move(body)};
  }

  static Json free_values_json(const FreeValues& values) {
    Json list = Json::array();
    for (const auto& [slot, p] : values) {
      Json e;
      e["slot"] = io::detail::slot_json(slot);
      e["point"] = io::detail::point_json(p);
      list.push_back(std::move(e));
    }
    return list;
  }

  static std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
      const auto slash = path.find('/', start);
      const auto end = slash == std::string::npos ? path.size() : slash;
      if (end > start) parts.push_back(path.substr(start, end - start));
      if (slash == std::string::npos) break;
      start = slash + 1;
    }
    return parts;
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(sessions_mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) fail(404, "unknown_session", "no session '" + id + "'");
    return it->second;
  }

  static void check_revision(const Request& req, const Session& s) {
    auto it = req.headers.find("if-match");
    if (it == req.headers.end()) return;
    std::string tag = it->second;
    if (tag.size() >= 2 && tag.front() == '"' && tag.back() == '"') tag = tag.substr(1, tag.size() - 2);
    if (tag != std::to_string(s.revision)) {
      Json body;
      body["code"] = "revision_conflict";
      body["message"] = "stale revision " + tag;
      body["revision"] = s.revision;
      throw HttpError{409, std::move(body)};
    }
  }

  static Json parse_body(const Request& req) {
    try {
      return Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      fail(422, "parse", e.what());
    }
  }

  static Json error_body(const Error& e) {
    Json body;
    body["code"] = std::string(to_string(e.code()));
    body["message"] = e.what();
    if (const auto* pe = dynamic_cast<const PrescriptionError*>(&e)) {
      Json res = Json::array();
      for (const auto& r : pe->residuals()) res.push_back(io::detail::point_json(r));
      body["residuals"] = std::move(res);
      if (pe->report()) body["report"] = io::to_json(*pe->report());
    }
    return body;
  }

  // Stores the prescription (even when it fails validation, so it can be
  // repaired later) and tries to solve it. Caller holds the session lock.
  static Response install(Session& s, Prescription p) {
    s.prescription = std::move(p);
    s.space.reset();
    s.free_values.clear();
    ++s.revision;
    try {
      s.space = solve_space(build_system(*s.prescription));
    } catch (const Error& e) {
      Json body = error_body(e);
      body["revision"] = s.revision;
      return json_response(422, body);
    }
    Json body;
    body["dimension"] = s.space->dimension();
    Json slots = Json::array();
    for (const auto& slot : s.space->free_slots) slots.push_back(io::detail::slot_json(slot));
    body["free_slots"] = std::move(slots);
    body["revision"] = s.revision;
    return json_response(200, body);
  }

  static ControlNet realized(const Session& s) {
    if (!s.space) fail(422, "unsolved", "session has no solved prescription");
    return realize(*s.space, s.free_values);
  }

  Response route(const Request& req) {
    const auto parts = split_path(req.path);
    if (parts.empty() || parts[0] != "sessions") fail(404, "not_found", "no route " + req.path);

    if (parts.size() == 1) {
      if (req.method != "POST") fail(405, "method_not_allowed", req.method + " " + req.path);
      auto s = std::make_shared<Session>();
      s->id = "s" + std::to_string(next_id_++);
      {
        std::unique_lock lock(sessions_mu_);
        sessions_[s->id] = s;
      }
      Json body;
      body["id"] = s->id;
      body["revision"] = s->revision;
      return json_response(201, body);
    }

    auto session = find(parts[1]);
    Session& s = *session;
    const std::string sub = parts.size() >= 3 ? parts[2] : "";

    if (parts.size() == 2 && req.method == "GET") {
      std::lock_guard guard(s.mu);
      Json body;
      body["id"] = s.id;
      body["revision"] = s.revision;
      if (s.prescription) body["prescription"] = io::to_json(*s.prescription);
      if (s.space) {
        body["dimension"] = s.space->dimension();
        Json slots = Json::array();
        for (const auto& slot : s.space->free_slots) slots.push_back(io::detail::slot_json(slot));
        body["free_slots"] = std::move(slots);
      }
      body["free_values"] = free_values_json(s.free_values);
      return json_response(200, body);
    }

    if (parts.size() == 3 && sub == "prescription" && req.method == "PUT") {
      const Json doc = parse_body(req);
      Prescription p;
      try {
        p = io::from_json(doc).as<Prescription>();
      } catch (const Error& e) {
        return json_response(422, error_body(e));
      }
      std::lock_guard guard(s.mu);
      check_revision(req, s);
      return install(s, std::move(p));
    }

    if (parts.size() == 3 && sub == "repair" && req.method == "POST") {
      const Json body = req.body.empty() ? Json::object() : parse_body(req);
      RepairMode mode;
      std::lock_guard guard(s.mu);
      check_revision(req, s);
      if (!s.prescription) fail(422, "unsolved", "session has no prescription to repair");
      mode = body.contains("mode") ? parse_mode(body["mode"]) : default_repair_mode(s.prescription->n);
      Prescription p = *s.prescription;
      if (mode == RepairMode::Elevate && p.mode != PrescriptionMode::DiagonalsOnly)
        fail(422, "mode_degree", "elevation changes the surface degree; only diagonals mode can be elevated");
      try {
        p.pair = repair(p.pair, mode);
      } catch (const Error& e) {
        return json_response(422, error_body(e));
      }
      p.n = p.pair.n;
      return install(s, std::move(p));
    }

    if (parts.size() == 4 && sub == "free" && req.method == "PUT") {
      const Json body = parse_body(req);
      Point value;
      try {
        value = io::detail::point(body.is_object() && body.contains("point") ? body["point"] : body, "/point");
      } catch (const Error& e) {
        return json_response(422, error_body(e));
      }
      std::lock_guard guard(s.mu);
      check_revision(req, s);
      if (!s.space) fail(404, "unknown_slot", "session has no free slots");
      const Slot slot = parse_slot(parts[3]);
      const auto& fs = s.space->free_slots;
      if (std::find(fs.begin(), fs.end(), slot) == fs.end()) fail(404, "unknown_slot", to_string(slot) + " is not free");
      if (value.size() != s.space->pair.dim()) fail(422, "shape", "point has the wrong dimension");
      s.free_values[slot] = value;
      ++s.revision;
      Json out;
      out["revision"] = s.revision;
      return json_response(200, out);
    }

    if (parts.size() == 3 && req.method == "GET" && sub == "net") {
      std::lock_guard guard(s.mu);
      return Response{200, "application/json", io::write_document(realized(s))};
    }

    if (parts.size() == 3 && req.method == "GET" && sub == "mesh") {
      int samples = 16;
      bool diagonals = false;
      if (auto it = req.query.find("samples"); it != req.query.end()) {
        try {
          samples = std::stoi(it->second);
        } catch (const std::exception&) {
          fail(422, "invalid_argument", "samples must be an integer");
        }
      }
      if (auto it = req.query.find("diagonals"); it != req.query.end()) diagonals = it->second == "1" || it->second == "true";
      if (samples < 1 || samples > kMaxMeshSamples)
        fail(422, "invalid_argument", "samples must lie in 1.." + std::to_string(kMaxMeshSamples));
      std::lock_guard guard(s.mu);
      const ControlNet net = realized(s);
      verify_diagonals(s, net);
      try {
        return Response{200, "text/plain", io::export_mesh(net, samples, diagonals)};
      } catch (const Error& e) {
        return json_response(422, error_body(e));
      }
    }

    if (parts.size() == 3 && req.method == "GET" && sub == "report") {
      std::lock_guard guard(s.mu);
      if (!s.prescription) fail(422, "unsolved", "session has no prescription");
      return Response{200, "application/json", io::write_document(check_compatibility(s.prescription->pair))};
    }

    fail(404, "not_found", "no route " + req.method + " " + req.path);
  }

  static RepairMode parse_mode(const Json& j) {
    if (!j.is_string()) fail(422, "invalid_argument", "mode must be a string");
    try {
      return parse_repair_mode(j.get<std::string>());
    } catch (const Error& e) {
      fail(422, "invalid_argument", e.what());
    }
  }

  static Slot parse_slot(const std::string& text) {
    const auto comma = text.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument(text);
      return Slot{std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
    } catch (const std::logic_error&) {
      fail(404, "unknown_slot", "slot '" + text + "' is not \"i,j\"");
    }
  }

  // Every served mesh must come from a net whose diagonals match the
  // prescribed pair.
  static void verify_diagonals(const Session& s, const ControlNet& net) {
    const auto got = extract_diagonals(net);
    const auto& want = s.space->pair;
    double worst = 0.0;
    for (int k = 0; k <= 2 * want.n; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      worst = std::max({worst, (got.q[uk] - want.q[uk]).norm(), (got.r[uk] - want.r[uk]).norm()});
    }
    if (worst > kDefaultTolerance * std::max(s.space->scale, 1.0))
      fail(500, "internal", "realized net drifted from the prescribed diagonals by " + std::to_string(worst));
  }

  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> next_id_{1};
};

/// Routes every request of an httplib server to the service.
inline void bind(httplib::Server& server, DesignService& service) {
  auto handler = [&service](const httplib::Request& hreq, httplib::Response& hres) {
    Request req;
    req.method = hreq.method;
    req.path = hreq.path;
    for (const auto& [k, v] : hreq.params) req.query[k] = v;
    for (const auto& [k, v] : hreq.headers) {
      std::string key = k;
      for (auto& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      req.headers[key] = v;
    }
    req.body = hreq.body;
    const Response res = service.handle(req);
    hres.status = res.status;
    hres.set_content(res.body, res.content_type);
  };
  const std::string any = R"(/.*)";
  server.Get(any, handler);
  server.Post(any, handler);
  server.Put(any, handler);
}

}  // namespace diagbez::service
