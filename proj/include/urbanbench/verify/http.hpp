#pragma once

#include <charconv>
#include <fstream>
#include <string>

#include "httplib.h"
#include "urbanbench/verify/service.hpp"

namespace urbanbench::verify {

namespace detail {

inline void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

inline bool parse_size(const std::string& s, std::size_t& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace detail

// Attaches the verification endpoints to `server`. The service must outlive it.
inline void register_routes(httplib::Server& server, VerifyService& svc) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  server.Get("/api/queue", [&svc](const httplib::Request& req, httplib::Response& res) {
    std::size_t offset = 0, limit = 50;
    if ((req.has_param("offset") && !detail::parse_size(req.get_param_value("offset"), offset)) ||
        (req.has_param("limit") && !detail::parse_size(req.get_param_value("limit"), limit)) || limit == 0) {
      detail::send(res, {400, {{"error", "offset and limit must be non-negative integers, limit > 0"}}});
      return;
    }
    detail::send(res, svc.queue(offset, limit));
  });

  server.Get(R"(/api/item/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    detail::send(res, svc.item(req.matches[1]));
  });

  server.Get(R"(/api/item/([^/]+)/overlay/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1], kind = req.matches[2];
    const auto path = svc.overlay_path(id, kind);
    std::ifstream in;
    if (path) in.open(*path, std::ios::binary);
    if (!in.is_open()) {
      detail::send(res, {404, {{"error", "no " + kind + " overlay for item " + id}}});
      return;
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    res.status = 200;
    res.set_content(bytes, "image/png");
  });

  server.Post(R"(/api/item/([^/]+)/decision)", [&svc](const httplib::Request& req, httplib::Response& res) {
    detail::send(res, svc.decide(req.matches[1], req.body));
  });

  server.Get("/api/progress",
             [&svc](const httplib::Request&, httplib::Response& res) { detail::send(res, svc.progress()); });
}

}  // namespace urbanbench::verify
