#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "urbanbench/core/error.hpp"

namespace urbanbench::verify {

using nlohmann::json;

enum class Decision { kPending, kAccept, kReject };

inline const char* decision_name(Decision d) {
  switch (d) {
    case Decision::kAccept: return "accept";
    case Decision::kReject: return "reject";
    default: return "pending";
  }
}

struct VerificationItem {
  std::string id;
  std::string panorama;
  json pose_before = json::object();
  json pose_after = json::object();
  std::map<std::string, std::string> overlays;  // before | after | aerial -> image file
  Decision decision = Decision::kPending;
  std::optional<std::string> decided_at;
  std::optional<double> latency;  // seconds
};

inline VerificationItem item_from_json(const json& j) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
    fail(ErrorCode::kSchema, "verification item needs a string id");
  VerificationItem it;
  it.id = j["id"].get<std::string>();
  if (it.id.find('/') != std::string::npos) fail(ErrorCode::kSchema, "item id must not contain '/': " + it.id);
  it.panorama = j.value("panorama", "");
  if (j.contains("pose_before")) it.pose_before = j["pose_before"];
  if (j.contains("pose_after")) it.pose_after = j["pose_after"];
  if (j.contains("overlays")) {
    if (!j["overlays"].is_object()) fail(ErrorCode::kSchema, "item " + it.id + ": overlays must be an object");
    for (const auto& [k, v] : j["overlays"].items()) {
      if (k != "before" && k != "after" && k != "aerial") fail(ErrorCode::kSchema, "item " + it.id + ": unknown overlay " + k);
      if (!v.is_string()) fail(ErrorCode::kSchema, "item " + it.id + ": overlay path must be a string");
      it.overlays[k] = v.get<std::string>();
    }
  }
  return it;
}

inline json item_to_json(const VerificationItem& it) {
  json o = json::object();
  for (const auto& [k, v] : it.overlays) o[k] = v;
  return {{"id", it.id}, {"panorama", it.panorama}, {"pose_before", it.pose_before}, {"pose_after", it.pose_after},
          {"overlays", o}};
}

// ISO-8601 UTC with milliseconds.
inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms % 1000));
  return buf;
}

// Append-only JSON-lines file; every append reaches the disk before it
// returns.
class Journal {
 public:
  explicit Journal(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) fail(ErrorCode::kMissingFile, "cannot open journal " + path_.string());
  }
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;
  ~Journal() {
    if (fd_ >= 0) ::close(fd_);
  }

  void append(const json& line) {
    const std::string s = line.dump() + "\n";
    std::size_t done = 0;
    while (done < s.size()) {
      const ssize_t n = ::write(fd_, s.data() + done, s.size() - done);
      if (n < 0) fail(ErrorCode::kMissingFile, "journal write failed: " + path_.string());
      done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) fail(ErrorCode::kMissingFile, "journal fsync failed: " + path_.string());
  }

  // Drops a torn final line left by a crash so later appends start clean.
  static void repair(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) return;
    std::ifstream in(path, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t keep = text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1;
    if (keep != text.size()) std::filesystem::resize_file(path, keep);
  }

  // Complete lines only: a torn final line from a crash is ignored.
  static std::vector<json> read(const std::filesystem::path& path) {
    std::vector<json> out;
    std::ifstream in(path, std::ios::binary);
    if (!in) return out;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t start = 0, lineno = 1;
    while (start < text.size()) {
      const std::size_t nl = text.find('\n', start);
      if (nl == std::string::npos) break;
      const std::string line = text.substr(start, nl - start);
      if (!line.empty()) {
        try {
          out.push_back(json::parse(line));
        } catch (const json::parse_error&) {
          fail(ErrorCode::kSchema, path.string() + ": malformed journal line " + std::to_string(lineno));
        }
      }
      start = nl + 1;
      ++lineno;
    }
    return out;
  }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

struct Response {
  int status = 200;
  json body;
};

// Decision state for a fixed list of items, rebuilt from the journal on
// start. The journal append is the only serialization point.
class VerifyService {
 public:
  using Clock = std::function<std::chrono::system_clock::time_point()>;

  VerifyService(std::vector<VerificationItem> items, const std::filesystem::path& journal,
                Clock clock = [] { return std::chrono::system_clock::now(); })
      : items_(std::move(items)), clock_(std::move(clock)) {
    for (std::size_t i = 0; i < items_.size(); ++i)
      if (!index_.emplace(items_[i].id, i).second) fail(ErrorCode::kSchema, "duplicate item id " + items_[i].id);
    for (const auto& line : Journal::read(journal)) replay(line);
    Journal::repair(journal);
    journal_.emplace(journal);
  }

  std::size_t size() const { return items_.size(); }

  Response queue(std::size_t offset, std::size_t limit) const {
    std::lock_guard lock(mu_);
    std::vector<std::string> pending;
    for (const auto& it : items_)
      if (it.decision == Decision::kPending) pending.push_back(it.id);
    json ids = json::array();
    for (std::size_t i = offset; i < pending.size() && i < offset + limit; ++i) ids.push_back(pending[i]);
    return {200, {{"total_pending", pending.size()}, {"offset", offset}, {"limit", limit}, {"items", ids}}};
  }

  // Metadata plus overlay URLs. The first fetch starts the latency clock.
  Response item(const std::string& id) {
    std::lock_guard lock(mu_);
    auto it = index_.find(id);
    if (it == index_.end()) return not_found(id);
    auto& item = items_[it->second];
    shown_.try_emplace(id, clock_());
    json j = item_to_json(item);
    json urls = json::object();
    for (const auto& [k, _] : item.overlays) urls[k] = "/api/item/" + id + "/overlay/" + k;
    j["overlay_urls"] = urls;
    j["decision"] = decision_name(item.decision);
    j["decided_at"] = item.decided_at ? json(*item.decided_at) : json(nullptr);
    j["decision_latency"] = item.latency ? json(*item.latency) : json(nullptr);
    return {200, j};
  }

  std::optional<std::string> overlay_path(const std::string& id, const std::string& kind) const {
    std::lock_guard lock(mu_);
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    const auto& ov = items_[it->second].overlays;
    auto o = ov.find(kind);
    if (o == ov.end()) return std::nullopt;
    return o->second;
  }

  // Body: {"decision": "accept" | "reject", "latency_s": optional seconds}.
  Response decide(const std::string& id, const std::string& body) {
    json req;
    try {
      req = json::parse(body);
    } catch (const json::parse_error&) {
      return {400, {{"error", "body is not valid JSON"}}};
    }
    if (!req.is_object() || !req.contains("decision") || !req["decision"].is_string())
      return {400, {{"error", "body needs a string field 'decision'"}}};
    const std::string d = req["decision"].get<std::string>();
    if (d != "accept" && d != "reject") return {400, {{"error", "decision must be 'accept' or 'reject'"}}};
    std::optional<double> latency;
    if (req.contains("latency_s")) {
      if (!req["latency_s"].is_number() || !(req["latency_s"].get<double>() >= 0.0))
        return {400, {{"error", "latency_s must be a non-negative number"}}};
      latency = req["latency_s"].get<double>();
    }
    const Decision want = d == "accept" ? Decision::kAccept : Decision::kReject;

    std::lock_guard lock(mu_);
    auto it = index_.find(id);
    if (it == index_.end()) return not_found(id);
    auto& item = items_[it->second];
    if (item.decision == want) return {200, {{"id", id}, {"decision", d}, {"changed", false}}};
    if (item.decision != Decision::kPending)
      return {409, {{"error", "item " + id + " is already decided: " + decision_name(item.decision)}}};
    const auto now = clock_();
    if (!latency) {
      auto s = shown_.find(id);
      if (s != shown_.end()) latency = std::max(0.0, std::chrono::duration<double>(now - s->second).count());
    }
    json line{{"id", id}, {"decision", d}, {"decided_at", utc_timestamp(now)}};
    line["latency_s"] = latency ? json(*latency) : json(nullptr);
    journal_->append(line);  // durable before the state changes
    apply(item, want, line["decided_at"].get<std::string>(), latency);
    return {200, {{"id", id}, {"decision", d}, {"changed", true}}};
  }

  Response progress() const {
    std::lock_guard lock(mu_);
    std::size_t acc = 0, rej = 0;
    std::vector<double> lat;
    for (const auto& it : items_) {
      acc += it.decision == Decision::kAccept;
      rej += it.decision == Decision::kReject;
      if (it.latency) lat.push_back(*it.latency);
    }
    json j{{"total", items_.size()}, {"pending", items_.size() - acc - rej}, {"accepted", acc}, {"rejected", rej},
           {"decided", acc + rej}};
    j["acceptance_rate"] = acc + rej ? json(static_cast<double>(acc) / static_cast<double>(acc + rej)) : json(nullptr);
    if (lat.empty()) {
      j["median_latency_s"] = nullptr;
    } else {
      std::sort(lat.begin(), lat.end());
      const std::size_t n = lat.size();
      j["median_latency_s"] = n % 2 ? lat[n / 2] : 0.5 * (lat[n / 2 - 1] + lat[n / 2]);
    }
    return {200, j};
  }

  // Current decisions as journal-shaped records, in item order.
  json snapshot() const {
    std::lock_guard lock(mu_);
    json out = json::array();
    for (const auto& it : items_)
      out.push_back({{"id", it.id},
                     {"decision", decision_name(it.decision)},
                     {"decided_at", it.decided_at ? json(*it.decided_at) : json(nullptr)},
                     {"latency_s", it.latency ? json(*it.latency) : json(nullptr)}});
    return out;
  }

 private:
  static Response not_found(const std::string& id) { return {404, {{"error", "unknown item " + id}}}; }

  static void apply(VerificationItem& item, Decision d, std::string at, std::optional<double> latency) {
    item.decision = d;
    item.decided_at = std::move(at);
    item.latency = latency;
  }

  void replay(const json& line) {
    if (!line.is_object() || !line.contains("id") || !line["id"].is_string() || !line.contains("decision"))
      fail(ErrorCode::kSchema, "journal line lacks id or decision");
    const std::string id = line["id"].get<std::string>();
    auto it = index_.find(id);
    if (it == index_.end()) fail(ErrorCode::kSchema, "journal refers to unknown item " + id);
    const std::string d = line["decision"].get<std::string>();
    if (d != "accept" && d != "reject") fail(ErrorCode::kSchema, "journal has bad decision for " + id);
    auto& item = items_[it->second];
    const Decision want = d == "accept" ? Decision::kAccept : Decision::kReject;
    if (item.decision != Decision::kPending && item.decision != want)
      fail(ErrorCode::kConflict, "journal holds conflicting decisions for " + id);
    if (item.decision == want) return;
    std::optional<double> latency;
    if (line.contains("latency_s") && line["latency_s"].is_number()) latency = line["latency_s"].get<double>();
    apply(item, want, line.value("decided_at", ""), latency);
  }

  std::vector<VerificationItem> items_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::chrono::system_clock::time_point> shown_;
  Clock clock_;
  std::optional<Journal> journal_;
  mutable std::mutex mu_;
};

}  // namespace urbanbench::verify
