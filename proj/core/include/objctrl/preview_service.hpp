// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "objctrl/tensor_io.hpp"

namespace objctrl {

struct ServiceResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Raw upload bytes. Depth is OTSR, or a 16-bit PNG accompanied by a range.
struct UploadedAssets {
  std::string image;
  std::string depth;
  std::string mask;
  std::optional<DepthRange> depth_range;
};

/// Session store and request handlers behind the authoring UI. Handlers are
/// transport-agnostic; serve() binds them to HTTP routes:
///   POST /api/session                    multipart: image, depth, mask[, depth_min, depth_max]
///   POST /api/session/{id}/trajectory    {"points": [[x,y],...], "frames", "theta", "normalize"}
///   POST /api/session/{id}/preset        {"kind", "mag", "frames", "pivot_depth"}
///   GET  /api/session/{id}/bundle        zip of the control bundle for the last request
///   GET  /                               UI bundle (static files) or a placeholder page
/// Errors are {"error": code, "message": text}.
class PreviewService {
 public:
  using Clock = std::chrono::steady_clock;

  explicit PreviewService(std::chrono::seconds ttl = std::chrono::hours(1),
                          std::function<Clock::time_point()> now = Clock::now);
  ~PreviewService();

  PreviewService(const PreviewService &) = delete;
  PreviewService &operator=(const PreviewService &) = delete;

  ServiceResponse create_session(const UploadedAssets &assets);
  ServiceResponse post_trajectory(const std::string &session_id, std::string_view body);
  ServiceResponse post_preset(const std::string &session_id, std::string_view body);
  ServiceResponse get_bundle(const std::string &session_id);

  std::size_t session_count() const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string &id);
  void purge_expired();

  std::chrono::seconds ttl_;
  std::function<Clock::time_point()> now_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path ui_dir;  // served at / when set
};

/// Runs an HTTP server in a background thread until stop() or destruction.
class HttpServer {
 public:
  HttpServer(PreviewService &service, const ServeOptions &options);
  ~HttpServer();

  HttpServer(const HttpServer &) = delete;
  HttpServer &operator=(const HttpServer &) = delete;

  int port() const;
  void stop();
  /// Blocks until the server stops.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace objctrl
