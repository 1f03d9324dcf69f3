// Copyright 2026 The ObjCtrl Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "objctrl/preview_service.hpp"

#include <nlohmann/json.hpp>
#include <thread>
#include <vector>

#include "objctrl/camera_presets.hpp"
#include "objctrl/digest.hpp"
#include "objctrl/error.hpp"
#include "objctrl/json_formats.hpp"
#include "objctrl/pipeline.hpp"
#include "objctrl/warp_engine.hpp"

// After Eigen: <resolv.h> (pulled in by httplib) defines a macro named _res.
#include <httplib.h>

namespace objctrl {

using nlohmann::json;

struct PreviewService::Session {
  std::mutex mutex;  // serializes requests on this session
  Clock::time_point last_used;
  Image image;
  DepthMap depth;
  Mask mask;
  json input_record;
  std::optional<Guidance> guidance;
  RunOptions options;
};

namespace {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kValidation:
    case ErrorCode::kDomain:
    case ErrorCode::kShape: return 422;
    case ErrorCode::kUsage:
    case ErrorCode::kFormat: return 400;
    case ErrorCode::kIo: return 500;
  }
  return 500;
}

ServiceResponse error_response(int status, std::string_view code, std::string_view message) {
  return {status, "application/json",
          json{{"error", code}, {"message", message}}.dump()};
}

ServiceResponse json_response(const json &doc) { return {200, "application/json", doc.dump()}; }

template <typename Fn>
ServiceResponse guarded(Fn &&fn) {
  try {
    return fn();
  } catch (const Error &e) {
    return error_response(http_status(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception &e) {
    return error_response(500, "internal", e.what());
  }
}

json preview_payload(const ObjectMotion &motion, const std::vector<Mask> &masks) {
  json encoded = json::array();
  for (const auto &m : masks) encoded.push_back(base64_encode(encode_mask(m)));
  json path = json::array();
  for (const auto &pose : motion.poses.frames) {
    path.push_back({pose.translation.x(), pose.translation.y(), pose.translation.z()});
  }
  json depths = json::array();
  if (motion.trajectory) {
    for (const auto &p : motion.trajectory->points) depths.push_back(p.depth);
  }
  return {{"traj3d", motion.trajectory ? to_json(*motion.trajectory) : json(nullptr)},
          {"poses", to_json(motion.poses)},
          {"masks", encoded},
          {"camera_path", path},
          {"depths", depths}};
}

}  // namespace

PreviewService::PreviewService(std::chrono::seconds ttl, std::function<Clock::time_point()> now)
    : ttl_(ttl), now_(std::move(now)) {}

PreviewService::~PreviewService() = default;

std::size_t PreviewService::session_count() const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

void PreviewService::purge_expired() {
  const auto now = now_();
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second->last_used > ttl_) {
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

std::shared_ptr<PreviewService::Session> PreviewService::find(const std::string &id) {
  std::lock_guard lock(sessions_mutex_);
  purge_expired();
  auto it = sessions_.find(id);
  if (it == sessions_.end()) fail(ErrorCode::kNotFound, "unknown session '" + id + "'");
  it->second->last_used = now_();
  return it->second;
}

ServiceResponse PreviewService::create_session(const UploadedAssets &assets) {
  return guarded([&] {
    auto session = std::make_shared<Session>();
    session->image = decode_image(assets.image);
    session->depth = decode_depth(assets.depth, assets.depth_range);
    session->mask = decode_mask(assets.mask);
    require(session->depth.width() == session->image.width() &&
                session->depth.height() == session->image.height(),
            ErrorCode::kShape, "depth map and image dimensions differ");
    require(session->mask.width() == session->image.width() &&
                session->mask.height() == session->image.height(),
            ErrorCode::kShape, "object mask and image dimensions differ");
    require(!session->mask.empty(), ErrorCode::kValidation, "object mask is empty");
    session->input_record = {{"image", {{"sha256", sha256_hex(assets.image)}}},
                             {"depth", {{"sha256", sha256_hex(assets.depth)}}},
                             {"mask", {{"sha256", sha256_hex(assets.mask)}}}};

    std::lock_guard lock(sessions_mutex_);
    purge_expired();
    std::string id;
    do {
      id = random_token(16);
    } while (sessions_.count(id) != 0);
    session->last_used = now_();
    sessions_.emplace(id, std::move(session));
    return json_response({{"session", id}});
  });
}

ServiceResponse PreviewService::post_trajectory(const std::string &session_id,
                                                std::string_view body) {
  return guarded([&] {
    auto session = find(session_id);
    const json request = parse_json(body);
    require(request.is_object(), ErrorCode::kFormat, "request body must be a JSON object");
    if (request.contains("preset")) return post_preset(session_id, request["preset"].dump());

    std::lock_guard lock(session->mutex);
    RunOptions options;
    try {
      options.frames = request.value("frames", options.frames);
      options.smoothing.theta = request.value("theta", options.smoothing.theta);
      options.smoothing.normalize = request.value("normalize", options.smoothing.normalize);
    } catch (const json::exception &e) {
      fail(ErrorCode::kFormat, std::string("bad trajectory options: ") + e.what());
    }
    Trajectory2D stroke = trajectory2d_from_json(request);
    const Guidance guidance = stroke;
    const ObjectMotion motion = derive_motion(guidance, session->depth, options);
    const auto masks = warp_mask_sequence(session->mask, session->depth, motion.poses);
    session->guidance = guidance;
    session->options = options;
    return json_response(preview_payload(motion, masks));
  });
}

ServiceResponse PreviewService::post_preset(const std::string &session_id, std::string_view body) {
  return guarded([&] {
    auto session = find(session_id);
    const PresetSpec spec = preset_from_json(parse_json(body));
    std::lock_guard lock(session->mutex);
    RunOptions options;
    options.frames = spec.frames;
    const Guidance guidance = spec;
    const ObjectMotion motion = derive_motion(guidance, session->depth, options);
    const auto masks = warp_mask_sequence(session->mask, session->depth, motion.poses);
    session->guidance = guidance;
    session->options = options;
    return json_response(preview_payload(motion, masks));
  });
}

ServiceResponse PreviewService::get_bundle(const std::string &session_id) {
  return guarded([&] {
    auto session = find(session_id);
    std::lock_guard lock(session->mutex);
    if (!session->guidance) {
      return error_response(409, "no_guidance", "post a trajectory or preset first");
    }
    const ControlBundle bundle = compute_bundle(session->image, session->depth, session->mask,
                                                *session->guidance, session->options);
    json inputs = session->input_record;
    if (const auto *stroke = std::get_if<Trajectory2D>(&*session->guidance)) {
      inputs["guidance"] = {{"kind", "traj2d"}, {"trajectory", to_json(*stroke)}};
    } else {
      inputs["guidance"] = {{"kind", "preset"},
                            {"preset", to_json(std::get<PresetSpec>(*session->guidance))}};
    }
    return ServiceResponse{200, "application/zip",
                           make_zip(bundle_files(bundle, session->options, inputs))};
  });
}

// ---------------------------------------------------------------------------
// HTTP binding

namespace {

constexpr const char *kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>objctrl preview</title></head>"
    "<body><h1>objctrl preview service</h1><p>The authoring UI bundle is not installed. "
    "Start the server with <code>--ui-dir</code> pointing at a built UI, or use the JSON API "
    "under <code>/api/session</code>.</p></body></html>";

void reply(httplib::Response &res, const ServiceResponse &r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

std::optional<std::string> form_value(const httplib::Request &req, const std::string &key) {
  if (!req.has_file(key)) return std::nullopt;
  return req.get_file_value(key).content;
}

}  // namespace

struct HttpServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

HttpServer::HttpServer(PreviewService &service, const ServeOptions &options)
    : impl_(std::make_unique<Impl>()) {
  auto &server = impl_->server;

  server.Post("/api/session", [&service](const httplib::Request &req, httplib::Response &res) {
    if (!req.is_multipart_form_data()) {
      reply(res, error_response(400, "format", "expected multipart/form-data"));
      return;
    }
    UploadedAssets assets;
    auto image = form_value(req, "image");
    auto depth = form_value(req, "depth");
    auto mask = form_value(req, "mask");
    if (!image || !depth || !mask) {
      reply(res, error_response(400, "format", "image, depth and mask parts are required"));
      return;
    }
    assets.image = std::move(*image);
    assets.depth = std::move(*depth);
    assets.mask = std::move(*mask);
    auto lo = form_value(req, "depth_min");
    auto hi = form_value(req, "depth_max");
    if (lo && hi) {
      try {
        assets.depth_range = DepthRange{std::stod(*lo), std::stod(*hi)};
      } catch (const std::exception &) {
        reply(res, error_response(400, "format", "depth_min/depth_max must be numbers"));
        return;
      }
    }
    reply(res, service.create_session(assets));
  });

  server.Post(R"(/api/session/([0-9a-f]+)/trajectory)",
              [&service](const httplib::Request &req, httplib::Response &res) {
                reply(res, service.post_trajectory(req.matches[1], req.body));
              });
  server.Post(R"(/api/session/([0-9a-f]+)/preset)",
              [&service](const httplib::Request &req, httplib::Response &res) {
                reply(res, service.post_preset(req.matches[1], req.body));
              });
  server.Get(R"(/api/session/([0-9a-f]+)/bundle)",
             [&service](const httplib::Request &req, httplib::Response &res) {
               ServiceResponse r = service.get_bundle(req.matches[1]);
               if (r.status == 200) {
                 res.set_header("Content-Disposition", "attachment; filename=\"bundle.zip\"");
               }
               reply(res, r);
             });

  if (!options.ui_dir.empty()) {
    if (!server.set_mount_point("/", options.ui_dir.string())) {
      fail(ErrorCode::kIo, "cannot serve UI directory '" + options.ui_dir.string() + "'");
    }
  } else {
    server.Get("/", [](const httplib::Request &, httplib::Response &res) {
      res.set_content(kPlaceholderPage, "text/html");
    });
  }

  if (options.port == 0) {
    impl_->port = server.bind_to_any_port(options.host);
  } else {
    impl_->port = server.bind_to_port(options.host, options.port) ? options.port : -1;
  }
  if (impl_->port < 0) {
    fail(ErrorCode::kIo, "cannot bind " + options.host + ":" + std::to_string(options.port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  server.wait_until_ready();
}

HttpServer::~HttpServer() {
  stop();
  wait();
}

int HttpServer::port() const { return impl_->port; }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace objctrl
