/*
 * Copyright 2026 The gazectx Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Chat-completion style HTTP client for a live vision-language model.
//
// POST <endpoint_url>
//   Authorization: Bearer <value of the configured environment variable>
//   {"model":..,"messages":[{"role":"system","content":[{"type":"text",..}]},
//    {"role":"user","content":[{"type":"text",..},{"type":"image_b64","data":..},
//    {"type":"text",..}]}],"response_format":{"type":"json"}}
//
// Any response whose text contains the JSON answer is accepted: the
// assistant message content when the body is a chat-completion document,
// otherwise the raw body. 429 and 5xx responses and connection failures are
// retried with exponential backoff.

#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <memory>
#include <semaphore>
#include <sstream>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

// Eigen must come before httplib: <resolv.h> defines a `_res` macro.
#include "gazectx/context_vlm.hpp"
#include "gazectx/error.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <openssl/evp.h>

namespace gazectx {

inline std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

struct EndpointUrl {
  std::string scheme_host_port;
  std::string path;
};

inline EndpointUrl split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint_url must start with http:// or https://: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// Image bytes for a payload: the rendered label card when present, otherwise
// the file at image_ref.
inline std::string payload_image_bytes(const QueryPayload& payload) {
  if (payload.label_card) return render_label_card_svg(*payload.label_card);
  std::ifstream in(payload.image_ref, std::ios::binary);
  if (!in) throw IoError("cannot read image " + payload.image_ref);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline nlohmann::json chat_request_body(const std::string& model,
                                        const std::vector<MessageBlock>& blocks,
                                        const std::string& image_b64) {
  auto system = nlohmann::json::array();
  auto user = nlohmann::json::array();
  for (const auto& b : blocks) {
    switch (b.kind) {
      case BlockKind::kSystem:
        system.push_back({{"type", "text"}, {"text", b.text}});
        break;
      case BlockKind::kImage:
        user.push_back({{"type", "image_b64"}, {"data", image_b64}});
        break;
      case BlockKind::kContext:
      case BlockKind::kQuestion:
        user.push_back({{"type", "text"}, {"text", b.text}});
        break;
    }
  }
  return {{"model", model},
          {"messages",
           nlohmann::json::array({{{"role", "system"}, {"content", system}},
                                  {{"role", "user"}, {"content", user}}})},
          {"response_format", {{"type", "json"}}}};
}

// Text to parse out of a response body.
inline std::string response_text(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return body;
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
  } catch (const nlohmann::json::exception&) {
  }
  return body;
}

class LiveClient final : public VlmClient {
 public:
  explicit LiveClient(ClientConfig cfg, PromptTemplate tmpl = {})
      : cfg_(std::move(cfg)), tmpl_(std::move(tmpl)), endpoint_(split_endpoint(cfg_.endpoint_url)),
        slots_(cfg_.max_in_flight) {
    cfg_.check();
    if (!cfg_.api_key_env_var_name.empty()) {
      const char* key = std::getenv(cfg_.api_key_env_var_name.c_str());
      if (!key)
        throw ConfigError("environment variable " + cfg_.api_key_env_var_name +
                          " (API key) is not set");
      api_key_ = key;
    }
  }

  QueryOutcome query(const QueryPayload& payload, std::uint64_t /*trial_seed*/) override {
    const auto blocks = build_prompt(payload, tmpl_);
    const std::string body =
        chat_request_body(cfg_.model_name, blocks, base64_encode(payload_image_bytes(payload)))
            .dump();
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    std::string last_error;
    const int attempts = cfg_.retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
      if (attempt > 0) {
        const double delay = cfg_.backoff_s * static_cast<double>(1 << (attempt - 1));
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      }
      httplib::Result res;
      {
        slots_.acquire();
        httplib::Client http(endpoint_.scheme_host_port);
        const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::duration<double>(cfg_.timeout_s));
        http.set_connection_timeout(timeout);
        http.set_read_timeout(timeout);
        http.set_write_timeout(timeout);
        res = http.Post(endpoint_.path, headers, body, "application/json");
        slots_.release();
      }
      if (!res) {
        last_error = "connection failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300)
        return TransportError{"HTTP " + std::to_string(res->status), attempt + 1};
      auto parsed = parse_answer(response_text(res->body), payload.visible_objects);
      if (auto* a = std::get_if<AgentAnswer>(&parsed)) return *a;
      return std::get<ParseFailure>(parsed);
    }
    return TransportError{last_error, attempts};
  }

  std::string name() const override { return "live:" + cfg_.model_name; }

 private:
  ClientConfig cfg_;
  PromptTemplate tmpl_;
  EndpointUrl endpoint_;
  std::string api_key_;
  std::counting_semaphore<> slots_;
};

// "live" or "mock:<strategy>".
inline std::unique_ptr<VlmClient> make_client(const ClientConfig& cfg,
                                              const PromptTemplate& tmpl = {}) {
  cfg.check();
  if (cfg.kind == "live") {
    if (cfg.endpoint_url.empty()) throw ConfigError("live client needs endpoint_url");
    return std::make_unique<LiveClient>(cfg, tmpl);
  }
  return make_mock_client(cfg);
}

}  // namespace gazectx
