/* Copyright 2026 The fundscope Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */


#include <httplib.h>

#include <thread>

#include "fundscope/error.hpp"
#include "fundscope/image.hpp"

namespace fundscope::image {

RemoteFaceProvider::RemoteFaceProvider(RemoteFaceOptions options) : options_(std::move(options)) {
  if (options_.base_url.empty()) throw Error(Errc::ConfigError, "remote face provider needs a base URL");
}

std::vector<FaceAttributes> RemoteFaceProvider::analyze(const std::string& image_ref) const {
  if (!options_.cache_dir.empty()) {
    const auto cached = sidecar_path(options_.cache_dir, image_ref);
    std::error_code ec;
    if (std::filesystem::is_regular_file(cached, ec)) return parse_face_response(read_file(cached));
  }

  const std::string bytes = read_file(options_.image_root / image_ref);
  httplib::Client client(options_.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::MultipartFormDataItems items{
      {"image_file", bytes, std::filesystem::path(image_ref).filename().string(),
       "application/octet-stream"},
  };
  std::string failure;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    auto res = client.Post(options_.endpoint, items);
    if (!res) {
      failure = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500 || res->status == 429) {
      failure = "provider returned HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(Errc::ProviderError, "provider returned HTTP " + std::to_string(res->status));
    }
    auto faces = parse_face_response(res->body);
    if (!options_.cache_dir.empty()) write_sidecar(options_.cache_dir, image_ref, faces);
    return faces;
  }
  throw Error(Errc::ProviderError, failure);
}

}  // namespace fundscope::image
