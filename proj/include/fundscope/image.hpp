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


#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fundscope/core.hpp"
#include "fundscope/util.hpp"

namespace fundscope::image {

// ---------------------------------------------------------------------------
// Image quality

struct ImageQuality {
  double aesthetic = 1.0;  // [1,10]
  double technical = 1.0;  // [1,10]
  std::string provider;
};

// Throws Errc::RangeError unless both scores are finite and within [1,10].
void validate(const ImageQuality& q);

// Decoded raster, row-major, interleaved channels (1 = gray, 3 = RGB), values [0,255].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> pixels;

  double at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                   static_cast<std::size_t>(x)) *
                      static_cast<std::size_t>(channels) +
                  static_cast<std::size_t>(c)];
  }
};

// Binary PGM (P5) and PPM (P6), maxval <= 255. Throws Errc::InvalidImage.
Image decode_pnm(std::string_view bytes);
Image read_pnm(const std::filesystem::path& path);
std::string encode_pnm(const Image& image);

// Constants of the built-in surrogate scorer.
inline constexpr double kGradientScale = 64.0;      // technical saturation scale
inline constexpr double kContrastScale = 127.5;     // max luma SD on [0,255]
inline constexpr double kColorfulnessScale = 150.0;  // Hasler-Suesstrunk metric cap

struct QualityComponents {
  double mean_gradient = 0.0;     // mean |grad luma|, forward differences
  double contrast_norm = 0.0;     // min(1, SD(luma) / 127.5)
  double colorfulness_norm = 0.0; // min(1, M / 150), 0 for grayscale
};

QualityComponents quality_components(const Image& image);

// Deterministic stand-in for a learned quality model:
//   technical = 1 + 9 (1 - exp(-g / 64))
//   aesthetic = 1 + 9 (0.5 contrast + 0.5 colorfulness)
// Throws Errc::InvalidImage for images smaller than 8x8.
ImageQuality builtin_quality_score(const Image& image);

inline constexpr std::string_view kBuiltinQualityProvider = "builtin-surrogate";
inline constexpr std::string_view kPrecomputedQualityProvider = "precomputed";

// CSV image_ref,aesthetic,technical. Throws Errc::RangeError on scores outside [1,10].
std::map<std::string, ImageQuality> load_precomputed_quality(const std::filesystem::path& path);

class QualityProvider {
 public:
  virtual ~QualityProvider() = default;
  virtual std::string name() const = 0;
  // std::nullopt when the image cannot be scored (no reference, unknown, undecodable).
  virtual std::optional<ImageQuality> score(const std::string& image_ref) const = 0;
};

class PrecomputedQualityProvider final : public QualityProvider {
 public:
  explicit PrecomputedQualityProvider(std::map<std::string, ImageQuality> table)
      : table_(std::move(table)) {}
  std::string name() const override { return std::string(kPrecomputedQualityProvider); }
  std::optional<ImageQuality> score(const std::string& image_ref) const override;

 private:
  std::map<std::string, ImageQuality> table_;
};

// Decodes <root>/<image_ref> (PGM/PPM only) and runs builtin_quality_score.
class BuiltinQualityProvider final : public QualityProvider {
 public:
  explicit BuiltinQualityProvider(std::filesystem::path root) : root_(std::move(root)) {}
  std::string name() const override { return std::string(kBuiltinQualityProvider); }
  std::optional<ImageQuality> score(const std::string& image_ref) const override;

 private:
  std::filesystem::path root_;
};

inline constexpr std::string_view kAestheticFeature = "quality_aesthetic";
inline constexpr std::string_view kTechnicalFeature = "quality_technical";
inline constexpr std::string_view kQualityMissing = "quality_missing";

std::vector<FeatureVector> quality_features(const std::vector<Campaign>& campaigns,
                                            const QualityProvider& provider,
                                            Execution exec = Execution::Parallel);

// ---------------------------------------------------------------------------
// Face attributes

inline constexpr std::array<std::string_view, 7> kEmotionKeys{
    "anger", "disgust", "fear", "happiness", "neutral", "sadness", "surprise"};
inline constexpr double kEmotionSumTolerance = 0.5;
inline constexpr double kChildAgeLimit = 10.0;

enum class Gender { Male, Female };

struct FaceAttributes {
  Gender gender = Gender::Female;
  double age = 0.0;                  // [0,100]
  double beauty_female_rater = 0.0;  // [0,100]
  double beauty_male_rater = 0.0;    // [0,100]
  bool smile = false;
  std::array<double, 7> emotion{};   // kEmotionKeys order, sums to 100 +- 0.5

  bool operator==(const FaceAttributes&) const = default;
};

// Response schema: JSON array of objects with keys gender, age,
// beauty{female_score,male_score}, smile{value[,threshold]}, emotion{7 keys}.
// A numeric smile value is binarized at its threshold (50 when absent).
// Throws Errc::SchemaError on any violation.
std::vector<FaceAttributes> parse_face_response(std::string_view json_text);
std::string serialize_faces(const std::vector<FaceAttributes>& faces);

std::filesystem::path sidecar_path(const std::filesystem::path& dir, const std::string& image_ref);
void write_sidecar(const std::filesystem::path& dir, const std::string& image_ref,
                   const std::vector<FaceAttributes>& faces);

class FaceProvider {
 public:
  virtual ~FaceProvider() = default;
  virtual std::string name() const = 0;
  // Errc::ProviderError when unreachable (retryable), Errc::SchemaError when malformed.
  virtual std::vector<FaceAttributes> analyze(const std::string& image_ref) const = 0;
};

// Offline provider: reads <dir>/<image_ref>.faces.json; no sidecar means no face.
class StubFaceProvider final : public FaceProvider {
 public:
  explicit StubFaceProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::string name() const override { return "stub"; }
  std::vector<FaceAttributes> analyze(const std::string& image_ref) const override;

 private:
  std::filesystem::path dir_;
};

struct RemoteFaceOptions {
  std::string base_url;          // e.g. "http://127.0.0.1:8080"
  std::string endpoint = "/detect";
  std::filesystem::path image_root;  // image bytes are read from <image_root>/<ref>
  std::filesystem::path cache_dir;   // sidecars written here; reused on rerun
  std::chrono::milliseconds timeout{5000};
  int retries = 2;
};

// HTTP client: posts the image as multipart field "image_file" and caches the
// validated response as a sidecar so reruns are offline.
class RemoteFaceProvider final : public FaceProvider {
 public:
  explicit RemoteFaceProvider(RemoteFaceOptions options);
  std::string name() const override { return "remote"; }
  std::vector<FaceAttributes> analyze(const std::string& image_ref) const override;

 private:
  RemoteFaceOptions options_;
};

std::vector<FaceAttributes> analyze_faces(const std::string& image_ref, const FaceProvider& provider);

// Runs the provider over many references with at most `max_in_flight`
// concurrent requests. Results keep input order.
std::vector<std::vector<FaceAttributes>> analyze_batch(const std::vector<std::string>& refs,
                                                       const FaceProvider& provider,
                                                       int max_in_flight);

struct CampaignFaceFeatures {
  std::size_t num_faces = 0;
  std::optional<double> mean_age;
  int any_smile = 0;
  int is_child = 0;
  std::optional<std::array<double, 7>> mean_emotion;
  std::optional<double> mean_beauty;
};

CampaignFaceFeatures aggregate_face_features(const std::vector<FaceAttributes>& faces);

inline constexpr std::string_view kNumFacesFeature = "face_num";
inline constexpr std::string_view kMeanAgeFeature = "face_mean_age";
inline constexpr std::string_view kAnySmileFeature = "face_any_smile";
inline constexpr std::string_view kIsChildFeature = "face_is_child";
inline constexpr std::string_view kMeanBeautyFeature = "face_mean_beauty";
inline constexpr std::string_view kEmotionFeaturePrefix = "face_emotion_";
inline constexpr std::string_view kFaceMissing = "face_missing";

// Means are omitted when there is no face. face_missing marks campaigns
// without a cover image, for which no face feature is emitted at all.
FeatureVector to_feature_vector(const CampaignFaceFeatures& features);

std::vector<FeatureVector> face_features(const std::vector<Campaign>& campaigns,
                                         const FaceProvider& provider, int max_in_flight = 1);

}  // namespace fundscope::image
