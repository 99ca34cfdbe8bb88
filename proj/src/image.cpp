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


#include "fundscope/image.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "fundscope/error.hpp"

namespace fundscope::image {

using nlohmann::json;

void validate(const ImageQuality& q) {
  auto ok = [](double v) { return std::isfinite(v) && v >= 1.0 && v <= 10.0; };
  if (!ok(q.aesthetic) || !ok(q.technical)) {
    throw Error(Errc::RangeError, "quality scores must lie in [1,10] (aesthetic=" +
                                      format_double(q.aesthetic) +
                                      ", technical=" + format_double(q.technical) + ")");
  }
}

// ---------------------------------------------------------------------------
// PNM

namespace {

struct PnmCursor {
  std::string_view bytes;
  std::size_t pos = 0;

  void skip_space_and_comments() {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  }

  int read_int() {
    skip_space_and_comments();
    if (pos >= bytes.size() || bytes[pos] < '0' || bytes[pos] > '9') {
      throw Error(Errc::InvalidImage, "malformed PNM header");
    }
    long v = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1'000'000) throw Error(Errc::InvalidImage, "PNM dimension too large");
    }
    return static_cast<int>(v);
  }
};

}  // namespace

Image decode_pnm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(Errc::InvalidImage, "only binary PGM (P5) and PPM (P6) are supported");
  }
  PnmCursor cur{bytes, 2};
  Image img;
  img.channels = bytes[1] == '5' ? 1 : 3;
  img.width = cur.read_int();
  img.height = cur.read_int();
  const int maxval = cur.read_int();
  if (img.width <= 0 || img.height <= 0) throw Error(Errc::InvalidImage, "empty PNM image");
  if (maxval <= 0 || maxval > 255) throw Error(Errc::InvalidImage, "PNM maxval must be 1..255");
  if (cur.pos >= bytes.size()) throw Error(Errc::InvalidImage, "truncated PNM");
  ++cur.pos;  // single whitespace after maxval
  const std::size_t count = static_cast<std::size_t>(img.width) *
                            static_cast<std::size_t>(img.height) *
                            static_cast<std::size_t>(img.channels);
  if (bytes.size() - cur.pos < count) throw Error(Errc::InvalidImage, "truncated PNM raster");
  img.pixels.resize(count);
  const double scale = 255.0 / maxval;
  for (std::size_t i = 0; i < count; ++i) {
    img.pixels[i] = static_cast<unsigned char>(bytes[cur.pos + i]) * scale;
  }
  return img;
}

Image read_pnm(const std::filesystem::path& path) { return decode_pnm(read_file(path)); }

std::string encode_pnm(const Image& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error(Errc::InvalidImage, "PNM encoding needs 1 or 3 channels");
  }
  std::string out = (image.channels == 1 ? "P5\n" : "P6\n") + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.reserve(out.size() + image.pixels.size());
  for (double v : image.pixels) {
    out += static_cast<char>(static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in surrogate scorer

QualityComponents quality_components(const Image& image) {
  const int w = image.width, h = image.height;
  if (w < 8 || h < 8 || (image.channels != 1 && image.channels != 3) ||
      image.pixels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                                 static_cast<std::size_t>(image.channels)) {
    throw Error(Errc::InvalidImage, "image must be at least 8x8 with 1 or 3 channels");
  }
  for (double v : image.pixels) {
    if (!std::isfinite(v)) throw Error(Errc::InvalidImage, "non-finite pixel");
  }
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> luma(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (image.channels == 1) {
      luma[i] = image.pixels[i];
    } else {
      luma[i] = 0.299 * image.pixels[3 * i] + 0.587 * image.pixels[3 * i + 1] +
                0.114 * image.pixels[3 * i + 2];
    }
  }

  QualityComponents out;
  double grad_sum = 0.0;
  for (int y = 0; y + 1 < h; ++y) {
    for (int x = 0; x + 1 < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                            static_cast<std::size_t>(x);
      const double gx = luma[i + 1] - luma[i];
      const double gy = luma[i + static_cast<std::size_t>(w)] - luma[i];
      grad_sum += std::sqrt(gx * gx + gy * gy);
    }
  }
  out.mean_gradient = grad_sum / (static_cast<double>(w - 1) * static_cast<double>(h - 1));

  const double mean = std::accumulate(luma.begin(), luma.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : luma) var += (v - mean) * (v - mean);
  out.contrast_norm = std::min(1.0, std::sqrt(var / static_cast<double>(n)) / kContrastScale);

  if (image.channels == 3) {
    double mrg = 0.0, myb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = image.pixels[3 * i], g = image.pixels[3 * i + 1], b = image.pixels[3 * i + 2];
      mrg += r - g;
      myb += 0.5 * (r + g) - b;
    }
    mrg /= static_cast<double>(n);
    myb /= static_cast<double>(n);
    double vrg = 0.0, vyb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = image.pixels[3 * i], g = image.pixels[3 * i + 1], b = image.pixels[3 * i + 2];
      vrg += (r - g - mrg) * (r - g - mrg);
      vyb += (0.5 * (r + g) - b - myb) * (0.5 * (r + g) - b - myb);
    }
    vrg /= static_cast<double>(n);
    vyb /= static_cast<double>(n);
    const double m = std::sqrt(vrg + vyb) + 0.3 * std::sqrt(mrg * mrg + myb * myb);
    out.colorfulness_norm = std::min(1.0, m / kColorfulnessScale);
  }
  return out;
}

ImageQuality builtin_quality_score(const Image& image) {
  const QualityComponents c = quality_components(image);
  ImageQuality q;
  q.technical = 1.0 + 9.0 * (1.0 - std::exp(-c.mean_gradient / kGradientScale));
  q.aesthetic = 1.0 + 9.0 * (0.5 * c.contrast_norm + 0.5 * c.colorfulness_norm);
  q.provider = std::string(kBuiltinQualityProvider);
  return q;
}

std::map<std::string, ImageQuality> load_precomputed_quality(const std::filesystem::path& path) {
  csv::Table t = csv::read(path);
  const std::size_t ri = t.column("image_ref");
  const std::size_t ai = t.column("aesthetic");
  const std::size_t ti = t.column("technical");
  std::map<std::string, ImageQuality> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = " at line " + std::to_string(t.line_numbers[r]);
    if (row.size() <= std::max({ri, ai, ti})) throw Error(Errc::SchemaError, "short row" + where);
    auto num = [&](const std::string& s) {
      const std::string v = trim(s);
      char* end = nullptr;
      const double d = std::strtod(v.c_str(), &end);
      if (v.empty() || end != v.c_str() + v.size()) {
        throw Error(Errc::ParseError, "non-numeric score '" + s + "'" + where);
      }
      return d;
    };
    ImageQuality q{num(row[ai]), num(row[ti]), std::string(kPrecomputedQualityProvider)};
    validate(q);
    const std::string ref = trim(row[ri]);
    if (ref.empty()) throw Error(Errc::SchemaError, "empty image_ref" + where);
    out[ref] = q;
  }
  return out;
}

std::optional<ImageQuality> PrecomputedQualityProvider::score(const std::string& image_ref) const {
  auto it = table_.find(image_ref);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::optional<ImageQuality> BuiltinQualityProvider::score(const std::string& image_ref) const {
  const std::filesystem::path path = root_ / image_ref;
  const std::string ext = to_lower_ascii(path.extension().string());
  if (ext != ".pgm" && ext != ".ppm" && ext != ".pnm") return std::nullopt;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  try {
    return builtin_quality_score(read_pnm(path));
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidImage) return std::nullopt;
    throw;
  }
}

std::vector<FeatureVector> quality_features(const std::vector<Campaign>& campaigns,
                                            const QualityProvider& provider, Execution exec) {
  const auto n = static_cast<std::ptrdiff_t>(campaigns.size());
  std::vector<std::optional<ImageQuality>> scores(campaigns.size());
  auto score_one = [&](std::ptrdiff_t i) -> std::optional<ImageQuality> {
    const auto& ref = campaigns[static_cast<std::size_t>(i)].cover_image;
    return ref ? provider.score(*ref) : std::nullopt;
  };
  if (exec == Execution::Parallel) {
    // Provider errors must not escape the parallel region.
    std::vector<std::string> errors(campaigns.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        scores[static_cast<std::size_t>(i)] = score_one(i);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw Error(Errc::ProviderError, e);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) scores[static_cast<std::size_t>(i)] = score_one(i);
  }

  std::vector<FeatureVector> out(campaigns.size());
  for (std::size_t i = 0; i < campaigns.size(); ++i) {
    if (scores[i]) {
      validate(*scores[i]);
      out[i].add(std::string(kAestheticFeature), scores[i]->aesthetic, Modality::ImageQuality);
      out[i].add(std::string(kTechnicalFeature), scores[i]->technical, Modality::ImageQuality);
    }
    out[i].add(std::string(kQualityMissing), scores[i] ? 0.0 : 1.0, Modality::ImageQuality);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Faces

namespace {

[[noreturn]] void schema_fail(const std::string& what) {
  throw Error(Errc::SchemaError, "face response: " + what);
}

double number_in(const json& obj, const char* key, double lo, double hi) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) schema_fail(std::string("'") + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v) || v < lo || v > hi) {
    schema_fail(std::string("'") + key + "' out of range: " + format_double(v));
  }
  return v;
}

FaceAttributes parse_face(const json& obj) {
  if (!obj.is_object()) schema_fail("face entry must be an object");
  FaceAttributes f;
  auto g = obj.find("gender");
  if (g == obj.end() || !g->is_string()) schema_fail("'gender' must be a string");
  const std::string gender = to_lower_ascii(g->get<std::string>());
  if (gender == "male") {
    f.gender = Gender::Male;
  } else if (gender == "female") {
    f.gender = Gender::Female;
  } else {
    schema_fail("unknown gender '" + gender + "'");
  }
  f.age = number_in(obj, "age", 0.0, 100.0);

  auto b = obj.find("beauty");
  if (b == obj.end() || !b->is_object()) schema_fail("'beauty' must be an object");
  f.beauty_female_rater = number_in(*b, "female_score", 0.0, 100.0);
  f.beauty_male_rater = number_in(*b, "male_score", 0.0, 100.0);

  auto s = obj.find("smile");
  if (s == obj.end() || !s->is_object()) schema_fail("'smile' must be an object");
  auto sv = s->find("value");
  if (sv == s->end()) schema_fail("'smile.value' missing");
  if (sv->is_boolean()) {
    f.smile = sv->get<bool>();
  } else if (sv->is_number()) {
    const double value = number_in(*s, "value", 0.0, 100.0);
    const double threshold = s->contains("threshold") ? number_in(*s, "threshold", 0.0, 100.0) : 50.0;
    f.smile = value >= threshold;
  } else {
    schema_fail("'smile.value' must be boolean or number");
  }

  auto e = obj.find("emotion");
  if (e == obj.end() || !e->is_object()) schema_fail("'emotion' must be an object");
  if (e->size() != kEmotionKeys.size()) {
    schema_fail("'emotion' must have exactly 7 keys, got " + std::to_string(e->size()));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < kEmotionKeys.size(); ++k) {
    const std::string key(kEmotionKeys[k]);
    if (!e->contains(key)) schema_fail("'emotion." + key + "' missing");
    f.emotion[k] = number_in(*e, key.c_str(), 0.0, 100.0);
    sum += f.emotion[k];
  }
  if (std::fabs(sum - 100.0) > kEmotionSumTolerance) {
    schema_fail("emotion scores sum to " + format_double(sum) + ", expected 100");
  }
  return f;
}

}  // namespace

std::vector<FaceAttributes> parse_face_response(std::string_view json_text) {
  json doc = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded()) schema_fail("not valid JSON");
  if (!doc.is_array()) schema_fail("top level must be an array");
  std::vector<FaceAttributes> faces;
  faces.reserve(doc.size());
  for (const auto& item : doc) faces.push_back(parse_face(item));
  return faces;
}

std::string serialize_faces(const std::vector<FaceAttributes>& faces) {
  json doc = json::array();
  for (const auto& f : faces) {
    json obj;
    obj["gender"] = f.gender == Gender::Male ? "Male" : "Female";
    obj["age"] = f.age;
    obj["beauty"] = {{"female_score", f.beauty_female_rater}, {"male_score", f.beauty_male_rater}};
    obj["smile"] = {{"value", f.smile}};
    json emo = json::object();
    for (std::size_t k = 0; k < kEmotionKeys.size(); ++k) emo[std::string(kEmotionKeys[k])] = f.emotion[k];
    obj["emotion"] = emo;
    doc.push_back(obj);
  }
  return doc.dump(2) + "\n";
}

std::filesystem::path sidecar_path(const std::filesystem::path& dir, const std::string& image_ref) {
  return dir / (image_ref + ".faces.json");
}

void write_sidecar(const std::filesystem::path& dir, const std::string& image_ref,
                   const std::vector<FaceAttributes>& faces) {
  write_file(sidecar_path(dir, image_ref), serialize_faces(faces));
}

std::vector<FaceAttributes> StubFaceProvider::analyze(const std::string& image_ref) const {
  const auto path = sidecar_path(dir_, image_ref);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return {};
  return parse_face_response(read_file(path));
}

std::vector<FaceAttributes> analyze_faces(const std::string& image_ref, const FaceProvider& provider) {
  return provider.analyze(image_ref);
}

std::vector<std::vector<FaceAttributes>> analyze_batch(const std::vector<std::string>& refs,
                                                       const FaceProvider& provider,
                                                       int max_in_flight) {
  std::vector<std::vector<FaceAttributes>> out(refs.size());
  std::vector<std::string> errors(refs.size());
  std::vector<Errc> codes(refs.size(), Errc::ProviderError);
  const auto n = static_cast<std::ptrdiff_t>(refs.size());
  const int cap = std::max(1, max_in_flight);
#pragma omp parallel for schedule(dynamic, 1) num_threads(cap) if (cap > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = provider.analyze(refs[k]);
    } catch (const Error& e) {
      errors[k] = e.what();
      codes[k] = e.code();
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (std::size_t k = 0; k < refs.size(); ++k) {
    if (!errors[k].empty()) throw Error(codes[k], "image '" + refs[k] + "': " + errors[k]);
  }
  return out;
}

CampaignFaceFeatures aggregate_face_features(const std::vector<FaceAttributes>& faces) {
  CampaignFaceFeatures out;
  out.num_faces = faces.size();
  if (faces.empty()) return out;
  double age = 0.0, beauty = 0.0;
  std::array<double, 7> emotion{};
  for (const auto& f : faces) {
    age += f.age;
    beauty += 0.5 * (f.beauty_female_rater + f.beauty_male_rater);
    for (std::size_t k = 0; k < emotion.size(); ++k) emotion[k] += f.emotion[k];
    if (f.smile) out.any_smile = 1;
    if (f.age < kChildAgeLimit) out.is_child = 1;
  }
  const double n = static_cast<double>(faces.size());
  out.mean_age = age / n;
  out.mean_beauty = beauty / n;
  for (double& e : emotion) e /= n;
  out.mean_emotion = emotion;
  return out;
}

FeatureVector to_feature_vector(const CampaignFaceFeatures& f) {
  FeatureVector fv;
  fv.add(std::string(kNumFacesFeature), static_cast<double>(f.num_faces), Modality::Face);
  fv.add(std::string(kIsChildFeature), f.is_child, Modality::Face);
  fv.add(std::string(kAnySmileFeature), f.any_smile, Modality::Face);
  if (f.mean_age) fv.add(std::string(kMeanAgeFeature), *f.mean_age, Modality::Face);
  if (f.mean_beauty) fv.add(std::string(kMeanBeautyFeature), *f.mean_beauty, Modality::Face);
  if (f.mean_emotion) {
    for (std::size_t k = 0; k < kEmotionKeys.size(); ++k) {
      fv.add(std::string(kEmotionFeaturePrefix) + std::string(kEmotionKeys[k]), (*f.mean_emotion)[k],
             Modality::Face);
    }
  }
  fv.add(std::string(kFaceMissing), 0.0, Modality::Face);
  return fv;
}

std::vector<FeatureVector> face_features(const std::vector<Campaign>& campaigns,
                                         const FaceProvider& provider, int max_in_flight) {
  std::vector<std::string> refs;
  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < campaigns.size(); ++i) {
    if (campaigns[i].cover_image) {
      refs.push_back(*campaigns[i].cover_image);
      owners.push_back(i);
    }
  }
  const auto faces = analyze_batch(refs, provider, max_in_flight);
  std::vector<FeatureVector> out(campaigns.size());
  std::vector<bool> has_image(campaigns.size(), false);
  for (std::size_t k = 0; k < refs.size(); ++k) {
    out[owners[k]] = to_feature_vector(aggregate_face_features(faces[k]));
    has_image[owners[k]] = true;
  }
  for (std::size_t i = 0; i < campaigns.size(); ++i) {
    if (!has_image[i]) out[i].add(std::string(kFaceMissing), 1.0, Modality::Face);
  }
  return out;
}

}  // namespace fundscope::image
