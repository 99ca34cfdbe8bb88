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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fundscope {

// Kernels that have an OpenMP path also keep a serial reference path. Both
// must produce bit-identical results; tests compare them directly.
enum class Execution { Serial, Parallel };

// Number of OpenMP worker threads (1 when built without OpenMP).
int max_threads() noexcept;
void set_max_threads(int n) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;
// Order-sensitive combination of seeds and indices into a new seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t value);
std::string file_fingerprint(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Shortest round-trip representation ("%.17g" trimmed) used in every file the
// tools emit so reruns are byte-identical and values reload exactly.
std::string format_double(double value);
std::string format_fixed(double value, int decimals);
// Two significant figures, scientific below 1e-3: 5.4E-4, 0.025, 0.05.
std::string format_sig2(double value);

std::string trim(std::string_view text);
std::string to_lower_ascii(std::string_view text);

namespace csv {

using Row = std::vector<std::string>;

// Quoted fields may contain commas; quotes and backslashes inside a field are
// backslash-escaped. Embedded newlines are not supported. Lines starting with
// '#' are comments.
Row parse_line(std::string_view line);

struct Table {
  Row header;
  std::vector<Row> rows;
  std::vector<std::size_t> line_numbers;

  // Throws Errc::SchemaError when the column is absent.
  std::size_t column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);

std::string escape(std::string_view field);
std::string join(const Row& row);

}  // namespace csv

}  // namespace fundscope
