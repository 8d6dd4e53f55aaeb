// Copyright 2026 The bayerpipe Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bayerpipe/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "bayerpipe/error.hpp"
#include "bayerpipe/image_io.hpp"

namespace bayerpipe {

Dataset load_dataset(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("dataset '" + dir.string() + "' is not a directory");
  }
  Dataset data;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == ".ppm" || ext == ".pfm") data.paths.push_back(entry.path());
  }
  std::sort(data.paths.begin(), data.paths.end(),
            [](const auto& a, const auto& b) {
              return a.filename().string() < b.filename().string();
            });
  if (data.paths.empty()) {
    throw IoError("dataset '" + dir.string() + "' holds no .ppm/.pfm images");
  }
  for (const auto& p : data.paths) data.images.push_back(read_color_image(p));
  return data;
}

}  // namespace bayerpipe
