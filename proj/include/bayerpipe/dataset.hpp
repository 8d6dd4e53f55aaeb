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

#ifndef BAYERPIPE_DATASET_HPP_
#define BAYERPIPE_DATASET_HPP_

#include <filesystem>
#include <vector>

#include "bayerpipe/image.hpp"

namespace bayerpipe {

struct Dataset {
  std::vector<std::filesystem::path> paths;
  std::vector<ColorImage> images;
};

// Loads every .ppm / .pfm color image of a flat directory, sorted by file
// name so that image k always gets the same noise seed.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace bayerpipe

#endif  // BAYERPIPE_DATASET_HPP_
