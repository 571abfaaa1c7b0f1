/* Copyright 2026 The transcore Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef TRANSCORE_SYNTHETIC_H_
#define TRANSCORE_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "transcore/image.h"
#include "transcore/sweep.h"

namespace transcore {

// Structured RGB test image: a high-contrast oriented grating (wavelength
// 6-10 px) over a gentle color ramp, overlaid with randomly placed ellipses
// and rectangles that carry their own gratings. Every 16x16 patch therefore
// has a dominant orientation. Fully determined by (seed, size).
ImageBuffer SyntheticImage(std::uint64_t seed, int height, int width);

// Stand-in "translation" that keeps structure but changes appearance: a
// per-channel gamma curve drawn from the seed.
ImageBuffer SyntheticTranslation(const ImageBuffer& source,
                                 std::uint64_t seed);

// Writes `count` source/translated PNG pairs into `dir` and returns the
// pairs (ids "syn000", "syn001", ...).
std::vector<ImagePair> WriteSyntheticCorpus(const std::filesystem::path& dir,
                                            int count, int size,
                                            std::uint64_t seed);

}  // namespace transcore

#endif  // TRANSCORE_SYNTHETIC_H_
