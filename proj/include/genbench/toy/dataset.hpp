#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "genbench/harness/dataset.hpp"
#include "genbench/toy/flow.hpp"

namespace genbench::toy {

inline constexpr std::uint64_t kDefaultReferenceSeed = 7;

/// Writes a reference dataset for the toy mixture into `dir`:
///   dataset.json      examples_per_class examples per class, classes interleaved
///                     (r0 class 0, r1 class 1, ...) so IS splits see every class
///   reference/        feature store of exact target draws m + s z, one per example,
///                     registered for the "toy" feature backend
/// Draw i uses initial_noise(reference_seed, i), so generation seeds never collide
/// with reference draws unless chosen equal.
harness::ReferenceDataset write_toy_dataset(const ToyConfig& config, const std::string& dataset_id,
                                            std::size_t examples_per_class, std::uint64_t reference_seed,
                                            const std::filesystem::path& dir);

}  // namespace genbench::toy
