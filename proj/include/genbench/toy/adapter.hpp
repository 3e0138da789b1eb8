#pragma once

#include <filesystem>
#include <iosfwd>

#include "genbench/toy/flow.hpp"

namespace genbench::toy {

/// Runs one adapter job: samples every requested class with the guided Euler
/// sampler, writes <output_dir>/<id>.png per sample and <output_dir>/result.json
/// with per-sample NFE. Returns the process exit code; diagnostics go to `err`.
int adapter_main(const std::filesystem::path& job_path, const ToyConfig& config, std::ostream& err);

}  // namespace genbench::toy
