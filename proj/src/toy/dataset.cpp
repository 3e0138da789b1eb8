#include "genbench/toy/dataset.hpp"

#include <fmt/format.h>

#include "genbench/metrics/feature_store.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"

namespace genbench::toy {

harness::ReferenceDataset write_toy_dataset(const ToyConfig& config, const std::string& dataset_id,
                                            std::size_t examples_per_class, std::uint64_t reference_seed,
                                            const std::filesystem::path& dir) {
    if (examples_per_class == 0) {
        throw InvalidInput("toy dataset: examples_per_class must be positive");
    }
    std::vector<harness::ReferenceExample> examples;
    std::vector<double> features;
    std::vector<std::string> ids;
    std::uint64_t index = 0;
    for (std::size_t k = 0; k < examples_per_class; ++k) {
        for (const auto& cls : config.classes()) {
            const auto id = fmt::format("r{:06}", index);
            const auto z = initial_noise(reference_seed, index);
            features.push_back(cls.mean[0] + cls.scale * z[0]);
            features.push_back(cls.mean[1] + cls.scale * z[1]);
            ids.push_back(id);
            examples.push_back({id, cls.class_id, cls.name});
            ++index;
        }
    }
    const auto store = dir / "reference";
    metrics::write_feature_store(store, metrics::FeatureMatrix(ids.size(), 2, std::move(features), ids));
    harness::ReferenceDataset ds(dataset_id, std::move(examples), {{"toy", store}});
    auto j = ds.to_json();
    j["reference_features"] = {{"toy", "reference"}};
    util::write_json(dir / "dataset.json", j);
    return ds;
}

}  // namespace genbench::toy
