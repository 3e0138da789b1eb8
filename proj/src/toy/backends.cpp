#include "genbench/toy/backends.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "genbench/toy/image_codec.hpp"
#include "genbench/util/error.hpp"

namespace genbench::toy {
namespace {

std::vector<std::string> ids_of(std::span<const harness::ImageItem> items) {
    std::vector<std::string> ids;
    ids.reserve(items.size());
    for (const auto& item : items) {
        ids.push_back(item.id);
    }
    return ids;
}

Vec2 point_of(const harness::ImageItem& item) {
    return decode_sample(read_png(item.path));
}

}  // namespace

std::vector<double> class_posterior(const ToyConfig& config, const Vec2& x) {
    const auto& classes = config.classes();
    std::vector<double> logp(classes.size());
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const auto& c = classes[k];
        const double dx = x[0] - c.mean[0];
        const double dy = x[1] - c.mean[1];
        const double s2 = c.scale * c.scale;
        logp[k] = std::log(c.weight) - std::log(2.0 * M_PI * s2) - (dx * dx + dy * dy) / (2.0 * s2);
    }
    const double top = *std::max_element(logp.begin(), logp.end());
    double sum = 0.0;
    for (auto& v : logp) {
        v = std::exp(v - top);
        sum += v;
    }
    for (auto& v : logp) {
        v /= sum;
    }
    return logp;
}

metrics::FeatureMatrix ToyFeatureBackend::features(std::span<const harness::ImageItem> items) const {
    std::vector<double> data;
    data.reserve(items.size() * 2);
    for (const auto& item : items) {
        const auto p = point_of(item);
        data.push_back(p[0]);
        data.push_back(p[1]);
    }
    return {items.size(), 2, std::move(data), ids_of(items)};
}

metrics::ProbabilityMatrix ToyClassifierBackend::probabilities(std::span<const harness::ImageItem> items) const {
    const auto k = config_.classes().size();
    std::vector<double> data;
    data.reserve(items.size() * k);
    for (const auto& item : items) {
        const auto post = class_posterior(config_, point_of(item));
        data.insert(data.end(), post.begin(), post.end());
    }
    return {items.size(), k, std::move(data), ids_of(items)};
}

harness::PairedEmbeddings ToyAlignmentBackend::embed(std::span<const harness::ImageItem> items) const {
    const auto k = config_.classes().size();
    std::vector<double> image;
    std::vector<double> text(items.size() * k, 0.0);
    image.reserve(items.size() * k);
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (double p : class_posterior(config_, point_of(items[i]))) {
            image.push_back(std::sqrt(p));
        }
        text[i * k + config_.index_of(items[i].class_id)] = 1.0;
    }
    const auto ids = ids_of(items);
    return {metrics::FeatureMatrix(items.size(), k, std::move(image), ids),
            metrics::FeatureMatrix(items.size(), k, std::move(text), ids)};
}

void ToyAlignmentBackend::check_coverage(std::span<const harness::ImageItem> items) const {
    for (const auto& item : items) {
        (void)config_.index_of(item.class_id);
    }
}

}  // namespace genbench::toy
