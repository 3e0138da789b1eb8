#include "genbench/metrics/inception.hpp"

#include <cmath>
#include <vector>

#include "genbench/util/error.hpp"

namespace genbench::metrics {

InceptionScore inception_score(const ProbabilityMatrix& probs, std::size_t splits) {
    const auto rows = probs.rows();
    const auto cols = probs.cols();
    if (rows == 0) {
        throw InvalidInput("inception score: empty probability matrix");
    }
    if (splits == 0) {
        throw InvalidInput("inception score: splits must be >= 1");
    }
    if (rows < splits) {
        splits = 1;
    }

    const auto base = rows / splits;
    const auto extra = rows % splits;
    std::vector<double> scores;
    scores.reserve(splits);
    std::vector<double> marginal(cols);
    std::size_t begin = 0;
    for (std::size_t s = 0; s < splits; ++s) {
        const auto size = base + (s < extra ? 1 : 0);
        const auto end = begin + size;

        std::fill(marginal.begin(), marginal.end(), 0.0);
        for (std::size_t r = begin; r < end; ++r) {
            const auto p = probs.row(r);
            for (std::size_t c = 0; c < cols; ++c) {
                marginal[c] += p[c];
            }
        }
        for (auto& m : marginal) {
            m = std::log(m / static_cast<double>(size) + kLogFloor);
        }

        double kl_sum = 0.0;
        for (std::size_t r = begin; r < end; ++r) {
            const auto p = probs.row(r);
            double kl = 0.0;
            for (std::size_t c = 0; c < cols; ++c) {
                if (p[c] > 0.0) {
                    kl += p[c] * (std::log(p[c] + kLogFloor) - marginal[c]);
                }
            }
            kl_sum += kl;
        }
        scores.push_back(std::exp(kl_sum / static_cast<double>(size)));
        begin = end;
    }

    double mean = 0.0;
    for (double s : scores) {
        mean += s;
    }
    mean /= static_cast<double>(scores.size());
    double var = 0.0;
    for (double s : scores) {
        var += (s - mean) * (s - mean);
    }
    var /= static_cast<double>(scores.size());
    return {mean, std::sqrt(var)};
}

}  // namespace genbench::metrics
