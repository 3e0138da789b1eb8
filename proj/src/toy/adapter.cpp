#include "genbench/toy/adapter.hpp"

#include <ostream>

#include "genbench/harness/protocol.hpp"
#include "genbench/toy/image_codec.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "genbench/util/workers.hpp"

namespace genbench::toy {

int adapter_main(const std::filesystem::path& job_path, const ToyConfig& config, std::ostream& err) {
    try {
        const auto job = harness::AdapterJob::load(job_path);
        if (job.steps.is_dynamic()) {
            err << "toy adapter: dynamic step budgets are not supported\n";
            return 1;
        }
        const int steps = job.steps.count();
        const double w = job.cfg.value_or(1.0);
        const auto seed = static_cast<std::uint64_t>(job.seed);
        std::filesystem::create_directories(job.output_dir);

        harness::AdapterResult result;
        result.status = "ok";
        result.images.resize(job.samples.size());
        result.nfe = std::vector<long long>(job.samples.size(), nfe_for(steps, w));

        util::parallel_for(job.samples.size(), util::worker_budget(), [&](std::size_t i) {
            const auto& s = job.samples[i];
            const auto& cond = config.at(s.class_id);
            const Vec2 x = integrate(initial_noise(seed, i), steps, w, cond, config.unconditional());
            const auto file = s.id + ".png";
            write_png(job.output_dir / file, encode_sample(x));
            result.images[i] = {s.id, file};
        });

        util::write_json(job.output_dir / harness::kResultFile, result.to_json());
        return 0;
    } catch (const ValidationError& e) {
        err << "toy adapter: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "toy adapter: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace genbench::toy
