#include "genbench/cli.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "genbench/composite/bounds.hpp"
#include "genbench/composite/mmhm.hpp"
#include "genbench/harness/backends.hpp"
#include "genbench/harness/config.hpp"
#include "genbench/harness/evaluate.hpp"
#include "genbench/harness/run.hpp"
#include "genbench/relaionet/builder.hpp"
#include "genbench/relaionet/download.hpp"
#include "genbench/report/heatmap.hpp"
#include "genbench/report/table.hpp"
#include "genbench/toy/adapter.hpp"
#include "genbench/toy/dataset.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "genbench/util/workers.hpp"

namespace genbench {
namespace {

namespace fs = std::filesystem;

/// Adapter argv entries equal to "{genbench}" stand for this executable;
/// "{config_dir}" inside an entry is replaced by the config's directory.
constexpr const char* kSelfToken = "{genbench}";
constexpr std::string_view kConfigDirToken = "{config_dir}";

struct Globals {
    fs::path out = "out";
    std::string config;
};

harness::GenbenchConfig require_config(const Globals& g) {
    if (g.config.empty()) {
        throw ConfigError("--config is required for this command");
    }
    return harness::GenbenchConfig::load(g.config);
}

std::size_t run_workers(const harness::GenbenchConfig& config) {
    return util::worker_budget(config.workers.value_or(1));
}

std::vector<std::string> expand_adapter(std::vector<std::string> argv, const fs::path& config_dir) {
    for (auto& a : argv) {
        for (auto pos = a.find(kConfigDirToken); pos != std::string::npos; pos = a.find(kConfigDirToken)) {
            a.replace(pos, kConfigDirToken.size(), config_dir.string());
        }
        if (a == kSelfToken) {
            std::error_code ec;
            const auto self = fs::read_symlink("/proc/self/exe", ec);
            if (ec) {
                throw RuntimeFailure("cannot resolve the genbench executable path");
            }
            a = self.string();
        }
    }
    return argv;
}

std::vector<harness::RunSpec> planned_runs(const harness::GenbenchConfig& config, const Globals& g) {
    auto cfg = config;
    for (auto& m : cfg.models) {
        m.adapter = expand_adapter(m.adapter, cfg.base_dir);
    }
    return harness::plan_sweep(cfg, harness::load_datasets(cfg), g.out);
}

composite::BoundsRegistry load_bounds(const std::string& explicit_path, const std::optional<fs::path>& config_path,
                                      const std::vector<fs::path>& fallbacks) {
    std::vector<fs::path> candidates;
    if (!explicit_path.empty()) {
        candidates.emplace_back(explicit_path);
    } else if (config_path) {
        candidates.push_back(*config_path);
    } else {
        candidates = fallbacks;
    }
    for (const auto& p : candidates) {
        if (fs::exists(p)) {
            return composite::BoundsRegistry::from_json(util::read_json(p));
        }
        if (!explicit_path.empty() || config_path) {
            throw ConfigError(fmt::format("bounds file not found: {}", p.string()));
        }
    }
    std::string tried;
    for (const auto& p : candidates) tried += " " + p.string();
    throw ConfigError(fmt::format("no bounds registry given (--bounds) and none found at:{}", tried));
}

std::vector<report::MetricsRow> rows_from_reports(const fs::path& root) {
    std::vector<report::MetricsRow> rows;
    for (auto& r : harness::collect_reports(root)) {
        rows.push_back({r.key, r.key.model, r.report});
    }
    if (rows.empty()) {
        throw InvalidInput(fmt::format("no run reports under {}", (root / "runs").string()));
    }
    return rows;
}

std::vector<report::MetricsRow> load_rows(const std::string& metrics_csv, const fs::path& root) {
    return metrics_csv.empty() ? rows_from_reports(root) : report::read_metrics_csv(metrics_csv);
}

Steps parse_steps_option(const std::string& s) {
    return Steps::parse(s);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Benchmark harness for class-conditional image generators", "genbench"};
    app.require_subcommand(1);
    Globals g;
    std::string out_opt = "out";
    app.add_option("--out", out_opt, "Root directory for every output")->capture_default_str();
    app.add_option("--config", g.config, "Sweep configuration (genbench.json)");

    // plan
    auto* plan = app.add_subcommand("plan", "Print the runs a config expands to");
    // run
    auto* run = app.add_subcommand("run", "Generate images for every planned run");
    // ingest
    auto* ingest = app.add_subcommand("ingest", "Register pre-generated images as a run");
    std::string ing_images, ing_model, ing_dataset, ing_steps;
    double ing_cfg = 1.0;
    ingest->add_option("--images", ing_images, "Directory of <sample_id>.<ext> files")->required();
    ingest->add_option("--model", ing_model, "Model id from the config")->required();
    ingest->add_option("--dataset", ing_dataset, "Dataset id from the config")->required();
    ingest->add_option("--cfg", ing_cfg, "Guidance scale")->required();
    ingest->add_option("--steps", ing_steps, "Step count or 'dynamic'")->required();
    // eval
    auto* eval = app.add_subcommand("eval", "Compute metric reports for completed runs");
    // score
    auto* score = app.add_subcommand("score", "Print MMHM for each row of a metrics table");
    std::string score_metrics, score_bounds;
    score->add_option("--metrics", score_metrics, "Metrics CSV (default: run reports under --out)");
    score->add_option("--bounds", score_bounds, "Bounds registry JSON");
    // bounds
    auto* bounds = app.add_subcommand("bounds", "Compute and persist a bounds registry");
    std::string bounds_metrics, bounds_output, bounds_dataset;
    std::vector<std::string> bounds_exclude;
    bool bounds_published = false;
    bounds->add_option("--metrics", bounds_metrics, "Metrics CSV (default: run reports under --out)");
    bounds->add_option("--exclude", bounds_exclude, "Run key to leave out (repeatable)");
    bounds->add_option("--dataset", bounds_dataset, "Dataset label recorded in the registry");
    bounds->add_option("--output", bounds_output, "Destination (default: <out>/bounds.json)");
    bounds->add_flag("--published", bounds_published, "Write the published ImageNet bounds instead");
    // report
    auto* rep = app.add_subcommand("report", "Write the benchmark table (CSV and text)");
    std::string rep_metrics, rep_bounds;
    rep->add_option("--metrics", rep_metrics, "Metrics CSV (default: run reports under --out)");
    rep->add_option("--bounds", rep_bounds, "Bounds registry JSON");
    // heatmap
    auto* heat = app.add_subcommand("heatmap", "Write CFG x steps heatmaps (CSV and SVG) for five metrics");
    std::string heat_grid, heat_metrics, heat_bounds, heat_model, heat_dataset, heat_dest;
    bool heat_default_axes = false;
    heat->add_option("--grid", heat_grid, "Sweep root with runs/*/report.json, or a directory holding metrics.csv");
    heat->add_option("--metrics", heat_metrics, "Metrics CSV");
    heat->add_option("--bounds", heat_bounds, "Bounds registry JSON (default: <grid>/bounds.json)");
    heat->add_option("--model", heat_model, "Keep rows of this model");
    heat->add_option("--dataset", heat_dataset, "Keep rows of this dataset");
    heat->add_option("--dest", heat_dest, "Output directory (default: <grid or out>/heatmaps)");
    heat->add_flag("--default-axes", heat_default_axes, "Use the CFG {1,3,6,7,9,12,15} x steps {1,5,10,15,20,25} grid");
    // dataset
    auto* dataset = app.add_subcommand("dataset", "Build the web-crawled evaluation set");
    dataset->require_subcommand(1);
    auto* dbuild = dataset->add_subcommand("build", "Stream shards into ranked per-class candidates");
    std::string db_synsets;
    std::vector<std::string> db_shards, db_embedder;
    relaionet::BuildOptions db_opts;
    dbuild->add_option("--synsets", db_synsets, "synsets.json")->required();
    dbuild->add_option("--shard", db_shards, "Metadata shard (repeatable)")->required();
    dbuild->add_option("--threshold", db_opts.threshold, "Keep captions with similarity strictly above this")
        ->capture_default_str();
    dbuild->add_option("--cap", db_opts.cap, "Images per class")->capture_default_str();
    dbuild->add_option("--top-n", db_opts.top_n, "Classes to keep")->capture_default_str();
    dbuild->add_option("--workers", db_opts.workers, "Shard workers")->capture_default_str();
    dbuild->add_option("--embed-batch", db_opts.embed_batch, "Captions per embedder call")->capture_default_str();
    dbuild->add_option("--embedder", db_embedder, "Text embedder command, for shards without a similarity column")
        ->expected(1, -1);
    auto* ddown = dataset->add_subcommand("download", "Download candidates and write the dataset manifest");
    std::string dd_candidates;
    std::vector<std::string> dd_exclusions;
    std::size_t dd_attempts = 3, dd_workers = 8;
    long dd_backoff_ms = 250, dd_interval_ms = 0;
    ddown->add_option("--candidates", dd_candidates, "candidates.json (default: <out>/candidates.json)");
    ddown->add_option("--exclusions", dd_exclusions, "exclusions.csv (repeatable)");
    ddown->add_option("--attempts", dd_attempts, "Attempts per URL")->capture_default_str();
    ddown->add_option("--workers", dd_workers, "Concurrent downloads")->capture_default_str();
    ddown->add_option("--backoff-ms", dd_backoff_ms, "First retry delay; doubles per attempt")->capture_default_str();
    ddown->add_option("--host-interval-ms", dd_interval_ms, "Minimum gap between requests to one host")
        ->capture_default_str();
    // toygen
    auto* toygen = app.add_subcommand("toygen", "2-D Gaussian flow generator used to exercise the pipeline");
    toygen->require_subcommand(1);
    auto* tadapter = toygen->add_subcommand("adapter", "Serve one adapter job");
    std::string ta_config, ta_job;
    tadapter->add_option("--toy-config", ta_config, "Toy mixture JSON")->required();
    tadapter->add_option("job", ta_job, "job.json")->required();
    auto* tdataset = toygen->add_subcommand("dataset", "Write a toy reference dataset");
    std::string td_config, td_id = "toy", td_dir;
    std::size_t td_per_class = 50;
    std::uint64_t td_seed = toy::kDefaultReferenceSeed;
    tdataset->add_option("--toy-config", td_config, "Toy mixture JSON")->required();
    tdataset->add_option("--id", td_id, "Dataset id")->capture_default_str();
    tdataset->add_option("--per-class", td_per_class, "Examples per class")->capture_default_str();
    tdataset->add_option("--reference-seed", td_seed, "Seed of the reference draws")->capture_default_str();
    tdataset->add_option("--dir", td_dir, "Output directory (default: <out>/datasets/<id>)");

    try {
        auto argv = args;
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }
    g.out = out_opt;

    try {
        if (plan->parsed()) {
            const auto config = require_config(g);
            const auto runs = planned_runs(config, g);
            auto plan_json = nlohmann::json::array();
            for (const auto& spec : runs) {
                out << fmt::format("{}\t{} samples\t{}\n", spec.key.to_string(), spec.class_plan.size(),
                                   spec.output_dir.string());
                plan_json.push_back({{"run_key", spec.key.to_string()},
                                     {"samples", spec.class_plan.size()},
                                     {"output_dir", spec.output_dir.string()},
                                     {"class_imbalance", spec.class_balance.imbalanced}});
            }
            util::write_json(g.out / "plan.json", {{"schema_version", 1}, {"runs", plan_json}});
            out << fmt::format("{} runs\n", runs.size());
            return 0;
        }
        if (run->parsed()) {
            const auto config = require_config(g);
            const auto runs = planned_runs(config, g);
            std::vector<std::string> status(runs.size());
            util::parallel_for(runs.size(), run_workers(config), [&](std::size_t i) {
                bool reused = false;
                const auto m = harness::execute_run(runs[i], &reused);
                status[i] = fmt::format("{}\t{}\t{} images", runs[i].key.to_string(), reused ? "reused" : "generated",
                                        m.entries.size());
            });
            for (const auto& s : status) out << s << "\n";
            return 0;
        }
        if (ingest->parsed()) {
            const auto config = require_config(g);
            const auto datasets = harness::load_datasets(config);
            const auto model = std::find_if(config.models.begin(), config.models.end(),
                                            [&](const auto& m) { return m.id == ing_model; });
            if (model == config.models.end()) {
                throw ConfigError(fmt::format("unknown model '{}'", ing_model));
            }
            const auto ds = datasets.find(ing_dataset);
            if (ds == datasets.end()) {
                throw ConfigError(fmt::format("unknown dataset '{}'", ing_dataset));
            }
            const auto spec =
                harness::make_run_spec(*model, ing_cfg, parse_steps_option(ing_steps), ds->second, config.seed, g.out);
            const auto m = harness::ingest_directory(ing_images, spec);
            out << fmt::format("{}\tingested\t{} images\n", m.key.to_string(), m.entries.size());
            return 0;
        }
        if (eval->parsed()) {
            const auto config = require_config(g);
            const auto runs = planned_runs(config, g);
            const auto datasets = harness::load_datasets(config);
            const auto binding = harness::resolve_binding(config.backends, config.base_dir, g.out / "work");
            binding.require_resolved();
            harness::EvalOptions opts;
            opts.batch_size = config.batch_size;
            opts.is_splits = config.is_splits;
            opts.workers = run_workers(config);
            std::map<std::string, metrics::GaussianStats> refs;
            std::size_t evaluated = 0;
            for (const auto& spec : runs) {
                if (!fs::exists(spec.output_dir / harness::kManifestFile)) {
                    throw IncompleteRun(fmt::format("run {} has no manifest; run `genbench run` or `genbench ingest` first",
                                                    spec.key.to_string()));
                }
                const auto manifest = harness::RunManifest::load(spec.output_dir);
                auto ref = refs.find(spec.key.dataset);
                if (ref == refs.end()) {
                    ref = refs.emplace(spec.key.dataset,
                                       harness::reference_stats(datasets.at(spec.key.dataset), binding.feature->id(),
                                                                g.out / "cache"))
                              .first;
                }
                const auto rep_ = harness::evaluate_run(manifest, ref->second, binding, opts);
                harness::write_run_report(spec.output_dir / harness::kReportFile, manifest, rep_, binding);
                out << fmt::format("{}\tfid={:.4f}\tis={:.4f}\tclip={:.4f}\tpick={:.4f}\n", spec.key.to_string(),
                                   rep_.fid, rep_.is_mean, rep_.clip_score, rep_.pick_score);
                ++evaluated;
            }
            util::write_atomic(g.out / "metrics.csv", report::metrics_csv(rows_from_reports(g.out)));
            out << fmt::format("{} runs evaluated\n", evaluated);
            return 0;
        }
        if (score->parsed()) {
            std::optional<fs::path> cfg_bounds;
            if (!g.config.empty()) cfg_bounds = require_config(g).bounds;
            const auto reg = load_bounds(score_bounds, cfg_bounds, {g.out / "bounds.json"});
            const auto table = report::build_table(load_rows(score_metrics, g.out), reg);
            out << report::score_lines(table);
            return 0;
        }
        if (bounds->parsed()) {
            composite::BoundsRegistry reg;
            if (bounds_published) {
                reg = composite::BoundsRegistry::published_imagenet();
            } else {
                const auto rows = load_rows(bounds_metrics, g.out);
                std::vector<composite::KeyedReport> keyed;
                for (const auto& r : rows) keyed.push_back({r.key, r.report});
                std::vector<RunKey> excluded;
                for (const auto& k : bounds_exclude) excluded.push_back(RunKey::parse(k));
                auto label = bounds_dataset;
                if (label.empty()) label = rows.front().key.dataset;
                reg = composite::compute_bounds(keyed, excluded, label);
            }
            const fs::path dest = bounds_output.empty() ? g.out / "bounds.json" : fs::path(bounds_output);
            util::write_json(dest, reg.to_json());
            out << dest.string() << "\n";
            return 0;
        }
        if (rep->parsed()) {
            std::optional<fs::path> cfg_bounds;
            if (!g.config.empty()) cfg_bounds = require_config(g).bounds;
            const auto reg = load_bounds(rep_bounds, cfg_bounds, {g.out / "bounds.json"});
            const auto table = report::build_table(load_rows(rep_metrics, g.out), reg);
            util::write_atomic(g.out / "report" / "table.csv", report::table_csv(table));
            const auto text = report::table_text(table);
            util::write_atomic(g.out / "report" / "table.txt", text);
            out << text;
            return 0;
        }
        if (heat->parsed()) {
            std::vector<report::MetricsRow> rows;
            fs::path base = g.out;
            if (!heat_metrics.empty()) {
                rows = report::read_metrics_csv(heat_metrics);
            } else if (!heat_grid.empty()) {
                base = heat_grid;
                if (fs::is_directory(base / "runs")) {
                    rows = rows_from_reports(base);
                } else if (fs::exists(base / "metrics.csv")) {
                    rows = report::read_metrics_csv(base / "metrics.csv");
                } else {
                    throw InvalidInput(fmt::format("{} has neither runs/ nor metrics.csv", base.string()));
                }
            } else {
                rows = rows_from_reports(g.out);
            }
            std::erase_if(rows, [&](const auto& r) {
                return (!heat_model.empty() && r.key.model != heat_model) ||
                       (!heat_dataset.empty() && r.key.dataset != heat_dataset);
            });
            std::optional<fs::path> cfg_bounds;
            if (!g.config.empty()) cfg_bounds = require_config(g).bounds;
            const auto reg = load_bounds(heat_bounds, cfg_bounds, {base / "bounds.json", g.out / "bounds.json"});
            report::HeatmapAxes axes;
            if (heat_default_axes) {
                axes.cfgs = harness::kDefaultCfgGrid;
                for (int s : harness::kDefaultStepGrid) axes.steps.push_back(Steps(s));
            }
            const fs::path dest = heat_dest.empty() ? base / "heatmaps" : fs::path(heat_dest);
            for (const auto& grid : report::build_heatmaps(rows, reg, axes)) {
                const auto name = "heatmap_" + report::heatmap_metric_name(grid.metric);
                util::write_atomic(dest / (name + ".csv"), report::heatmap_csv(grid));
                util::write_atomic(dest / (name + ".svg"), report::heatmap_svg(grid));
                out << (dest / (name + ".csv")).string() << "\n" << (dest / (name + ".svg")).string() << "\n";
            }
            return 0;
        }
        if (dbuild->parsed()) {
            if (!db_embedder.empty()) {
                db_opts.embedder = std::make_shared<relaionet::ProcessTextEmbedder>(db_embedder, g.out / "work" / "embed");
            }
            const auto synsets = relaionet::load_synsets(db_synsets);
            std::vector<fs::path> shards(db_shards.begin(), db_shards.end());
            const auto build = relaionet::build_candidates(synsets, shards, db_opts);
            util::write_json(g.out / relaionet::kCandidatesFile, build.candidates_json());
            const auto report_json = build.report_json();
            util::write_json(g.out / relaionet::kBuildReportFile, report_json);
            for (const auto& s : build.shards) {
                if (s.error) err << fmt::format("warning: shard {} failed: {}\n", s.path, *s.error);
            }
            out << fmt::format("{} rows, {} kept, {} classes\n", report_json["totals"]["rows"].get<std::size_t>(),
                               report_json["totals"]["kept"].get<std::size_t>(), build.classes.size());
            return 0;
        }
        if (ddown->parsed()) {
            const fs::path cand = dd_candidates.empty() ? g.out / relaionet::kCandidatesFile : fs::path(dd_candidates);
            const auto classes = relaionet::load_candidates(cand);
            relaionet::ExclusionList exclusions;
            for (const auto& p : dd_exclusions) {
                relaionet::merge_exclusions(exclusions, relaionet::load_exclusions(p));
            }
            relaionet::DownloadOptions opts;
            opts.root = g.out;
            opts.attempts = dd_attempts;
            opts.workers = dd_workers;
            opts.backoff_base = std::chrono::milliseconds(dd_backoff_ms);
            opts.per_host_interval = std::chrono::milliseconds(dd_interval_ms);
            const auto outcome = relaionet::download_and_finalize(classes, exclusions, opts);
            util::write_json(g.out / relaionet::kDatasetManifestFile, outcome.manifest);
            const auto report_path = g.out / relaionet::kBuildReportFile;
            nlohmann::json report_json = fs::exists(report_path) ? util::read_json(report_path) : nlohmann::json::object();
            for (const auto& [k, v] : outcome.report.items()) report_json[k] = v;
            util::write_json(report_path, report_json);
            for (const auto& w : outcome.report["warnings"]) err << "warning: " << w.get<std::string>() << "\n";
            out << fmt::format("{} images in {} classes ({} fetched, {} reused, {} dead)\ndigest {}\n",
                               outcome.manifest["counts"]["images"].get<std::size_t>(),
                               outcome.manifest["counts"]["classes"].get<std::size_t>(), outcome.fetched,
                               outcome.reused, outcome.dead, outcome.manifest["digest"].get<std::string>());
            return 0;
        }
        if (tadapter->parsed()) {
            return toy::adapter_main(ta_job, toy::ToyConfig::load(ta_config), err);
        }
        if (tdataset->parsed()) {
            const fs::path dir = td_dir.empty() ? g.out / "datasets" / td_id : fs::path(td_dir);
            const auto ds = toy::write_toy_dataset(toy::ToyConfig::load(td_config), td_id, td_per_class, td_seed, dir);
            out << fmt::format("{}\t{} examples\t{}\n", ds.id(), ds.examples().size(), (dir / "dataset.json").string());
            return 0;
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const RuntimeFailure& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << app.help();
    return 1;
}

}  // namespace genbench
