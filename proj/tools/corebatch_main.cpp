#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corebatch/experiment.hpp"
#include "corebatch/geometry.hpp"
#include "corebatch/projection.hpp"

using nlohmann::json;

namespace {

struct GmmFlags {
    std::size_t modes = 25;
    double sigma = 0.05;
    std::size_t steps = corebatch::GanConfig{}.steps;
    std::size_t batch = 128;
    std::size_t prior_factor = 4;
    std::size_t target_factor = 8;
    std::string coreset = "both";
    std::size_t seeds = 5;
    std::size_t hidden = corebatch::GanConfig{}.hidden;
    std::size_t dataset_size = corebatch::GanConfig{}.dataset_size;
    std::string out = "gmm_results.csv";
    std::string wall = "measure";
    std::string logs_dir;
};

int run_gmm(const GmmFlags& f) {
    corebatch::GmmExperimentConfig cfg;
    cfg.modes = f.modes;
    cfg.sigma = f.sigma;
    cfg.gan.steps = f.steps;
    cfg.gan.sampler.batch_size = f.batch;
    cfg.gan.sampler.prior_factor = f.prior_factor;
    cfg.gan.sampler.target_factor = f.target_factor;
    cfg.gan.hidden = f.hidden;
    cfg.gan.dataset_size = f.dataset_size;
    cfg.treatment = corebatch::parse_coreset_mode(f.coreset);
    if (f.seeds == 0) throw std::invalid_argument("--seeds must be at least 1");
    cfg.seeds.clear();
    for (std::size_t i = 1; i <= f.seeds; ++i) cfg.seeds.push_back(i);
    if (f.wall == "measure")
        cfg.measure_wall = true;
    else if (f.wall == "zero")
        cfg.measure_wall = false;
    else
        throw std::invalid_argument("--wall must be measure or zero");
    if (!f.logs_dir.empty()) cfg.logs_dir = f.logs_dir;

    const auto rows = corebatch::run_gmm_experiment(cfg);
    corebatch::write_results_csv(rows, f.out);

    double rec[2] = {0, 0}, hq[2] = {0, 0};
    std::size_t cnt[2] = {0, 0};
    for (const auto& row : rows) {
        const int a = row.arm == "coreset" ? 0 : 1;
        rec[a] += row.report.recovered_pct;
        hq[a] += row.report.high_quality_pct;
        ++cnt[a];
    }
    std::cout << "wrote " << rows.size() << " rows to " << f.out << "\n";
    for (int a = 0; a < 2; ++a) {
        if (!cnt[a]) continue;
        const double n = static_cast<double>(cnt[a]);
        std::printf("%-8s mean recovered %.2f%%  mean high-quality %.2f%%  (%zu runs)\n",
                    a == 0 ? "coreset" : "random", rec[a] / n, hq[a] / n, cnt[a]);
    }
    return 0;
}

struct BenchFlags {
    std::size_t n = 0;  // 0 derives target_factor * k
    std::size_t k = 128;
    std::size_t dim = 32;
    std::size_t latent_dim = 2;
    std::size_t proj_in_dim = 512;
    std::size_t prior_factor = 4;
    std::size_t target_factor = 8;
    std::size_t repeats = 50;
    std::uint64_t seed = 1;
    std::string out;
};

struct TimingStats {
    double mean_s = 0.0;
    double stddev_s = 0.0;
    double min_s = 0.0;
};

json to_json(const TimingStats& t) {
    return json{{"mean_s", t.mean_s}, {"stddev_s", t.stddev_s}, {"min_s", t.min_s}};
}

TimingStats summarize(const std::vector<double>& samples) {
    TimingStats out;
    const double n = static_cast<double>(samples.size());
    for (double s : samples) out.mean_s += s;
    out.mean_s /= n;
    if (samples.size() > 1) {
        double acc = 0.0;
        for (double s : samples) acc += (s - out.mean_s) * (s - out.mean_s);
        out.stddev_s = std::sqrt(acc / (n - 1.0));
    }
    out.min_s = *std::min_element(samples.begin(), samples.end());
    return out;
}

template <class Fn>
TimingStats time_kernel(std::size_t repeats, Fn&& fn) {
    for (int warm = 0; warm < 5; ++warm) fn();
    std::vector<double> samples;
    samples.reserve(repeats);
    for (std::size_t r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    return summarize(samples);
}

corebatch::Matrix gaussian_pool(std::size_t n, std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    corebatch::Matrix m(n, d);
    for (double& v : m.data) v = gauss(rng);
    return m;
}

int run_bench(const BenchFlags& f) {
    using corebatch::Exec;
    if (f.repeats == 0) throw std::invalid_argument("--repeats must be at least 1");
    if (f.k == 0) throw std::invalid_argument("--k must be at least 1");
    if (f.prior_factor == 0 || f.target_factor == 0)
        throw std::invalid_argument("oversampling factors must be at least 1");
    const std::size_t n_prior = f.prior_factor * f.k;
    const std::size_t n_target = f.target_factor * f.k;
    const std::size_t n_generic = f.n ? f.n : n_target;
    if (n_generic < f.k) throw std::invalid_argument("--n must be at least --k");

    std::mt19937_64 rng(f.seed);
    const auto prior_pool = gaussian_pool(n_prior, f.latent_dim, rng);
    const auto target_pool = gaussian_pool(n_target, f.dim, rng);
    const auto generic_pool = gaussian_pool(n_generic, f.dim, rng);

    corebatch::EmbeddingCache cache;
    cache.dim = f.proj_in_dim;
    cache.ids.resize(n_target);
    for (std::size_t i = 0; i < n_target; ++i) cache.ids[i] = i;
    cache.values.resize(n_target * f.proj_in_dim);
    {
        std::normal_distribution<float> gauss;
        for (float& v : cache.values) v = gauss(rng);
    }
    const auto proj = corebatch::make_projection(f.proj_in_dim, f.dim, f.seed);

    json report;
    report["config"] = {{"n", n_generic},          {"k", f.k},
                        {"dim", f.dim},            {"latent_dim", f.latent_dim},
                        {"proj_in_dim", f.proj_in_dim}, {"prior_factor", f.prior_factor},
                        {"target_factor", f.target_factor}, {"repeats", f.repeats},
                        {"seed", f.seed},          {"warmup", 5}};

    auto greedy_timings = [&](const corebatch::Matrix& pool, std::size_t k) {
        json j;
        for (Exec exec : {Exec::Serial, Exec::Parallel}) {
            const auto stats = time_kernel(f.repeats, [&] {
                (void)corebatch::greedy_coreset(pool, k, f.seed, exec);
            });
            j[exec == Exec::Serial ? "serial" : "parallel"] = to_json(stats);
        }
        j["speedup_serial_over_parallel"] =
            j["serial"]["mean_s"].get<double>() / j["parallel"]["mean_s"].get<double>();
        return j;
    };

    report["greedy"] = greedy_timings(generic_pool, f.k);
    report["greedy"]["n"] = n_generic;
    report["greedy"]["dim"] = f.dim;

    // The per-step cost a trainer pays for selection: one greedy pass over the
    // oversampled prior pool plus one over the oversampled target pool.
    for (Exec exec : {Exec::Serial, Exec::Parallel}) {
        const char* key = exec == Exec::Serial ? "serial" : "parallel";
        std::vector<double> prior_s, target_s, total_s;
        auto run_once = [&] {
            const auto t0 = std::chrono::steady_clock::now();
            (void)corebatch::greedy_coreset(prior_pool, f.k, f.seed, exec);
            const auto t1 = std::chrono::steady_clock::now();
            (void)corebatch::greedy_coreset(target_pool, f.k, f.seed, exec);
            const auto t2 = std::chrono::steady_clock::now();
            prior_s.push_back(std::chrono::duration<double>(t1 - t0).count());
            target_s.push_back(std::chrono::duration<double>(t2 - t1).count());
            total_s.push_back(std::chrono::duration<double>(t2 - t0).count());
        };
        for (int warm = 0; warm < 5; ++warm) run_once();
        prior_s.clear();
        target_s.clear();
        total_s.clear();
        for (std::size_t r = 0; r < f.repeats; ++r) run_once();
        report["per_step"]["prior"][key] = to_json(summarize(prior_s));
        report["per_step"]["target"][key] = to_json(summarize(target_s));
        report["per_step"]["total"][key] = to_json(summarize(total_s));
    }
    report["per_step"]["prior"]["n"] = n_prior;
    report["per_step"]["prior"]["dim"] = f.latent_dim;
    report["per_step"]["target"]["n"] = n_target;
    report["per_step"]["target"]["dim"] = f.dim;

    for (Exec exec : {Exec::Serial, Exec::Parallel}) {
        const auto stats = time_kernel(f.repeats, [&] {
            (void)corebatch::project(cache, proj, exec);
        });
        report["projection"][exec == Exec::Serial ? "serial" : "parallel"] = to_json(stats);
    }
    report["projection"]["n"] = n_target;
    report["projection"]["in_dim"] = f.proj_in_dim;
    report["projection"]["out_dim"] = f.dim;

    const std::string text = report.dump(2) + "\n";
    if (f.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(f.out);
        if (!os) throw corebatch::FormatError("cannot open for writing: " + f.out);
        os << text;
        std::cout << "wrote benchmark report to " << f.out << "\n";
    }
    return 0;
}

struct CoresetFileFlags {
    std::string input;
    std::size_t k = 0;
    std::string proj_dim = "32";
    std::uint64_t seed = 1;
    std::string out = "coreset_ids.txt";
    bool csv = false;
};

int run_coreset_file(const CoresetFileFlags& f) {
    const corebatch::EmbeddingCache cache =
        f.csv ? corebatch::import_cache_csv(f.input) : corebatch::load_cache(f.input);

    std::optional<std::size_t> proj_dim;
    if (f.proj_dim != "none") {
        std::size_t value = 0;
        const char* first = f.proj_dim.data();
        const char* last = first + f.proj_dim.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last || value == 0)
            throw std::invalid_argument("--proj-dim must be a positive integer or 'none'");
        proj_dim = value;
    }

    corebatch::PointSet points;
    if (proj_dim) {
        const auto proj = corebatch::make_projection(cache.dim, *proj_dim, f.seed);
        points = corebatch::project(cache, proj);
    } else {
        points = corebatch::to_point_set(cache);
    }

    const corebatch::CoresetResult sel = corebatch::greedy_coreset(points.points, f.k, f.seed);
    std::vector<std::size_t> order(sel.indices);
    std::sort(order.begin(), order.end());  // report selections in source order

    std::ofstream os(f.out);
    if (!os) throw corebatch::FormatError("cannot open for writing: " + f.out);
    for (std::size_t idx : order) os << cache.ids[idx] << "\n";
    if (!os) throw corebatch::FormatError("write failed: " + f.out);

    json sidecar;
    sidecar["input"] = f.input;
    sidecar["ids_file"] = f.out;
    sidecar["n"] = cache.size();
    sidecar["input_dim"] = cache.dim;
    sidecar["k"] = f.k;
    if (proj_dim)
        sidecar["projection_dim"] = *proj_dim;
    else
        sidecar["projection_dim"] = nullptr;
    sidecar["seed"] = f.seed;
    sidecar["coverage_radius"] = sel.coverage_radius;
    const std::string sidecar_path = f.out + ".json";
    std::ofstream js(sidecar_path);
    if (!js) throw corebatch::FormatError("cannot open for writing: " + sidecar_path);
    js << sidecar.dump(2) << "\n";

    std::cout << "selected " << f.k << " of " << cache.size() << " ids -> " << f.out
              << " (coverage radius " << sel.coverage_radius << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Core-set minibatch selection: greedy k-center compression for GAN training"};
    app.require_subcommand(1);

    GmmFlags gmm_flags;
    auto* gmm = app.add_subcommand("gmm", "Two-arm GAN experiment on a 2-D Gaussian grid mixture");
    gmm->add_option("--modes", gmm_flags.modes, "Mixture mode count (perfect square)")
        ->capture_default_str();
    gmm->add_option("--sigma", gmm_flags.sigma, "Per-mode isotropic stddev")->capture_default_str();
    gmm->add_option("--steps", gmm_flags.steps, "Training steps per run")->capture_default_str();
    gmm->add_option("--batch", gmm_flags.batch, "Batch size k")->capture_default_str();
    gmm->add_option("--prior-factor", gmm_flags.prior_factor, "Prior oversampling factor")
        ->capture_default_str();
    gmm->add_option("--target-factor", gmm_flags.target_factor, "Data oversampling factor")
        ->capture_default_str();
    gmm->add_option("--coreset", gmm_flags.coreset,
                    "Stages compressed in the treatment arm: both|prior|target|none")
        ->capture_default_str();
    gmm->add_option("--seeds", gmm_flags.seeds, "Number of paired seeds (1..N)")
        ->capture_default_str();
    gmm->add_option("--hidden", gmm_flags.hidden, "MLP hidden width for G and D")
        ->capture_default_str();
    gmm->add_option("--dataset-size", gmm_flags.dataset_size, "Training points drawn per run")
        ->capture_default_str();
    gmm->add_option("--out", gmm_flags.out, "Results CSV path")->capture_default_str();
    gmm->add_option("--wall", gmm_flags.wall,
                    "measure: record wall time; zero: write 0 for byte-stable output")
        ->capture_default_str();
    gmm->add_option("--logs-dir", gmm_flags.logs_dir,
                    "If set, write per-run step-loss CSVs into this directory");

    BenchFlags bench_flags;
    auto* bench = app.add_subcommand("bench", "Selection and projection kernel timings (JSON)");
    bench->add_option("--n", bench_flags.n, "Pool size for the generic greedy timing (default target_factor*k)");
    bench->add_option("--k", bench_flags.k, "Selected batch size")->capture_default_str();
    bench->add_option("--dim", bench_flags.dim, "Projected/target point dimension")
        ->capture_default_str();
    bench->add_option("--latent-dim", bench_flags.latent_dim, "Prior dimension")
        ->capture_default_str();
    bench->add_option("--proj-in-dim", bench_flags.proj_in_dim, "Raw embedding dimension")
        ->capture_default_str();
    bench->add_option("--prior-factor", bench_flags.prior_factor, "Prior oversampling factor")
        ->capture_default_str();
    bench->add_option("--target-factor", bench_flags.target_factor, "Data oversampling factor")
        ->capture_default_str();
    bench->add_option("--repeats", bench_flags.repeats, "Timed repetitions after 5 warm-ups")
        ->capture_default_str();
    bench->add_option("--seed", bench_flags.seed, "Pool/selection seed")->capture_default_str();
    bench->add_option("--out", bench_flags.out, "JSON output path (default stdout)");

    CoresetFileFlags cs_flags;
    auto* cs = app.add_subcommand("coreset-file",
                                  "Select a core-set from a stored embedding cache");
    cs->add_option("--input", cs_flags.input, "Embedding cache path")->required();
    cs->add_option("--k", cs_flags.k, "Number of ids to select")->required();
    cs->add_option("--proj-dim", cs_flags.proj_dim,
                   "Random-projection dimension, or 'none' to select in the raw space")
        ->capture_default_str();
    cs->add_option("--seed", cs_flags.seed, "Projection/selection seed")->capture_default_str();
    cs->add_option("--out", cs_flags.out, "Selected ids path (sidecar: <out>.json)")
        ->capture_default_str();
    cs->add_flag("--csv", cs_flags.csv, "Input is id,v0,v1,... CSV instead of the binary cache");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gmm->parsed()) return run_gmm(gmm_flags);
        if (bench->parsed()) return run_bench(bench_flags);
        if (cs->parsed()) return run_coreset_file(cs_flags);
    } catch (const corebatch::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
