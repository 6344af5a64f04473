#include "corebatch/gan.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "corebatch/wire.hpp"

namespace corebatch {

namespace {

constexpr double kProbEps = 1e-7;

double clamp_prob(double p) { return std::min(std::max(p, kProbEps), 1.0 - kProbEps); }

double mean_neg_log(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("loss over an empty batch");
    double total = 0.0;
    for (double p : probs) total += -std::log(clamp_prob(p));
    return total / static_cast<double>(probs.size());
}

void check_config(const GanConfig& cfg) {
    if (cfg.latent_dim == 0 || cfg.hidden == 0)
        throw std::invalid_argument("network dimensions must be positive");
    if (cfg.sampler.batch_size == 0) throw std::invalid_argument("batch size must be positive");
    if (cfg.dataset_size < 2) throw std::invalid_argument("dataset too small");
    if (!(cfg.lr_d > 0.0) || !(cfg.lr_g > 0.0))
        throw std::invalid_argument("learning rates must be positive");
    if (!(cfg.prior_bound > 0.0))
        throw std::invalid_argument("prior bound must be positive");
    if (!(cfg.final_lr_frac > 0.0) || cfg.final_lr_frac > 1.0)
        throw std::invalid_argument("final_lr_frac must be in (0, 1]");
}

void check_finite_net(const Mlp& net, const char* what) {
    for (const auto& layer : net.layers) {
        for (double v : layer.w)
            if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite weight");
        for (double v : layer.b)
            if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite bias");
    }
}

}  // namespace

double discriminator_loss(std::span<const double> d_real, std::span<const double> d_fake) {
    double total = mean_neg_log(d_real);
    if (d_fake.empty()) throw std::invalid_argument("loss over an empty batch");
    double fake = 0.0;
    for (double p : d_fake) fake += -std::log(clamp_prob(1.0 - p));
    return total + fake / static_cast<double>(d_fake.size());
}

double generator_loss(std::span<const double> d_fake) { return mean_neg_log(d_fake); }

TrainResult train(const GanConfig& cfg, const GaussianMixtureSpec& mixture) {
    check_config(cfg);
    const std::size_t k = cfg.sampler.batch_size;
    const PriorSpec prior{cfg.latent_dim, -cfg.prior_bound, cfg.prior_bound};

    // One master stream hands out every sub-seed in a fixed order, so the
    // whole run replays from cfg.seed alone.
    std::mt19937_64 master(cfg.seed);
    const std::uint64_t seed_g = master();
    const std::uint64_t seed_d = master();
    const std::uint64_t seed_data = master();

    TrainResult out;
    out.model.g = make_mlp({cfg.latent_dim, cfg.hidden, cfg.hidden, cfg.hidden, 2}, seed_g);
    out.model.d = make_mlp({2, cfg.hidden, cfg.hidden, cfg.hidden, 1}, seed_d);
    out.model.g_state = make_adam_state(out.model.g);
    out.model.d_state = make_adam_state(out.model.d);

    PointSet pool;
    pool.points = sample_mixture(mixture, cfg.dataset_size, seed_data);
    pool.ids.resize(cfg.dataset_size);
    std::iota(pool.ids.begin(), pool.ids.end(), 0);

    AdamParams hp_d{cfg.lr_d, 0.5, 0.999, 1e-8};
    AdamParams hp_g{cfg.lr_g, 0.5, 0.999, 1e-8};

    Mlp& g = out.model.g;
    Mlp& d = out.model.d;
    auto g_grads = make_grads(g);
    auto d_grads = make_grads(d);
    out.logs.reserve(cfg.steps);

    for (std::size_t step = 0; step < cfg.steps; ++step) {
        const std::uint64_t prior_seed = master();
        const std::uint64_t data_seed = master();

        // Linear rate decay toward lr*final_lr_frac; both arms and both nets
        // share the schedule, so the batch-selection comparison is unaffected.
        const double ramp =
            1.0 - (1.0 - cfg.final_lr_frac) * static_cast<double>(step) /
                      static_cast<double>(cfg.steps);
        hp_d.lr = cfg.lr_d * ramp;
        hp_g.lr = cfg.lr_g * ramp;

        const Matrix z = sample_prior_batch(prior, cfg.sampler, prior_seed);
        const std::vector<std::uint64_t> ids = sample_data_batch(pool, cfg.sampler, data_seed);
        Matrix x(k, 2);
        for (std::size_t i = 0; i < k; ++i) {
            const double* src = pool.points.row(static_cast<std::size_t>(ids[i]));
            x.at(i, 0) = src[0];
            x.at(i, 1) = src[1];
        }

        ForwardCache g_cache;
        const Matrix gz = forward(g, z, &g_cache);

        // Discriminator update: one fused forward over [real; fake].
        Matrix d_in(2 * k, 2);
        std::memcpy(d_in.row(0), x.row(0), k * 2 * sizeof(double));
        std::memcpy(d_in.row(k), gz.row(0), k * 2 * sizeof(double));
        ForwardCache d_cache;
        const Matrix logits = forward(d, d_in, &d_cache);

        std::vector<double> p_real(k), p_fake(k);
        for (std::size_t i = 0; i < k; ++i) {
            p_real[i] = stable_sigmoid(logits.at(i, 0));
            p_fake[i] = stable_sigmoid(logits.at(k + i, 0));
        }
        const double loss_d = discriminator_loss(p_real, p_fake);

        Matrix dlogit(2 * k, 1);
        const double inv_k = 1.0 / static_cast<double>(k);
        for (std::size_t i = 0; i < k; ++i) {
            dlogit.at(i, 0) = (p_real[i] - 1.0) * inv_k;
            dlogit.at(k + i, 0) = p_fake[i] * inv_k;
        }
        backward(d, d_cache, dlogit, &d_grads);
        adam_step(d, d_grads, out.model.d_state, hp_d);

        // Generator update against the refreshed discriminator, same batch.
        ForwardCache d_cache2;
        const Matrix logits2 = forward(d, gz, &d_cache2);
        std::vector<double> p_gen(k);
        for (std::size_t i = 0; i < k; ++i) p_gen[i] = stable_sigmoid(logits2.at(i, 0));
        const double loss_g = generator_loss(p_gen);

        Matrix dlogit2(k, 1);
        for (std::size_t i = 0; i < k; ++i) dlogit2.at(i, 0) = (p_gen[i] - 1.0) * inv_k;
        Matrix d_gz;
        backward(d, d_cache2, dlogit2, nullptr, &d_gz);
        backward(g, g_cache, d_gz, &g_grads);
        adam_step(g, g_grads, out.model.g_state, hp_g);

        if (!std::isfinite(loss_d) || !std::isfinite(loss_g))
            throw std::runtime_error("non-finite loss at step " + std::to_string(step) +
                                     " (loss_d=" + std::to_string(loss_d) +
                                     ", loss_g=" + std::to_string(loss_g) + ")");
        out.logs.push_back({step, loss_d, loss_g});
        out.model.steps_done = step + 1;
    }
    return out;
}

Matrix generate(const Mlp& g, const PriorSpec& prior, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("generate: count must be positive");
    const Matrix z = random_batch(prior, count, seed);
    return forward(g, z);
}

namespace {

constexpr char kModelMagic[4] = {'S', 'G', 'M', 'D'};
constexpr std::uint32_t kModelVersion = 1;

void put_net(std::ostream& os, const Mlp& net) {
    wire::put_u32(os, static_cast<std::uint32_t>(net.layers.size()));
    for (const auto& layer : net.layers) {
        wire::put_u64(os, layer.in);
        wire::put_u64(os, layer.out);
        for (double v : layer.w) wire::put_f64(os, v);
        for (double v : layer.b) wire::put_f64(os, v);
    }
}

Mlp get_net(std::istream& is, const char* what) {
    const std::uint32_t nl = wire::get_u32(is, what);
    if (nl == 0) throw FormatError(std::string(what) + ": zero layers");
    Mlp net;
    net.layers.resize(nl);
    for (auto& layer : net.layers) {
        layer.in = wire::get_u64(is, what);
        layer.out = wire::get_u64(is, what);
        if (layer.in == 0 || layer.out == 0)
            throw FormatError(std::string(what) + ": zero layer width");
        if (layer.in * layer.out > (std::size_t{1} << 32))
            throw FormatError(std::string(what) + ": implausible layer size");
        layer.w.resize(layer.in * layer.out);
        layer.b.resize(layer.out);
        for (double& v : layer.w) v = wire::get_f64(is, what);
        for (double& v : layer.b) v = wire::get_f64(is, what);
    }
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l)
        if (net.layers[l].out != net.layers[l + 1].in)
            throw FormatError(std::string(what) + ": layer shapes do not chain");
    return net;
}

void put_adam(std::ostream& os, const AdamState& st) {
    wire::put_u64(os, st.t);
    for (const auto& grp : {&st.mw, &st.vw, &st.mb, &st.vb})
        for (const auto& vec : *grp)
            for (double v : vec) wire::put_f64(os, v);
}

AdamState get_adam(std::istream& is, const Mlp& net, const char* what) {
    AdamState st = make_adam_state(net);
    st.t = wire::get_u64(is, what);
    for (auto* grp : {&st.mw, &st.vw, &st.mb, &st.vb})
        for (auto& vec : *grp)
            for (double& v : vec) v = wire::get_f64(is, what);
    return st;
}

}  // namespace

void save_model(const GanModel& model, const std::filesystem::path& path) {
    check_finite_net(model.g, "save_model generator");
    check_finite_net(model.d, "save_model discriminator");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open for writing: " + path.string());
    os.write(kModelMagic, 4);
    wire::put_u32(os, kModelVersion);
    put_net(os, model.g);
    put_net(os, model.d);
    put_adam(os, model.g_state);
    put_adam(os, model.d_state);
    wire::put_u64(os, model.steps_done);
    os.flush();
    if (!os) throw FormatError("write failed: " + path.string());
}

GanModel load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open: " + path.string());

    char magic[4];
    if (!wire::get_bytes(is, magic, 4)) throw FormatError("file truncated in magic");
    if (std::memcmp(magic, kModelMagic, 4) != 0)
        throw FormatError("bad magic, not a model checkpoint");
    const std::uint32_t version = wire::get_u32(is, "version");
    if (version != kModelVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version));

    GanModel model;
    model.g = get_net(is, "generator");
    model.d = get_net(is, "discriminator");
    model.g_state = get_adam(is, model.g, "generator optimizer state");
    model.d_state = get_adam(is, model.d, "discriminator optimizer state");
    model.steps_done = wire::get_u64(is, "step counter");

    char extra;
    if (is.read(&extra, 1); is.gcount() == 1)
        throw FormatError("trailing bytes after checkpoint");

    check_finite_net(model.g, "load_model generator");
    check_finite_net(model.d, "load_model discriminator");
    return model;
}

void save_step_logs(const std::vector<StepLog>& logs, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open for writing: " + path.string());
    os << "step,loss_d,loss_g\n";
    char buf[64];
    for (const auto& log : logs) {
        os << log.step << ',';
        std::snprintf(buf, sizeof buf, "%.17g", log.loss_d);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", log.loss_g);
        os << buf << '\n';
    }
    if (!os) throw FormatError("write failed: " + path.string());
}

}  // namespace corebatch
