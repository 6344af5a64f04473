#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "corebatch/mixture.hpp"
#include "corebatch/mlp.hpp"
#include "corebatch/sampling.hpp"

namespace corebatch {

struct GanConfig {
    std::size_t latent_dim = 2;
    // Half-width of the uniform latent box. Matching the data span keeps the
    // generator from having to stretch a tiny box across the whole grid,
    // which is what starves the outermost modes.
    double prior_bound = 1.0;
    // Width and learning rate are tuned together: the mode-separation effect
    // of core-set batches needs a discriminator wide enough to hold one dip
    // per mixture mode, and a learning rate high enough to leave the diffuse
    // early phase within the step budget.
    std::size_t hidden = 128;
    // Fills the experiment's runtime budget on one core; shorter runs leave
    // both arms less converged and the batch-composition effect smaller.
    std::size_t steps = 20000;
    double lr_d = 1e-3;
    double lr_g = 1e-3;
    // The per-step rate decays linearly from lr to lr*final_lr_frac over the
    // run. High early rates sharpen the generator; the decayed tail stops late
    // updates from kicking small modes out of their basins. 1.0 = constant.
    double final_lr_frac = 1.0;
    SamplerConfig sampler;           // batch size and oversampling behavior
    std::size_t dataset_size = 50000;  // finite training set drawn once per run
    std::uint64_t seed = 1;
};

// Generator, discriminator, their optimizer states, and the step counter.
// Everything needed to continue or reproduce a run.
struct GanModel {
    Mlp g;
    Mlp d;
    AdamState g_state;
    AdamState d_state;
    std::uint64_t steps_done = 0;
};

struct StepLog {
    std::size_t step = 0;
    double loss_d = 0.0;
    double loss_g = 0.0;
};

struct TrainResult {
    GanModel model;
    std::vector<StepLog> logs;
};

// Mean of -log D(x) over real probabilities plus -log(1 - D(G(z))) over fake
// probabilities; each probability is clamped into [1e-7, 1 - 1e-7] first.
double discriminator_loss(std::span<const double> d_real, std::span<const double> d_fake);

// Non-saturating generator objective: mean of -log D(G(z)), same clamp.
double generator_loss(std::span<const double> d_fake);

// Full training loop: per step draw a prior batch and a data batch (core-set
// or random per cfg.sampler), one discriminator update, one generator update
// on the same batches. Throws if any loss goes non-finite, naming the step.
TrainResult train(const GanConfig& cfg, const GaussianMixtureSpec& mixture);

// Push `count` fresh prior draws through the generator.
Matrix generate(const Mlp& g, const PriorSpec& prior, std::size_t count, std::uint64_t seed);

// Versioned little-endian checkpoint; load restores it byte-for-byte.
void save_model(const GanModel& model, const std::filesystem::path& path);
GanModel load_model(const std::filesystem::path& path);

// CSV rows step,loss_d,loss_g with full double round-trip precision.
void save_step_logs(const std::vector<StepLog>& logs, const std::filesystem::path& path);

}  // namespace corebatch
