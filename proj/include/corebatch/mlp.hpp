#pragma once

#include <cstdint>
#include <vector>

#include "corebatch/matrix.hpp"

namespace corebatch {

// One fully connected layer. Weights are stored input-major (w[i*out + j])
// so the forward pass can stream rows of w with unit stride.
struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;
    std::vector<double> b;
};

struct Mlp {
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.front().in; }
    std::size_t output_dim() const { return layers.back().out; }
};

// widths = {in, h1, ..., out}; ReLU after every layer except the last.
// Weights are He-style uniform U(+-sqrt(6/fan_in)), biases zero.
Mlp make_mlp(const std::vector<std::size_t>& widths, std::uint64_t seed);

// Activations recorded by forward() so backward() can replay the pass.
struct ForwardCache {
    Matrix input;
    std::vector<Matrix> pre;  // pre-activation per layer
    std::vector<Matrix> act;  // post-activation per layer (last layer: linear)
};

// Returns the final activations (batch x output_dim). Pass a cache pointer
// when gradients will be needed afterwards.
Matrix forward(const Mlp& net, const Matrix& input, ForwardCache* cache = nullptr);

struct MlpGrads {
    std::vector<std::vector<double>> dw;
    std::vector<std::vector<double>> db;
};

MlpGrads make_grads(const Mlp& net);

// Fills grads (overwriting any previous content) with dLoss/dparam given the
// upstream gradient dout w.r.t. the network output. Pass grads = nullptr to
// skip parameter gradients (cheaper when only dinput is wanted). If dinput is
// non-null it receives dLoss/dinput. The cache must come from a forward pass
// of this net; a mismatched cache is rejected.
void backward(const Mlp& net, const ForwardCache& cache, const Matrix& dout,
              MlpGrads* grads, Matrix* dinput = nullptr);

struct AdamParams {
    double lr = 1e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<std::vector<double>> mw, vw;
    std::vector<std::vector<double>> mb, vb;
    std::uint64_t t = 0;
};

AdamState make_adam_state(const Mlp& net);

// Standard Adam with bias correction; increments state.t first.
void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, const AdamParams& hp);

// Numerically stable logistic sigmoid.
double stable_sigmoid(double s);

}  // namespace corebatch
