#include "corebatch/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Core>

namespace corebatch {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using MapConst = Eigen::Map<const RowMat>;

}  // namespace

Mlp make_mlp(const std::vector<std::size_t>& widths, std::uint64_t seed) {
    if (widths.size() < 2) throw std::invalid_argument("make_mlp: need at least input and output widths");
    for (std::size_t w : widths)
        if (w == 0) throw std::invalid_argument("make_mlp: zero layer width");

    std::mt19937_64 rng(seed);
    Mlp net;
    net.layers.resize(widths.size() - 1);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Layer& layer = net.layers[l];
        layer.in = widths[l];
        layer.out = widths[l + 1];
        layer.w.resize(layer.in * layer.out);
        layer.b.assign(layer.out, 0.0);
        const double bound = std::sqrt(6.0 / static_cast<double>(layer.in));
        std::uniform_real_distribution<double> uni(-bound, bound);
        for (double& v : layer.w) v = uni(rng);
    }
    return net;
}

Matrix forward(const Mlp& net, const Matrix& input, ForwardCache* cache) {
    if (net.layers.empty()) throw std::invalid_argument("forward: empty network");
    if (input.cols != net.input_dim())
        throw std::invalid_argument("forward: input dimension does not match first layer");

    const std::size_t batch = input.rows;
    if (cache) {
        cache->input = input;
        cache->pre.clear();
        cache->act.clear();
    }

    Matrix cur = input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        Matrix pre(batch, layer.out);
        MapConst x(cur.data.data(), batch, layer.in);
        MapConst w(layer.w.data(), layer.in, layer.out);
        MapMat p(pre.data.data(), batch, layer.out);
        p.noalias() = x * w;
        p.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(layer.b.data(), layer.out);
        if (cache) cache->pre.push_back(pre);

        const bool last = l + 1 == net.layers.size();
        if (!last) {
            for (double& v : pre.data) v = v > 0.0 ? v : 0.0;
        }
        if (cache) cache->act.push_back(pre);
        cur = std::move(pre);
    }
    return cur;
}

MlpGrads make_grads(const Mlp& net) {
    MlpGrads g;
    g.dw.resize(net.layers.size());
    g.db.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        g.dw[l].assign(net.layers[l].w.size(), 0.0);
        g.db[l].assign(net.layers[l].b.size(), 0.0);
    }
    return g;
}

void backward(const Mlp& net, const ForwardCache& cache, const Matrix& dout,
              MlpGrads* grads, Matrix* dinput) {
    const std::size_t nl = net.layers.size();
    if (cache.pre.size() != nl || cache.act.size() != nl)
        throw std::invalid_argument("backward: cache does not match network depth");
    if (cache.input.cols != net.input_dim())
        throw std::invalid_argument("backward: cached input width mismatch");
    const std::size_t batch = cache.input.rows;
    for (std::size_t l = 0; l < nl; ++l)
        if (cache.pre[l].rows != batch || cache.pre[l].cols != net.layers[l].out)
            throw std::invalid_argument("backward: cached activation shape mismatch");
    if (dout.rows != batch || dout.cols != net.output_dim())
        throw std::invalid_argument("backward: upstream gradient shape mismatch");

    if (grads) {
        grads->dw.assign(nl, {});
        grads->db.assign(nl, {});
    }

    Matrix delta = dout;  // gradient w.r.t. the current layer's post-activation
    for (std::size_t li = nl; li-- > 0;) {
        const Layer& layer = net.layers[li];
        const bool last = li + 1 == nl;

        // Gate through ReLU (the final layer is linear).
        if (!last) {
            const Matrix& pre = cache.pre[li];
            for (std::size_t idx = 0; idx < delta.data.size(); ++idx)
                if (!(pre.data[idx] > 0.0)) delta.data[idx] = 0.0;
        }

        MapConst d(delta.data.data(), batch, layer.out);

        if (grads) {
            const Matrix& x = li == 0 ? cache.input : cache.act[li - 1];
            std::vector<double>& dw = grads->dw[li];
            std::vector<double>& db = grads->db[li];
            dw.resize(layer.w.size());
            db.resize(layer.b.size());
            MapConst xm(x.data.data(), batch, layer.in);
            MapMat(dw.data(), layer.in, layer.out).noalias() = xm.transpose() * d;
            // Fixed-order accumulation: a vectorized column reduction over the
            // mapped buffer would group SIMD lanes by its heap alignment, making
            // the low bit of db depend on allocator history.
            std::fill(db.begin(), db.end(), 0.0);
            for (std::size_t r = 0; r < batch; ++r) {
                const double* row = delta.row(r);
                for (std::size_t c = 0; c < layer.out; ++c) db[c] += row[c];
            }
        }

        if (li == 0 && !dinput) break;

        Matrix dx(batch, layer.in);
        MapConst w(layer.w.data(), layer.in, layer.out);
        MapMat(dx.data.data(), batch, layer.in).noalias() = d * w.transpose();
        if (li == 0) {
            *dinput = std::move(dx);
        } else {
            delta = std::move(dx);
        }
    }
}

AdamState make_adam_state(const Mlp& net) {
    AdamState st;
    st.mw.resize(net.layers.size());
    st.vw.resize(net.layers.size());
    st.mb.resize(net.layers.size());
    st.vb.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        st.mw[l].assign(net.layers[l].w.size(), 0.0);
        st.vw[l].assign(net.layers[l].w.size(), 0.0);
        st.mb[l].assign(net.layers[l].b.size(), 0.0);
        st.vb[l].assign(net.layers[l].b.size(), 0.0);
    }
    return st;
}

static void adam_update(std::vector<double>& theta, const std::vector<double>& g,
                        std::vector<double>& m, std::vector<double>& v,
                        const AdamParams& hp, double bc1, double bc2) {
    if (g.size() != theta.size() || m.size() != theta.size() || v.size() != theta.size())
        throw std::invalid_argument("adam_step: gradient/state shape mismatch");
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = hp.beta1 * m[i] + (1.0 - hp.beta1) * g[i];
        v[i] = hp.beta2 * v[i] + (1.0 - hp.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        theta[i] -= hp.lr * mhat / (std::sqrt(vhat) + hp.eps);
    }
}

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, const AdamParams& hp) {
    if (grads.dw.size() != net.layers.size() || state.mw.size() != net.layers.size())
        throw std::invalid_argument("adam_step: layer count mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.t));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        adam_update(net.layers[l].w, grads.dw[l], state.mw[l], state.vw[l], hp, bc1, bc2);
        adam_update(net.layers[l].b, grads.db[l], state.mb[l], state.vb[l], hp, bc1, bc2);
    }
}

double stable_sigmoid(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

}  // namespace corebatch
