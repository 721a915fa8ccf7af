#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rpeak/rng.hpp"

namespace rpeak::nn {

// Batch of 1D feature maps, contiguous [batch][channel][position].
struct FeatureMap {
    int n = 0;  // batch
    int c = 0;  // channels
    int l = 0;  // length
    std::vector<double> v;

    FeatureMap() = default;
    FeatureMap(int n_, int c_, int l_)
        : n(n_), c(c_), l(l_), v(static_cast<std::size_t>(n_) * c_ * l_, 0.0) {}

    double& at(int i, int ch, int t) {
        return v[(static_cast<std::size_t>(i) * c + ch) * l + t];
    }
    double at(int i, int ch, int t) const {
        return v[(static_cast<std::size_t>(i) * c + ch) * l + t];
    }
    std::size_t size() const { return v.size(); }
    bool same_shape(const FeatureMap& o) const { return n == o.n && c == o.c && l == o.l; }
};

// --- Convolutions --------------------------------------------------------

// Kernel + bias shared by Conv1d and TConv1d. Weight layout [out][in][k].
struct ConvParams {
    int in_ch = 0;
    int out_ch = 0;
    int k = 0;
    std::vector<double> w;
    std::vector<double> b;
    std::vector<double> gw;  // accumulated gradients
    std::vector<double> gb;

    void init(int in, int out, int kernel);
    void init_uniform(Rng& rng, double bound);
    void zero_grad();
    double& wat(int oc, int ic, int t) { return w[(static_cast<std::size_t>(oc) * in_ch + ic) * k + t]; }
    double wat(int oc, int ic, int t) const { return w[(static_cast<std::size_t>(oc) * in_ch + ic) * k + t]; }
    std::size_t param_count() const { return w.size() + b.size(); }
};

// Stride-1 cross-correlation with zero "same" padding: output length equals
// input length. Left pad = floor((k-1)/2).
struct Conv1d {
    ConvParams p;
    FeatureMap forward(const FeatureMap& x) const;
    FeatureMap backward(const FeatureMap& x, const FeatureMap& gy);
};

// Stride-2 transposed convolution with padding fixed so the output length is
// exactly twice the input length.
struct TConv1d {
    ConvParams p;
    FeatureMap forward(const FeatureMap& x) const;
    FeatureMap backward(const FeatureMap& x, const FeatureMap& gy);
};

// --- Batch normalization --------------------------------------------------

struct BatchNorm1d {
    int ch = 0;
    double momentum = 0.9;
    double eps = 1e-5;
    std::vector<double> gamma, beta;
    std::vector<double> g_gamma, g_beta;
    std::vector<double> running_mean, running_var;

    // Per-forward batch statistics needed by backward.
    struct Cache {
        std::vector<double> mean, var;
    };

    void init(int channels);
    void zero_grad();
    // train: normalize by batch statistics over (batch x length) and update
    // running stats; infer: normalize by running stats.
    FeatureMap forward(const FeatureMap& x, bool train, Cache* cache,
                       bool update_running = true);
    FeatureMap backward(const FeatureMap& x, const FeatureMap& gy, const Cache& cache);
    std::size_t param_count() const { return gamma.size() + beta.size(); }
};

// --- Pooling, activations, dropout ---------------------------------------

// Non-overlapping pairwise max; ties keep the earlier index.
struct MaxPool2 {
    static FeatureMap forward(const FeatureMap& x, std::vector<std::int32_t>* argmax);
    static FeatureMap backward(const FeatureMap& gy, const std::vector<std::int32_t>& argmax,
                               int in_len);
};

FeatureMap relu(const FeatureMap& x);
FeatureMap relu_backward(const FeatureMap& gy, const FeatureMap& x);
FeatureMap sigmoid(const FeatureMap& x);
FeatureMap sigmoid_backward(const FeatureMap& gy, const FeatureMap& y);
// Per-position softmax across exactly 2 channels.
FeatureMap softmax2(const FeatureMap& x);
FeatureMap softmax2_backward(const FeatureMap& gy, const FeatureMap& y);

// Inverted dropout; identity when rate is 0 or in infer mode.
struct Dropout {
    double rate = 0.0;
    std::vector<std::uint8_t> mask;  // from the last train-mode forward
    FeatureMap forward(const FeatureMap& x, bool train, Rng& rng);
    FeatureMap backward(const FeatureMap& gy) const;
};

// --- Loss -----------------------------------------------------------------

// Mean binary cross-entropy over the valid prefix of each map in the batch.
// Predictions are clipped into [eps, 1-eps], eps = 1e-7, before the logs.
struct BceOut {
    double loss = 0.0;
    FeatureMap grad;  // d loss / d pred, zero at padded positions
};
BceOut bce_loss(const FeatureMap& pred, const FeatureMap& target,
                const std::vector<int>& valid_lengths);

// --- Optimizer --------------------------------------------------------------

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t t = 0;
    std::vector<double> m, v;
};

// One bias-corrected Adam update; m/v are sized on first use.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state);

}  // namespace rpeak::nn
