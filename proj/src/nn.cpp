#include "rpeak/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rpeak/errors.hpp"

namespace rpeak::nn {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ShapeError(what);
}

}  // namespace

// --- ConvParams ------------------------------------------------------------

void ConvParams::init(int in, int out, int kernel) {
    in_ch = in;
    out_ch = out;
    k = kernel;
    w.assign(static_cast<std::size_t>(out) * in * kernel, 0.0);
    b.assign(static_cast<std::size_t>(out), 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
}

void ConvParams::init_uniform(Rng& rng, double bound) {
    for (auto& x : w) x = rng.uniform(-bound, bound);
    for (auto& x : b) x = rng.uniform(-bound, bound);
}

void ConvParams::zero_grad() {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
}

// --- Conv1d ------------------------------------------------------------------

FeatureMap Conv1d::forward(const FeatureMap& x) const {
    require(x.c == p.in_ch, "conv1d: input has " + std::to_string(x.c) + " channels, weights expect " +
                                std::to_string(p.in_ch));
    const int pad = (p.k - 1) / 2;
    FeatureMap y(x.n, p.out_ch, x.l);
    for (int i = 0; i < x.n; ++i) {
        for (int oc = 0; oc < p.out_ch; ++oc) {
            double* yr = &y.at(i, oc, 0);
            const double bias = p.b[static_cast<std::size_t>(oc)];
            for (int t = 0; t < x.l; ++t) yr[t] = bias;
            for (int ic = 0; ic < p.in_ch; ++ic) {
                const double* xr = &x.at(i, ic, 0);
                for (int t = 0; t < p.k; ++t) {
                    const double wv = p.wat(oc, ic, t);
                    if (wv == 0.0) continue;
                    const int shift = t - pad;
                    const int o_lo = std::max(0, -shift);
                    const int o_hi = std::min(x.l, x.l - shift);
                    for (int o = o_lo; o < o_hi; ++o) yr[o] += wv * xr[o + shift];
                }
            }
        }
    }
    return y;
}

FeatureMap Conv1d::backward(const FeatureMap& x, const FeatureMap& gy) {
    require(x.c == p.in_ch && gy.c == p.out_ch && gy.n == x.n && gy.l == x.l,
            "conv1d backward: shape mismatch");
    const int pad = (p.k - 1) / 2;
    FeatureMap gx(x.n, x.c, x.l);
    for (int i = 0; i < x.n; ++i) {
        for (int oc = 0; oc < p.out_ch; ++oc) {
            const double* gr = &gy.at(i, oc, 0);
            double gbias = 0.0;
            for (int t = 0; t < x.l; ++t) gbias += gr[t];
            p.gb[static_cast<std::size_t>(oc)] += gbias;
            for (int ic = 0; ic < p.in_ch; ++ic) {
                const double* xr = &x.at(i, ic, 0);
                double* gxr = &gx.at(i, ic, 0);
                for (int t = 0; t < p.k; ++t) {
                    const int shift = t - pad;
                    const int o_lo = std::max(0, -shift);
                    const int o_hi = std::min(x.l, x.l - shift);
                    const double wv = p.wat(oc, ic, t);
                    double gw_acc = 0.0;
                    for (int o = o_lo; o < o_hi; ++o) {
                        gw_acc += gr[o] * xr[o + shift];
                        gxr[o + shift] += gr[o] * wv;
                    }
                    p.gw[(static_cast<std::size_t>(oc) * p.in_ch + ic) * p.k + t] += gw_acc;
                }
            }
        }
    }
    return gx;
}

// --- TConv1d ------------------------------------------------------------------

FeatureMap TConv1d::forward(const FeatureMap& x) const {
    require(x.c == p.in_ch, "tconv1d: input has " + std::to_string(x.c) + " channels, weights expect " +
                                std::to_string(p.in_ch));
    const int pad = (p.k - 1) / 2;
    const int out_l = 2 * x.l;
    FeatureMap y(x.n, p.out_ch, out_l);
    for (int i = 0; i < x.n; ++i) {
        for (int oc = 0; oc < p.out_ch; ++oc) {
            double* yr = &y.at(i, oc, 0);
            const double bias = p.b[static_cast<std::size_t>(oc)];
            for (int o = 0; o < out_l; ++o) yr[o] = bias;
            for (int ic = 0; ic < p.in_ch; ++ic) {
                const double* xr = &x.at(i, ic, 0);
                for (int t = 0; t < p.k; ++t) {
                    const double wv = p.wat(oc, ic, t);
                    if (wv == 0.0) continue;
                    // o = 2*in + t - pad
                    for (int in = 0; in < x.l; ++in) {
                        const int o = 2 * in + t - pad;
                        if (o >= 0 && o < out_l) yr[o] += wv * xr[in];
                    }
                }
            }
        }
    }
    return y;
}

FeatureMap TConv1d::backward(const FeatureMap& x, const FeatureMap& gy) {
    require(x.c == p.in_ch && gy.c == p.out_ch && gy.n == x.n && gy.l == 2 * x.l,
            "tconv1d backward: shape mismatch");
    const int pad = (p.k - 1) / 2;
    const int out_l = gy.l;
    FeatureMap gx(x.n, x.c, x.l);
    for (int i = 0; i < x.n; ++i) {
        for (int oc = 0; oc < p.out_ch; ++oc) {
            const double* gr = &gy.at(i, oc, 0);
            double gbias = 0.0;
            for (int o = 0; o < out_l; ++o) gbias += gr[o];
            p.gb[static_cast<std::size_t>(oc)] += gbias;
            for (int ic = 0; ic < p.in_ch; ++ic) {
                const double* xr = &x.at(i, ic, 0);
                double* gxr = &gx.at(i, ic, 0);
                for (int t = 0; t < p.k; ++t) {
                    const double wv = p.wat(oc, ic, t);
                    double gw_acc = 0.0;
                    for (int in = 0; in < x.l; ++in) {
                        const int o = 2 * in + t - pad;
                        if (o < 0 || o >= out_l) continue;
                        gw_acc += gr[o] * xr[in];
                        gxr[in] += gr[o] * wv;
                    }
                    p.gw[(static_cast<std::size_t>(oc) * p.in_ch + ic) * p.k + t] += gw_acc;
                }
            }
        }
    }
    return gx;
}

// --- BatchNorm1d ------------------------------------------------------------

void BatchNorm1d::init(int channels) {
    ch = channels;
    gamma.assign(static_cast<std::size_t>(channels), 1.0);
    beta.assign(static_cast<std::size_t>(channels), 0.0);
    g_gamma.assign(gamma.size(), 0.0);
    g_beta.assign(beta.size(), 0.0);
    running_mean.assign(gamma.size(), 0.0);
    running_var.assign(gamma.size(), 1.0);
}

void BatchNorm1d::zero_grad() {
    std::fill(g_gamma.begin(), g_gamma.end(), 0.0);
    std::fill(g_beta.begin(), g_beta.end(), 0.0);
}

FeatureMap BatchNorm1d::forward(const FeatureMap& x, bool train, Cache* cache,
                                bool update_running) {
    require(x.c == ch, "batchnorm: channel mismatch");
    FeatureMap y(x.n, x.c, x.l);
    const double count = static_cast<double>(x.n) * x.l;
    for (int c = 0; c < ch; ++c) {
        double mean;
        double var;
        if (train) {
            double s = 0.0;
            for (int i = 0; i < x.n; ++i) {
                const double* xr = &x.at(i, c, 0);
                for (int t = 0; t < x.l; ++t) s += xr[t];
            }
            mean = s / count;
            double sq = 0.0;
            for (int i = 0; i < x.n; ++i) {
                const double* xr = &x.at(i, c, 0);
                for (int t = 0; t < x.l; ++t) {
                    const double d = xr[t] - mean;
                    sq += d * d;
                }
            }
            var = sq / count;
            if (update_running) {
                running_mean[static_cast<std::size_t>(c)] =
                    momentum * running_mean[static_cast<std::size_t>(c)] + (1.0 - momentum) * mean;
                running_var[static_cast<std::size_t>(c)] =
                    momentum * running_var[static_cast<std::size_t>(c)] + (1.0 - momentum) * var;
            }
        } else {
            mean = running_mean[static_cast<std::size_t>(c)];
            var = running_var[static_cast<std::size_t>(c)];
        }
        if (cache) {
            if (static_cast<int>(cache->mean.size()) != ch) {
                cache->mean.assign(static_cast<std::size_t>(ch), 0.0);
                cache->var.assign(static_cast<std::size_t>(ch), 0.0);
            }
            cache->mean[static_cast<std::size_t>(c)] = mean;
            cache->var[static_cast<std::size_t>(c)] = var;
        }
        const double inv = 1.0 / std::sqrt(var + eps);
        const double g = gamma[static_cast<std::size_t>(c)];
        const double be = beta[static_cast<std::size_t>(c)];
        for (int i = 0; i < x.n; ++i) {
            const double* xr = &x.at(i, c, 0);
            double* yr = &y.at(i, c, 0);
            for (int t = 0; t < x.l; ++t) yr[t] = g * (xr[t] - mean) * inv + be;
        }
    }
    return y;
}

FeatureMap BatchNorm1d::backward(const FeatureMap& x, const FeatureMap& gy, const Cache& cache) {
    require(x.same_shape(gy) && x.c == ch, "batchnorm backward: shape mismatch");
    FeatureMap gx(x.n, x.c, x.l);
    const double count = static_cast<double>(x.n) * x.l;
    for (int c = 0; c < ch; ++c) {
        const double mean = cache.mean[static_cast<std::size_t>(c)];
        const double var = cache.var[static_cast<std::size_t>(c)];
        const double inv = 1.0 / std::sqrt(var + eps);
        const double g = gamma[static_cast<std::size_t>(c)];

        double sum_gy = 0.0;
        double sum_gy_xhat = 0.0;
        for (int i = 0; i < x.n; ++i) {
            const double* xr = &x.at(i, c, 0);
            const double* gr = &gy.at(i, c, 0);
            for (int t = 0; t < x.l; ++t) {
                const double xhat = (xr[t] - mean) * inv;
                sum_gy += gr[t];
                sum_gy_xhat += gr[t] * xhat;
            }
        }
        g_beta[static_cast<std::size_t>(c)] += sum_gy;
        g_gamma[static_cast<std::size_t>(c)] += sum_gy_xhat;

        // d/dx of batch-statistic normalization
        const double k1 = g * inv;
        for (int i = 0; i < x.n; ++i) {
            const double* xr = &x.at(i, c, 0);
            const double* gr = &gy.at(i, c, 0);
            double* gxr = &gx.at(i, c, 0);
            for (int t = 0; t < x.l; ++t) {
                const double xhat = (xr[t] - mean) * inv;
                gxr[t] = k1 * (gr[t] - sum_gy / count - xhat * sum_gy_xhat / count);
            }
        }
    }
    return gx;
}

// --- MaxPool2 ------------------------------------------------------------------

FeatureMap MaxPool2::forward(const FeatureMap& x, std::vector<std::int32_t>* argmax) {
    require(x.l % 2 == 0, "maxpool2: odd input length " + std::to_string(x.l));
    const int out_l = x.l / 2;
    FeatureMap y(x.n, x.c, out_l);
    if (argmax) argmax->assign(y.size(), 0);
    std::size_t oidx = 0;
    for (int i = 0; i < x.n; ++i) {
        for (int c = 0; c < x.c; ++c) {
            const double* xr = &x.at(i, c, 0);
            double* yr = &y.at(i, c, 0);
            for (int o = 0; o < out_l; ++o, ++oidx) {
                const double a = xr[2 * o];
                const double b = xr[2 * o + 1];
                const int pick = (b > a) ? 1 : 0;  // tie keeps the earlier sample
                yr[o] = pick ? b : a;
                if (argmax) (*argmax)[oidx] = 2 * o + pick;
            }
        }
    }
    return y;
}

FeatureMap MaxPool2::backward(const FeatureMap& gy, const std::vector<std::int32_t>& argmax,
                              int in_len) {
    require(in_len == 2 * gy.l, "maxpool2 backward: length mismatch");
    require(argmax.size() == gy.size(), "maxpool2 backward: argmax size mismatch");
    FeatureMap gx(gy.n, gy.c, in_len);
    std::size_t oidx = 0;
    for (int i = 0; i < gy.n; ++i) {
        for (int c = 0; c < gy.c; ++c) {
            const double* gr = &gy.at(i, c, 0);
            double* gxr = &gx.at(i, c, 0);
            for (int o = 0; o < gy.l; ++o, ++oidx) gxr[argmax[oidx]] += gr[o];
        }
    }
    return gx;
}

// --- Activations ------------------------------------------------------------------

FeatureMap relu(const FeatureMap& x) {
    FeatureMap y = x;
    for (auto& v : y.v) v = v > 0.0 ? v : 0.0;
    return y;
}

FeatureMap relu_backward(const FeatureMap& gy, const FeatureMap& x) {
    require(gy.same_shape(x), "relu backward: shape mismatch");
    FeatureMap gx = gy;
    for (std::size_t i = 0; i < gx.v.size(); ++i)
        if (x.v[i] <= 0.0) gx.v[i] = 0.0;
    return gx;
}

FeatureMap sigmoid(const FeatureMap& x) {
    FeatureMap y = x;
    for (auto& v : y.v) v = 1.0 / (1.0 + std::exp(-v));
    return y;
}

FeatureMap sigmoid_backward(const FeatureMap& gy, const FeatureMap& y) {
    require(gy.same_shape(y), "sigmoid backward: shape mismatch");
    FeatureMap gx = gy;
    for (std::size_t i = 0; i < gx.v.size(); ++i) gx.v[i] *= y.v[i] * (1.0 - y.v[i]);
    return gx;
}

FeatureMap softmax2(const FeatureMap& x) {
    require(x.c == 2, "softmax2: expected exactly 2 channels, got " + std::to_string(x.c));
    FeatureMap y(x.n, 2, x.l);
    for (int i = 0; i < x.n; ++i) {
        const double* x0 = &x.at(i, 0, 0);
        const double* x1 = &x.at(i, 1, 0);
        double* y0 = &y.at(i, 0, 0);
        double* y1 = &y.at(i, 1, 0);
        for (int t = 0; t < x.l; ++t) {
            const double m = std::max(x0[t], x1[t]);
            const double e0 = std::exp(x0[t] - m);
            const double e1 = std::exp(x1[t] - m);
            const double z = e0 + e1;
            y0[t] = e0 / z;
            y1[t] = e1 / z;
        }
    }
    return y;
}

FeatureMap softmax2_backward(const FeatureMap& gy, const FeatureMap& y) {
    require(gy.same_shape(y) && y.c == 2, "softmax2 backward: shape mismatch");
    FeatureMap gx(y.n, 2, y.l);
    for (int i = 0; i < y.n; ++i) {
        const double* y0 = &y.at(i, 0, 0);
        const double* y1 = &y.at(i, 1, 0);
        const double* g0 = &gy.at(i, 0, 0);
        const double* g1 = &gy.at(i, 1, 0);
        double* o0 = &gx.at(i, 0, 0);
        double* o1 = &gx.at(i, 1, 0);
        for (int t = 0; t < y.l; ++t) {
            const double dot = g0[t] * y0[t] + g1[t] * y1[t];
            o0[t] = y0[t] * (g0[t] - dot);
            o1[t] = y1[t] * (g1[t] - dot);
        }
    }
    return gx;
}

// --- Dropout ------------------------------------------------------------------

FeatureMap Dropout::forward(const FeatureMap& x, bool train, Rng& rng) {
    if (!train || rate <= 0.0) {
        mask.clear();
        return x;
    }
    const double keep = 1.0 - rate;
    const double scale = 1.0 / keep;
    mask.assign(x.size(), 0);
    FeatureMap y = x;
    for (std::size_t i = 0; i < y.v.size(); ++i) {
        if (rng.uniform01() < keep) {
            mask[i] = 1;
            y.v[i] *= scale;
        } else {
            y.v[i] = 0.0;
        }
    }
    return y;
}

FeatureMap Dropout::backward(const FeatureMap& gy) const {
    if (mask.empty()) return gy;
    const double scale = 1.0 / (1.0 - rate);
    FeatureMap gx = gy;
    for (std::size_t i = 0; i < gx.v.size(); ++i) gx.v[i] = mask[i] ? gx.v[i] * scale : 0.0;
    return gx;
}

// --- Loss ------------------------------------------------------------------

BceOut bce_loss(const FeatureMap& pred, const FeatureMap& target,
                const std::vector<int>& valid_lengths) {
    require(pred.same_shape(target) && pred.c == 1, "bce_loss: shape mismatch");
    require(static_cast<int>(valid_lengths.size()) == pred.n, "bce_loss: valid_lengths size");
    constexpr double kEps = 1e-7;

    std::int64_t total = 0;
    for (int i = 0; i < pred.n; ++i) {
        require(valid_lengths[static_cast<std::size_t>(i)] <= pred.l, "bce_loss: valid > length");
        total += valid_lengths[static_cast<std::size_t>(i)];
    }
    require(total > 0, "bce_loss: no valid positions");

    BceOut out;
    out.grad = FeatureMap(pred.n, 1, pred.l);
    const double invN = 1.0 / static_cast<double>(total);
    double loss = 0.0;
    for (int i = 0; i < pred.n; ++i) {
        const double* pr = &pred.at(i, 0, 0);
        const double* yr = &target.at(i, 0, 0);
        double* gr = &out.grad.at(i, 0, 0);
        const int valid = valid_lengths[static_cast<std::size_t>(i)];
        for (int t = 0; t < valid; ++t) {
            const double p = std::clamp(pr[t], kEps, 1.0 - kEps);
            const double y = yr[t];
            loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
            gr[t] = invN * (p - y) / (p * (1.0 - p));
        }
    }
    out.loss = loss * invN;
    return out;
}

// --- Adam ------------------------------------------------------------------

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state) {
    require(params.size() == grads.size(), "adam_step: grad size mismatch");
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    state.t += 1;
    const double b1t = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double b2t = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double mhat = state.m[i] / b1t;
        const double vhat = state.v[i] / b2t;
        params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

}  // namespace rpeak::nn
