#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rpeak/labels.hpp"
#include "rpeak/nn.hpp"
#include "rpeak/signal.hpp"

namespace rpeak {

enum class OutputHead { Softmax2, Sigmoid1 };

struct ModelConfig {
    static constexpr int stages = 6;

    double window_seconds = 20.0;
    double sampling_rate_hz = 400.0;
    std::array<int, 6> kernel_schedule{9, 9, 6, 6, 3, 3};
    std::array<int, 6> filter_schedule{16, 16, 32, 32, 64, 64};
    bool skip_connections = true;
    double dropout_rate = 0.1;
    bool dropout_all_stages = false;  // default: last encoder stage only
    double bn_momentum = 0.9;
    double bn_eps = 1e-5;
    OutputHead output_head = OutputHead::Softmax2;
    std::uint64_t seed = 1;

    // round(window_seconds * fs), zero-padded up to a multiple of 2^stages
    int window_samples() const;
};

// The 6+6 encoder-decoder segmentation network. Encoder stages are
// conv(stride 1, same padding) + batchnorm + ReLU + maxpool2; decoder stages
// are tconv(stride 2) + batchnorm + ReLU with the mirrored kernel/filter
// schedules; optional channelwise skip concatenation from each encoder stage
// output onto the matching decoder stage input; dropout on the bottleneck
// (or every stage output when configured); 1x1 conv head with per-position
// softmax over {background, peak}, or a single-channel sigmoid head.
class Network {
public:
    Network() = default;
    explicit Network(const ModelConfig& cfg);

    const ModelConfig& config() const { return cfg_; }
    std::size_t parameter_count() const;
    std::vector<std::string> describe() const;

    struct Caches {
        struct Enc {
            nn::FeatureMap x_in, conv_out, bn_out;
            nn::BatchNorm1d::Cache bn;
            std::vector<std::int32_t> argmax;
        };
        struct Dec {
            nn::FeatureMap x_in, tconv_out, bn_out;
            nn::BatchNorm1d::Cache bn;
        };
        std::array<Enc, 6> enc;
        std::array<Dec, 6> dec;
        nn::FeatureMap head_in, probs;
    };

    // Training-mode forward. rng drives dropout; pass nullptr to disable
    // dropout (used by gradient checking). Returns the full probability
    // output (2 channels for the softmax head, 1 for sigmoid).
    nn::FeatureMap forward_train(const nn::FeatureMap& x, Caches& caches, Rng* rng,
                                 bool update_running = true);
    nn::FeatureMap forward_infer(const nn::FeatureMap& x) const;

    // Peak-probability map for one window (inference mode). The window must
    // be exactly config().window_samples() long.
    std::vector<double> predict(const std::vector<double>& window);

    // Backprop from the gradient on the peak-probability map; accumulates
    // parameter gradients and returns the gradient on the input.
    nn::FeatureMap backward(const nn::FeatureMap& grad_peak, const Caches& caches);

    void zero_grad();

    struct TensorBinding {
        std::string name;
        std::vector<double>* params;
        std::vector<double>* grads;
    };
    std::vector<TensorBinding> param_tensors();

    // Discrete forward decisions (pool argmax, ReLU sign pattern) for the
    // finite-difference harness's non-differentiable-point exclusion.
    static std::vector<std::int32_t> discrete_signature(const Caches& caches);

    void save(const std::filesystem::path& path) const;
    static Network load(const std::filesystem::path& path,
                        const ModelConfig* expected = nullptr);

    static nn::FeatureMap peak_channel(const nn::FeatureMap& probs);

private:
    ModelConfig cfg_;
    std::array<nn::Conv1d, 6> enc_conv_;
    std::array<nn::BatchNorm1d, 6> enc_bn_;
    std::array<nn::TConv1d, 6> dec_tconv_;
    std::array<nn::BatchNorm1d, 6> dec_bn_;
    nn::Conv1d head_;
    std::array<nn::Dropout, 6> dropout_;

    bool dropout_active(int stage) const;
};

// --- Training ---------------------------------------------------------------

struct TrainSample {
    SegmentView segment;
    TargetMap target;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 64;
    int epochs = 50;
    int folds = 10;
    std::uint64_t seed = 1;
};

// Mini-batch BCE training; deterministic given the seed. Returns the
// per-epoch mean loss history. Throws NumericError on NaN loss.
std::vector<double> train_network(Network& net, const std::vector<TrainSample>& data,
                                  const TrainConfig& cfg);

// Partition whole records into k folds: each record id lands in exactly one
// test fold.
struct FoldSplit {
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};
std::vector<FoldSplit> kfold_split(const std::vector<std::string>& record_ids, int k,
                                   std::uint64_t seed);

// --- Dataset assembly ---------------------------------------------------------

struct AugmentConfig {
    enum class Kind { None, Gaussian, Sinusoid, NoiseBank };
    Kind kind = Kind::None;
    int copies_per_segment = 1;  // augmented copies added per eligible segment
    bool arrhythmia_only = true;
    double gauss_sigma_lo = 0.01, gauss_sigma_hi = 0.1;
    double sine_amp_lo = 0.05, sine_amp_hi = 0.3;
    double sine_freq_lo = 0.05, sine_freq_hi = 0.5;
    double snr_lo_db = 0.0, snr_hi_db = 12.0;
    const NoiseBank* bank = nullptr;
};

// Window + label every record, then append augmented copies of the eligible
// segments (arrhythmia-bearing ones by default). Targets are shared with the
// source segment: labels track peak positions, not amplitudes.
std::vector<TrainSample> build_training_set(
    const std::vector<std::pair<EcgRecord, RPeakAnnotations>>& records, double window_seconds,
    double stride_seconds, const AugmentConfig& aug, std::uint64_t seed);

}  // namespace rpeak
