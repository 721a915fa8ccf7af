#include "rpeak/labels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpeak/errors.hpp"
#include "rpeak/rng.hpp"

namespace rpeak {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void clip_unit(std::vector<double>& v) {
    for (double& x : v) x = std::clamp(x, -1.0, 1.0);
}

}  // namespace

TargetMap make_target_map(const RPeakAnnotations& peaks, const SegmentView& segment) {
    TargetMap tm;
    tm.valid_length = segment.valid_length;
    tm.labels.assign(segment.samples.size(), 0);
    for (std::int64_t p : peaks.peak_indices) {
        const std::int64_t local = p - segment.start_index;
        if (local < 0 || local >= segment.valid_length) continue;
        const std::int64_t lo = std::max<std::int64_t>(0, local - 2);
        const std::int64_t hi = std::min<std::int64_t>(segment.valid_length - 1, local + 2);
        for (std::int64_t i = lo; i <= hi; ++i) tm.labels[static_cast<std::size_t>(i)] = 1;
    }
    return tm;
}

NoiseBank load_noise_bank(const std::filesystem::path& dir, double fallback_fs) {
    NoiseBank bank;
    if (!std::filesystem::is_directory(dir))
        throw IoError("noise bank directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) bank.records.push_back(read_signal_csv(f, fallback_fs));
    if (bank.records.empty()) throw DataError("noise bank is empty: " + dir.string());
    return bank;
}

SegmentView augment_gaussian(const SegmentView& segment, double sigma_lo, double sigma_hi,
                             std::uint64_t rng_seed) {
    if (sigma_lo < 0.0 || sigma_hi < sigma_lo || sigma_hi > 0.5)
        throw ConfigError("augment_gaussian: sigma range must lie within [0, 0.5]");
    Rng rng(rng_seed);
    const double sigma = rng.uniform(sigma_lo, sigma_hi);
    SegmentView out = segment;
    for (int i = 0; i < out.valid_length; ++i)
        out.samples[static_cast<std::size_t>(i)] += sigma * rng.gaussian();
    clip_unit(out.samples);
    return out;
}

SegmentView augment_sinusoid(const SegmentView& segment, double amp_lo, double amp_hi,
                             double freq_lo_hz, double freq_hi_hz, std::uint64_t rng_seed) {
    if (freq_lo_hz <= 0.0 || freq_hi_hz < freq_lo_hz || freq_hi_hz > 1.0)
        throw ConfigError("augment_sinusoid: frequency range must lie within (0, 1] Hz");
    if (amp_lo < 0.0 || amp_hi < amp_lo || amp_hi > 0.5)
        throw ConfigError("augment_sinusoid: amplitude range must lie within [0, 0.5]");
    Rng rng(rng_seed);
    const double amp = rng.uniform(amp_lo, amp_hi);
    const double freq = rng.uniform(freq_lo_hz, freq_hi_hz);
    const double phase = rng.uniform(0.0, kTwoPi);
    SegmentView out = segment;
    const double fs = segment.sampling_rate_hz;
    for (int i = 0; i < out.valid_length; ++i) {
        const double ts = static_cast<double>(i) / fs;
        out.samples[static_cast<std::size_t>(i)] += amp * std::sin(kTwoPi * freq * ts + phase);
    }
    clip_unit(out.samples);
    return out;
}

SegmentView augment_noise_mix(const SegmentView& segment, const NoiseBank& bank, double snr_db,
                              std::uint64_t rng_seed) {
    if (snr_db == std::numeric_limits<double>::infinity()) return segment;
    if (bank.records.empty()) throw DataError("augment_noise_mix: empty noise bank");
    Rng rng(rng_seed);
    const auto& noise = bank.records[rng.uniform_index(bank.records.size())];
    const auto need = static_cast<std::int64_t>(segment.valid_length);
    const auto avail = static_cast<std::int64_t>(noise.samples.size());
    if (avail < need)
        throw DataError("augment_noise_mix: noise record '" + noise.record_id +
                        "' shorter than segment");
    const auto off = static_cast<std::int64_t>(rng.uniform_index(
        static_cast<std::uint64_t>(avail - need + 1)));

    double p_sig = 0.0;
    double p_noise = 0.0;
    for (std::int64_t i = 0; i < need; ++i) {
        const double s = segment.samples[static_cast<std::size_t>(i)];
        const double w = noise.samples[static_cast<std::size_t>(off + i)];
        p_sig += s * s;
        p_noise += w * w;
    }
    p_sig /= static_cast<double>(need);
    p_noise /= static_cast<double>(need);
    if (p_noise <= 0.0) throw DataError("augment_noise_mix: silent noise excerpt");

    // scale so 10*log10(P_signal / P_scaled_noise) = snr_db
    const double scale = std::sqrt(p_sig / (p_noise * std::pow(10.0, snr_db / 10.0)));
    SegmentView out = segment;
    for (std::int64_t i = 0; i < need; ++i)
        out.samples[static_cast<std::size_t>(i)] +=
            scale * noise.samples[static_cast<std::size_t>(off + i)];
    clip_unit(out.samples);
    return out;
}

std::vector<std::size_t> select_augmentable(const std::vector<SegmentView>& segments,
                                            const RPeakAnnotations& annotations) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto& seg = segments[k];
        bool has_arrhythmia = false;
        for (std::size_t j = 0; j < annotations.peak_indices.size(); ++j) {
            const std::int64_t local = annotations.peak_indices[j] - seg.start_index;
            if (local < 0 || local >= seg.valid_length) continue;
            const BeatType bt = annotations.beat_types[j];
            if (bt == BeatType::Supraventricular || bt == BeatType::Ventricular) {
                has_arrhythmia = true;
                break;
            }
        }
        if (has_arrhythmia) out.push_back(k);
    }
    return out;
}

}  // namespace rpeak
