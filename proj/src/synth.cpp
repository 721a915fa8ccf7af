#include "rpeak/synth.hpp"

#include <algorithm>
#include <cmath>

#include "rpeak/errors.hpp"
#include "rpeak/rng.hpp"

namespace rpeak {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Add a Gaussian bump centered at integer sample `center`.
void add_bump(std::vector<double>& x, std::int64_t center, double sigma_samples, double amp) {
    if (sigma_samples <= 0.0) return;
    const auto reach = static_cast<std::int64_t>(std::ceil(4.0 * sigma_samples));
    const auto n = static_cast<std::int64_t>(x.size());
    const std::int64_t lo = std::max<std::int64_t>(0, center - reach);
    const std::int64_t hi = std::min<std::int64_t>(n - 1, center + reach);
    for (std::int64_t i = lo; i <= hi; ++i) {
        const double d = static_cast<double>(i - center) / sigma_samples;
        x[static_cast<std::size_t>(i)] += amp * std::exp(-0.5 * d * d);
    }
}

}  // namespace

std::pair<EcgRecord, RPeakAnnotations> generate_synth_ecg(const SynthConfig& cfg) {
    if (cfg.fs_hz <= 0.0 || cfg.duration_s <= 0.0)
        throw ConfigError("generate_synth_ecg: duration and fs must be positive");
    if (cfg.s_rate < 0.0 || cfg.s_rate > 1.0 || cfg.v_rate < 0.0 || cfg.v_rate > 1.0 ||
        cfg.s_rate + cfg.v_rate > 1.0)
        throw ConfigError("generate_synth_ecg: beat-type rates must lie in [0,1]");

    const double fs = cfg.fs_hz;
    const auto n = static_cast<std::int64_t>(std::llround(cfg.duration_s * fs));
    EcgRecord rec;
    rec.record_id = "synth";
    rec.sampling_rate_hz = fs;
    rec.samples.assign(static_cast<std::size_t>(n), 0.0);
    RPeakAnnotations ann;

    Rng rng(cfg.seed);
    const double rr_base = 60.0 / cfg.heart_rate_bpm;
    const double sigma_qrs = cfg.qrs_width_ms * 1e-3 * fs;
    const double sigma_p = 0.025 * fs;
    const double sigma_t = 0.050 * fs;
    const double margin_s = 0.35;  // leave room for the trailing T wave

    double t = 0.5 * rr_base;
    bool first = true;
    while (t < cfg.duration_s - margin_s) {
        // type first, then timing: an S-like beat arrives early
        const double u = rng.uniform01();
        BeatType bt = BeatType::Normal;
        if (u < cfg.v_rate)
            bt = BeatType::Ventricular;
        else if (u < cfg.v_rate + cfg.s_rate)
            bt = BeatType::Supraventricular;

        double rr = rr_base;
        if (cfg.rr_jitter > 0.0) rr *= 1.0 + rng.uniform(-cfg.rr_jitter, cfg.rr_jitter);
        if (bt == BeatType::Supraventricular && !first) rr *= rng.uniform(0.6, 0.8);

        if (!first) t += rr;
        if (t >= cfg.duration_s - margin_s) break;
        const auto center = static_cast<std::int64_t>(std::llround(t * fs));
        if (center >= n) break;

        if (bt == BeatType::Ventricular) {
            add_bump(rec.samples, center, 2.0 * sigma_qrs, -1.3 * cfg.qrs_amplitude);
            add_bump(rec.samples, center + static_cast<std::int64_t>(std::llround(0.25 * fs)),
                     sigma_t, -cfg.t_amplitude);
        } else {
            add_bump(rec.samples, center, sigma_qrs, cfg.qrs_amplitude);
            add_bump(rec.samples, center - static_cast<std::int64_t>(std::llround(0.16 * fs)),
                     sigma_p, cfg.p_amplitude);
            add_bump(rec.samples, center + static_cast<std::int64_t>(std::llround(0.25 * fs)),
                     sigma_t, cfg.t_amplitude);
        }
        ann.peak_indices.push_back(center);
        ann.beat_types.push_back(bt);
        first = false;
    }

    if (cfg.noise_sigma > 0.0) {
        for (auto& v : rec.samples) v += cfg.noise_sigma * rng.gaussian();
    }
    return {std::move(rec), std::move(ann)};
}

EcgRecord generate_baseline_wander(double duration_s, double fs_hz, std::uint64_t seed) {
    Rng rng(seed);
    const auto n = static_cast<std::int64_t>(std::llround(duration_s * fs_hz));
    EcgRecord rec;
    rec.record_id = "baseline_wander";
    rec.sampling_rate_hz = fs_hz;
    rec.samples.assign(static_cast<std::size_t>(n), 0.0);

    struct Tone { double f, a, phi; };
    std::vector<Tone> tones;
    for (int k = 0; k < 3; ++k)
        tones.push_back({rng.uniform(0.1, 0.45), rng.uniform(0.4, 1.0), rng.uniform(0.0, kTwoPi)});
    for (std::int64_t i = 0; i < n; ++i) {
        const double ts = static_cast<double>(i) / fs_hz;
        double v = 0.0;
        for (const auto& tone : tones) v += tone.a * std::sin(kTwoPi * tone.f * ts + tone.phi);
        rec.samples[static_cast<std::size_t>(i)] = v;
    }
    return rec;
}

EcgRecord generate_motion_artifact(double duration_s, double fs_hz, std::uint64_t seed) {
    Rng rng(seed);
    const auto n = static_cast<std::int64_t>(std::llround(duration_s * fs_hz));
    EcgRecord rec;
    rec.record_id = "motion_artifact";
    rec.sampling_rate_hz = fs_hz;
    rec.samples.assign(static_cast<std::size_t>(n), 0.0);

    // AR(1) colored noise gated by random 1-3 s bursts every 2-6 s
    double state = 0.0;
    std::int64_t burst_end = 0;
    std::int64_t next_burst = static_cast<std::int64_t>(rng.uniform(0.5, 2.0) * fs_hz);
    for (std::int64_t i = 0; i < n; ++i) {
        if (i >= next_burst && i >= burst_end) {
            burst_end = i + static_cast<std::int64_t>(rng.uniform(1.0, 3.0) * fs_hz);
            next_burst = burst_end + static_cast<std::int64_t>(rng.uniform(2.0, 6.0) * fs_hz);
        }
        state = 0.97 * state + rng.gaussian();
        const double gate = (i < burst_end) ? 1.0 : 0.12;
        rec.samples[static_cast<std::size_t>(i)] = 0.25 * gate * state;
    }
    return rec;
}

}  // namespace rpeak
