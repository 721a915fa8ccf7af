#pragma once

#include <cstdint>
#include <utility>

#include "rpeak/signal.hpp"

namespace rpeak {

// Template-sum ECG generator. Every annotated index is the exact center of
// the QRS template that produced it, so tolerance tests have exact truth.
struct SynthConfig {
    double duration_s = 60.0;
    double fs_hz = 400.0;
    double heart_rate_bpm = 72.0;
    double rr_jitter = 0.03;        // multiplicative uniform +-jitter on RR
    double qrs_width_ms = 20.0;     // Gaussian sigma of the R bump, in ms
    double qrs_amplitude = 1.0;
    double p_amplitude = 0.12;
    double t_amplitude = 0.25;
    double s_rate = 0.0;            // probability a beat is S-like (early, narrow)
    double v_rate = 0.0;            // probability a beat is V-like (wide, inverted)
    double noise_sigma = 0.0;       // additive white Gaussian noise
    std::uint64_t seed = 1;
};

std::pair<EcgRecord, RPeakAnnotations> generate_synth_ecg(const SynthConfig& cfg);

// Deterministic stand-ins for recorded noise: slow multi-sinusoid drift and
// bursty colored noise. Emitted as ordinary signal records for the noise bank.
EcgRecord generate_baseline_wander(double duration_s, double fs_hz, std::uint64_t seed);
EcgRecord generate_motion_artifact(double duration_s, double fs_hz, std::uint64_t seed);

}  // namespace rpeak
