#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rpeak/signal.hpp"

namespace rpeak {

// Per-sample binary segmentation target for one window. Each in-window peak
// contributes a 5-sample pulse centered on it; padding positions stay 0.
struct TargetMap {
    std::vector<std::uint8_t> labels;
    int valid_length = 0;
};

TargetMap make_target_map(const RPeakAnnotations& peaks, const SegmentView& segment);

// Recorded-noise excerpts used by augment_noise_mix, at the working rate.
struct NoiseBank {
    std::vector<EcgRecord> records;
};

// Loads every *.csv in a directory as a noise record.
NoiseBank load_noise_bank(const std::filesystem::path& dir, double fallback_fs);

// Additive augmentations. All are identity in their zero-strength limit,
// deterministic per seed, and re-clip the result into [-1, +1].
SegmentView augment_gaussian(const SegmentView& segment, double sigma_lo, double sigma_hi,
                             std::uint64_t rng_seed);
SegmentView augment_sinusoid(const SegmentView& segment, double amp_lo, double amp_hi,
                             double freq_lo_hz, double freq_hi_hz, std::uint64_t rng_seed);
// snr_db = +infinity is the no-noise sentinel.
SegmentView augment_noise_mix(const SegmentView& segment, const NoiseBank& bank, double snr_db,
                              std::uint64_t rng_seed);

// Indices of segments containing at least one S or V beat.
std::vector<std::size_t> select_augmentable(const std::vector<SegmentView>& segments,
                                            const RPeakAnnotations& annotations);

}  // namespace rpeak
