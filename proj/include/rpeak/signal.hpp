#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rpeak {

struct EcgRecord {
    std::string record_id;
    double sampling_rate_hz = 0.0;
    std::vector<double> samples;
};

enum class BeatType : std::uint8_t { Normal, Supraventricular, Ventricular, Unknown };

char beat_type_char(BeatType t);
BeatType beat_type_from_char(char c);

struct RPeakAnnotations {
    std::vector<std::int64_t> peak_indices;  // strictly increasing
    std::vector<BeatType> beat_types;        // parallel to peak_indices
};

// One analysis window cut from a record. samples holds valid_length real
// (normalized) samples followed by zero padding up to a multiple of 64.
struct SegmentView {
    std::string record_id;
    std::int64_t start_index = 0;
    double sampling_rate_hz = 0.0;
    std::vector<double> samples;
    int valid_length = 0;

    int window_samples() const { return static_cast<int>(samples.size()); }
};

// --- CSV interchange ---------------------------------------------------

// One amplitude per line; optional "# fs=<hz>" comment on line 1, optional
// single non-numeric header line. fallback_fs is used when the file carries
// no rate; 0 means "none supplied".
EcgRecord read_signal_csv(const std::filesystem::path& path, double fallback_fs = 0.0);
void write_signal_csv(const EcgRecord& rec, const std::filesystem::path& path);

// Rows of "sample_index,beat_type", beat_type in {N,S,V} or absent (UNKNOWN).
RPeakAnnotations read_annotations_csv(const std::filesystem::path& path);
void write_annotations_csv(const RPeakAnnotations& ann, const std::filesystem::path& path);

// --- WFDB format 212 ---------------------------------------------------

// Reads a WFDB .hea header plus its format-212 .dat payload (the two-channel
// 12-bit packing used by the MIT arrhythmia records). Returns one record per
// channel with amplitudes (raw - baseline) / gain.
std::vector<EcgRecord> read_wfdb_212(const std::filesystem::path& header_path);

// --- Sample-domain transforms -------------------------------------------

// Linear interpolation at uniformly spaced source positions, edges clamped.
// Output length = round(len * target_hz / source_hz).
EcgRecord resample(const EcgRecord& rec, double target_hz);

// round-half-up rescaling of an annotation index between rates.
std::int64_t rescale_index(std::int64_t index, double source_hz, double target_hz);
RPeakAnnotations resample_annotations(const RPeakAnnotations& ann, double source_hz, double target_hz);

// Affine map onto [-1, +1]; an all-equal input maps to all zeros.
std::vector<double> normalize_segment(const std::vector<double>& samples);

// Cut a record into independently normalized windows. Window length is
// round(window_seconds * fs) zero-padded up to the next multiple of 64;
// offsets advance by round(stride_seconds * fs). The tail window keeps its
// true valid length.
std::vector<SegmentView> window_record(const EcgRecord& rec, double window_seconds,
                                       double stride_seconds);

}  // namespace rpeak
