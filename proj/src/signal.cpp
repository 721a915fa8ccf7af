#include "rpeak/signal.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rpeak/errors.hpp"

namespace rpeak {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool parse_double_strict(const std::string& tok, double& out) {
    const std::string t = trim(tok);
    if (t.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stod(t, &pos);
    } catch (...) {
        return false;
    }
    return pos == t.size();
}

}  // namespace

char beat_type_char(BeatType t) {
    switch (t) {
        case BeatType::Normal: return 'N';
        case BeatType::Supraventricular: return 'S';
        case BeatType::Ventricular: return 'V';
        default: return 'U';
    }
}

BeatType beat_type_from_char(char c) {
    switch (c) {
        case 'N': return BeatType::Normal;
        case 'S': return BeatType::Supraventricular;
        case 'V': return BeatType::Ventricular;
        default: return BeatType::Unknown;
    }
}

EcgRecord read_signal_csv(const std::filesystem::path& path, double fallback_fs) {
    std::ifstream in(path);
    if (!in.is_open()) throw IoError("cannot open signal file: " + path.string());

    EcgRecord rec;
    rec.record_id = path.stem().string();
    rec.sampling_rate_hz = fallback_fs;

    std::string line;
    int line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            // "# fs=<hz>" on line 1 carries the sampling rate
            const auto eq = t.find("fs=");
            if (line_no == 1 && eq != std::string::npos) {
                double fs = 0.0;
                if (!parse_double_strict(t.substr(eq + 3), fs) || fs <= 0.0)
                    throw FormatError(path.string() + ": line 1: bad fs comment");
                rec.sampling_rate_hz = fs;
            }
            continue;
        }
        double v = 0.0;
        if (!parse_double_strict(t, v)) {
            if (first_content_line) {
                // a single non-numeric header line is tolerated
                first_content_line = false;
                continue;
            }
            throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                              ": unparseable amplitude '" + t + "'");
        }
        if (!std::isfinite(v))
            throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                              ": non-finite amplitude");
        first_content_line = false;
        rec.samples.push_back(v);
    }

    if (rec.samples.empty()) throw FormatError(path.string() + ": no samples");
    if (rec.sampling_rate_hz <= 0.0)
        throw ConfigError(path.string() + ": sampling rate not given (no '# fs=' header and no --fs)");
    return rec;
}

void write_signal_csv(const EcgRecord& rec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out.is_open()) throw IoError("cannot write signal file: " + path.string());
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# fs=%.10g\n", rec.sampling_rate_hz);
    out << buf;
    for (double v : rec.samples) {
        std::snprintf(buf, sizeof(buf), "%.10g\n", v);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path.string());
}

RPeakAnnotations read_annotations_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw IoError("cannot open annotation file: " + path.string());

    RPeakAnnotations ann;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::string idx_tok = t;
        std::string type_tok;
        const auto comma = t.find(',');
        if (comma != std::string::npos) {
            idx_tok = t.substr(0, comma);
            type_tok = trim(t.substr(comma + 1));
        }
        double idx_val = 0.0;
        if (!parse_double_strict(idx_tok, idx_val) || idx_val < 0 ||
            idx_val != std::floor(idx_val)) {
            if (line_no == 1 && comma != std::string::npos) continue;  // header row
            throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                              ": bad sample index '" + idx_tok + "'");
        }
        const auto idx = static_cast<std::int64_t>(idx_val);
        if (!ann.peak_indices.empty() && idx <= ann.peak_indices.back()) {
            throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                              ": index " + std::to_string(idx) +
                              " not strictly increasing");
        }
        BeatType bt = BeatType::Unknown;
        if (!type_tok.empty()) bt = beat_type_from_char(type_tok[0]);
        ann.peak_indices.push_back(idx);
        ann.beat_types.push_back(bt);
    }
    return ann;
}

void write_annotations_csv(const RPeakAnnotations& ann, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out.is_open()) throw IoError("cannot write annotation file: " + path.string());
    for (std::size_t i = 0; i < ann.peak_indices.size(); ++i) {
        out << ann.peak_indices[i] << ',' << beat_type_char(ann.beat_types[i]) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

// --- WFDB format 212 ---------------------------------------------------

namespace {

struct WfdbSignalSpec {
    std::string file_name;
    int format = 0;
    double gain = 200.0;
    double baseline = 0.0;
    bool baseline_given = false;
    double adc_zero = 0.0;
    std::string description;
};

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace

std::vector<EcgRecord> read_wfdb_212(const std::filesystem::path& header_path) {
    std::ifstream hea(header_path);
    if (!hea.is_open()) throw IoError("cannot open header: " + header_path.string());

    std::string line;
    std::string record_name;
    int n_sig = 0;
    double fs = 250.0;
    std::int64_t n_samples = 0;
    std::vector<WfdbSignalSpec> specs;

    bool have_record_line = false;
    while (std::getline(hea, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto toks = split_ws(t);
        if (!have_record_line) {
            if (toks.size() < 2) throw FormatError(header_path.string() + ": bad record line");
            record_name = toks[0].substr(0, toks[0].find('/'));
            n_sig = std::stoi(toks[1]);
            if (toks.size() >= 3) fs = std::stod(toks[2].substr(0, toks[2].find('/')));
            if (toks.size() >= 4) n_samples = std::stoll(toks[3]);
            have_record_line = true;
            continue;
        }
        if (static_cast<int>(specs.size()) == n_sig) break;  // info lines follow
        if (toks.size() < 2) throw FormatError(header_path.string() + ": bad signal line");
        WfdbSignalSpec s;
        s.file_name = toks[0];
        s.format = std::stoi(toks[1].substr(0, toks[1].find_first_of("x:+")));
        if (toks.size() >= 3) {
            // gain field: "200", "200(1024)/mV", "200/mV"
            std::string g = toks[2];
            const auto slash = g.find('/');
            if (slash != std::string::npos) g = g.substr(0, slash);
            const auto paren = g.find('(');
            if (paren != std::string::npos) {
                const auto close = g.find(')', paren);
                s.baseline = std::stod(g.substr(paren + 1, close - paren - 1));
                s.baseline_given = true;
                g = g.substr(0, paren);
            }
            if (!g.empty()) s.gain = std::stod(g);
            if (s.gain == 0.0) s.gain = 200.0;
        }
        if (toks.size() >= 5) s.adc_zero = std::stod(toks[4]);
        if (toks.size() >= 9) {
            s.description = toks[8];
            for (std::size_t i = 9; i < toks.size(); ++i) s.description += "_" + toks[i];
        }
        specs.push_back(std::move(s));
    }

    if (!have_record_line) throw FormatError(header_path.string() + ": empty header");
    if (n_sig != 2)
        throw FormatError(header_path.string() + ": expected 2 signals, got " +
                          std::to_string(n_sig));
    for (const auto& s : specs) {
        if (s.format != 212)
            throw FormatError(header_path.string() + ": unsupported format " +
                              std::to_string(s.format) + " (only 212)");
    }
    if (specs[0].file_name != specs[1].file_name)
        throw FormatError(header_path.string() + ": channels must share one .dat file");

    const auto dat_path = header_path.parent_path() / specs[0].file_name;
    std::ifstream dat(dat_path, std::ios::binary);
    if (!dat.is_open()) throw IoError("cannot open data file: " + dat_path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(dat)),
                                     std::istreambuf_iterator<char>());

    if (n_samples == 0) n_samples = static_cast<std::int64_t>(bytes.size()) / 3;
    const std::int64_t need = n_samples * 3;  // one 3-byte group per 2-channel frame
    if (static_cast<std::int64_t>(bytes.size()) < need) {
        throw FormatError(dat_path.string() + ": truncated at byte offset " +
                          std::to_string(bytes.size()) + ", need " + std::to_string(need));
    }

    std::vector<EcgRecord> out(2);
    for (int ch = 0; ch < 2; ++ch) {
        out[ch].record_id = record_name + (specs[ch].description.empty()
                                               ? ("_ch" + std::to_string(ch))
                                               : ("_" + specs[ch].description));
        out[ch].sampling_rate_hz = fs;
        out[ch].samples.reserve(static_cast<std::size_t>(n_samples));
    }

    for (std::int64_t i = 0; i < n_samples; ++i) {
        const unsigned char b0 = bytes[static_cast<std::size_t>(i) * 3];
        const unsigned char b1 = bytes[static_cast<std::size_t>(i) * 3 + 1];
        const unsigned char b2 = bytes[static_cast<std::size_t>(i) * 3 + 2];
        int s0 = ((b1 & 0x0F) << 8) | b0;
        int s1 = ((b1 & 0xF0) << 4) | b2;
        if (s0 >= 2048) s0 -= 4096;  // 12-bit two's complement
        if (s1 >= 2048) s1 -= 4096;
        const double base0 = specs[0].baseline_given ? specs[0].baseline : specs[0].adc_zero;
        const double base1 = specs[1].baseline_given ? specs[1].baseline : specs[1].adc_zero;
        out[0].samples.push_back((s0 - base0) / specs[0].gain);
        out[1].samples.push_back((s1 - base1) / specs[1].gain);
    }
    return out;
}

// --- Sample-domain transforms -------------------------------------------

EcgRecord resample(const EcgRecord& rec, double target_hz) {
    if (target_hz <= 0.0) throw ConfigError("resample: target rate must be positive");
    if (rec.sampling_rate_hz <= 0.0) throw ConfigError("resample: source rate unknown");
    const auto n = static_cast<std::int64_t>(rec.samples.size());
    const double ratio = target_hz / rec.sampling_rate_hz;
    const auto m = static_cast<std::int64_t>(std::llround(static_cast<double>(n) * ratio));

    EcgRecord out;
    out.record_id = rec.record_id;
    out.sampling_rate_hz = target_hz;
    out.samples.resize(static_cast<std::size_t>(m));
    const double max_pos = static_cast<double>(n - 1);
    for (std::int64_t j = 0; j < m; ++j) {
        double pos = static_cast<double>(j) / ratio;
        if (pos < 0.0) pos = 0.0;
        if (pos > max_pos) pos = max_pos;  // edge clamp
        const auto i0 = static_cast<std::int64_t>(pos);
        const std::int64_t i1 = std::min(i0 + 1, n - 1);
        const double frac = pos - static_cast<double>(i0);
        out.samples[static_cast<std::size_t>(j)] =
            rec.samples[static_cast<std::size_t>(i0)] * (1.0 - frac) +
            rec.samples[static_cast<std::size_t>(i1)] * frac;
    }
    return out;
}

std::int64_t rescale_index(std::int64_t index, double source_hz, double target_hz) {
    // round half up
    return static_cast<std::int64_t>(
        std::floor(static_cast<double>(index) * target_hz / source_hz + 0.5));
}

RPeakAnnotations resample_annotations(const RPeakAnnotations& ann, double source_hz,
                                      double target_hz) {
    RPeakAnnotations out;
    out.peak_indices.reserve(ann.peak_indices.size());
    out.beat_types = ann.beat_types;
    for (auto idx : ann.peak_indices)
        out.peak_indices.push_back(rescale_index(idx, source_hz, target_hz));
    return out;
}

std::vector<double> normalize_segment(const std::vector<double>& samples) {
    if (samples.empty()) throw DataError("normalize_segment: empty input");
    double lo = samples[0];
    double hi = samples[0];
    for (double v : samples) {
        if (!std::isfinite(v)) throw DataError("normalize_segment: non-finite sample");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<double> out(samples.size());
    if (hi > lo) {
        const double scale = 2.0 / (hi - lo);
        for (std::size_t i = 0; i < samples.size(); ++i) out[i] = (samples[i] - lo) * scale - 1.0;
    }
    // all-equal input stays all-zero
    return out;
}

std::vector<SegmentView> window_record(const EcgRecord& rec, double window_seconds,
                                       double stride_seconds) {
    if (window_seconds < 5.0 || window_seconds > 30.0)
        throw ConfigError("window_record: window must be within [5, 30] seconds");
    if (stride_seconds <= 0.0 || stride_seconds > window_seconds)
        throw ConfigError("window_record: stride must be in (0, window]");
    const double fs = rec.sampling_rate_hz;
    const auto win = static_cast<std::int64_t>(std::llround(window_seconds * fs));
    const auto stride = static_cast<std::int64_t>(std::llround(stride_seconds * fs));
    const std::int64_t padded = ((win + 63) / 64) * 64;  // six halvings must round-trip
    const auto n = static_cast<std::int64_t>(rec.samples.size());

    std::vector<SegmentView> out;
    for (std::int64_t off = 0; off < n; off += stride) {
        const std::int64_t valid = std::min<std::int64_t>(win, n - off);
        if (valid <= 0) break;
        SegmentView seg;
        seg.record_id = rec.record_id;
        seg.start_index = off;
        seg.sampling_rate_hz = fs;
        seg.valid_length = static_cast<int>(valid);
        std::vector<double> raw(rec.samples.begin() + off, rec.samples.begin() + off + valid);
        seg.samples = normalize_segment(raw);
        seg.samples.resize(static_cast<std::size_t>(padded), 0.0);
        out.push_back(std::move(seg));
        if (off + valid >= n) break;
    }
    return out;
}

}  // namespace rpeak
