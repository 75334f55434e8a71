#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "denoise/errors.hpp"
#include "denoise/rng.hpp"
#include "denoise/wav_io.hpp"
#include "denoise/waveform.hpp"

namespace denoise {

enum class Category {
    normal,
    horizontal_misalignment_0_5mm,
    horizontal_misalignment_1_0mm,
    horizontal_misalignment_1_5mm,
    horizontal_misalignment_2_0mm,
    other,
};

inline std::string to_string(Category c) {
    switch (c) {
        case Category::normal: return "normal";
        case Category::horizontal_misalignment_0_5mm: return "horizontal-misalignment/0.5mm";
        case Category::horizontal_misalignment_1_0mm: return "horizontal-misalignment/1.0mm";
        case Category::horizontal_misalignment_1_5mm: return "horizontal-misalignment/1.5mm";
        case Category::horizontal_misalignment_2_0mm: return "horizontal-misalignment/2.0mm";
        case Category::other: return "other";
    }
    return "other";
}

/// Category from the directory layout of the public archive
/// (normal/, horizontal-misalignment/0.5mm/, ...).
inline Category category_from_path(const std::string& path) {
    if (path.find("normal") != std::string::npos) return Category::normal;
    if (path.find("horizontal-misalignment") != std::string::npos) {
        if (path.find("0.5mm") != std::string::npos)
            return Category::horizontal_misalignment_0_5mm;
        if (path.find("1.0mm") != std::string::npos)
            return Category::horizontal_misalignment_1_0mm;
        if (path.find("1.5mm") != std::string::npos)
            return Category::horizontal_misalignment_1_5mm;
        if (path.find("2.0mm") != std::string::npos)
            return Category::horizontal_misalignment_2_0mm;
    }
    return Category::other;
}

constexpr std::size_t kMafauldaChannels = 8;
constexpr std::size_t kMafauldaSamples = 250000;
constexpr std::uint32_t kMafauldaRateHz = 50000;

/// The microphone is the last of the eight acquisition channels
/// (tachometer, three underhang and three overhang accelerometer axes,
/// then the microphone).
constexpr std::size_t kDefaultMicrophoneColumn = 7;

/// One multichannel recording: row-major samples x channels.
struct MafauldaRecord {
    std::vector<double> channels;  // num_samples x kMafauldaChannels
    std::size_t num_samples = 0;
    std::uint32_t sample_rate_hz = kMafauldaRateHz;
    Category category = Category::other;
    std::string source_path;
    bool standard_length = false;  // true iff num_samples == 250000

    double at(std::size_t row, std::size_t col) const {
        return channels[row * kMafauldaChannels + col];
    }
};

/// Parse one CSV recording: no header, exactly 8 numeric fields per row,
/// '.' decimal separator, LF or CRLF. Reports the 1-based line number of
/// the first malformed row.
inline MafauldaRecord parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("parse_csv: cannot open " + path);

    MafauldaRecord rec;
    rec.source_path = path;
    rec.category = category_from_path(path);

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::size_t fields = 0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p <= end) {
            const char* comma = p;
            while (comma < end && *comma != ',') ++comma;
            double value = 0.0;
            const auto [rest, ec] = std::from_chars(p, comma, value);
            if (ec != std::errc() || rest != comma || !std::isfinite(value))
                throw MalformedRow("parse_csv: non-numeric field at " + path + ":" +
                                       std::to_string(line_no),
                                   line_no);
            ++fields;
            if (fields > kMafauldaChannels)
                throw MalformedRow("parse_csv: too many fields at " + path + ":" +
                                       std::to_string(line_no),
                                   line_no);
            rec.channels.push_back(value);
            if (comma == end) break;
            p = comma + 1;
        }
        if (fields != kMafauldaChannels)
            throw MalformedRow("parse_csv: expected 8 fields, got " + std::to_string(fields) +
                                   " at " + path + ":" + std::to_string(line_no),
                               line_no);
        ++rec.num_samples;
    }
    if (rec.num_samples == 0) throw EmptyFile("parse_csv: no rows in " + path);
    rec.standard_length = rec.num_samples == kMafauldaSamples;
    return rec;
}

/// Project one column out as a waveform at the recording rate.
inline Waveform extract_microphone(const MafauldaRecord& rec,
                                   std::size_t column_index = kDefaultMicrophoneColumn) {
    if (column_index >= kMafauldaChannels)
        throw ColumnOutOfRange("extract_microphone: column " + std::to_string(column_index) +
                               " out of range [0,8)");
    Waveform w;
    w.sample_rate_hz = rec.sample_rate_hz;
    w.samples.resize(rec.num_samples);
    for (std::size_t i = 0; i < rec.num_samples; ++i) w.samples[i] = rec.at(i, column_index);
    return w;
}

/// CSV to float32 mono WAV at the recording rate, bit-for-bit equal to the
/// extracted column after float32 rounding.
inline void csv_to_wav(const std::string& csv_path, const std::string& wav_path,
                       std::size_t column_index = kDefaultMicrophoneColumn) {
    const MafauldaRecord rec = parse_csv(csv_path);
    const Waveform column = extract_microphone(rec, column_index);
    write_wav_f32(wav_path, column);
}

/// Deterministic train/val/test partition:
///   |test| = ceil(0.30 N), |val| = round(0.20 (N - |test|)), train the rest.
struct DatasetSplit {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        return {{"seed", seed}, {"train", train}, {"val", val}, {"test", test}};
    }

    static DatasetSplit from_json(const nlohmann::json& j) {
        DatasetSplit s;
        s.seed = j.at("seed").get<std::uint64_t>();
        s.train = j.at("train").get<std::vector<std::string>>();
        s.val = j.at("val").get<std::vector<std::string>>();
        s.test = j.at("test").get<std::vector<std::string>>();
        return s;
    }
};

inline DatasetSplit split_dataset(std::vector<std::string> ids, std::uint64_t seed) {
    if (ids.empty()) throw EmptyCorpus("split_dataset: no input ids");
    seeded_shuffle(ids, seed);

    // Integer-exact split rule; no floating point involved.
    const std::size_t n = ids.size();
    const std::size_t n_test = (3 * n + 9) / 10;          // ceil(0.30 n)
    const std::size_t remaining = n - n_test;
    const std::size_t n_val = (2 * remaining + 5) / 10;   // round(0.20 remaining)

    DatasetSplit split;
    split.seed = seed;
    split.test.assign(ids.begin(), ids.begin() + n_test);
    split.val.assign(ids.begin() + n_test, ids.begin() + n_test + n_val);
    split.train.assign(ids.begin() + n_test + n_val, ids.end());
    return split;
}

}  // namespace denoise
