#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "denoise/errors.hpp"
#include "denoise/waveform.hpp"

namespace denoise {

/// Decoded WAV contents. Samples are interleaved, one float per channel per
/// frame, in the file's declared order.
struct WavData {
    std::vector<float> samples;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate_hz = 0;

    std::size_t frames() const { return channels ? samples.size() / channels : 0; }

    /// Average all channels down to one.
    Waveform to_mono() const {
        Waveform w;
        w.sample_rate_hz = sample_rate_hz;
        const std::size_t n = frames();
        w.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::uint16_t c = 0; c < channels; ++c)
                acc += samples[i * channels + c];
            w.samples[i] = acc / channels;
        }
        return w;
    }
};

namespace detail {

inline std::uint16_t read_u16le(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline void put_u16le(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}
inline void put_u32le(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace detail

constexpr std::uint16_t kWavFormatPcm = 1;
constexpr std::uint16_t kWavFormatIeeeFloat = 3;

/// Read a RIFF/WAVE file. Supports PCM 16-bit signed little-endian and
/// IEEE float32; any channel count; honors the declared sample rate.
inline WavData read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("read_wav: cannot open " + path);

    unsigned char hdr[12];
    if (!in.read(reinterpret_cast<char*>(hdr), 12) || std::memcmp(hdr, "RIFF", 4) != 0 ||
        std::memcmp(hdr + 8, "WAVE", 4) != 0)
        throw IoFailure("read_wav: not a RIFF/WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    std::vector<char> data;
    bool have_data = false;

    unsigned char chunk[8];
    while (in.read(reinterpret_cast<char*>(chunk), 8)) {
        const std::uint32_t size = detail::read_u32le(chunk + 4);
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            std::vector<unsigned char> fmt(size);
            if (!in.read(reinterpret_cast<char*>(fmt.data()), size) || size < 16)
                throw IoFailure("read_wav: truncated fmt chunk: " + path);
            format = detail::read_u16le(fmt.data());
            channels = detail::read_u16le(fmt.data() + 2);
            rate = detail::read_u32le(fmt.data() + 4);
            bits = detail::read_u16le(fmt.data() + 14);
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data.resize(size);
            if (!in.read(data.data(), size))
                throw IoFailure("read_wav: truncated data chunk: " + path);
            have_data = true;
        } else {
            in.seekg(size + (size & 1), std::ios::cur);
            continue;
        }
        if (size & 1) in.seekg(1, std::ios::cur);  // chunks are 2-byte aligned
    }
    if (!have_fmt || !have_data) throw IoFailure("read_wav: missing fmt or data chunk: " + path);
    if (channels == 0 || rate == 0) throw IoFailure("read_wav: invalid fmt chunk: " + path);

    WavData out;
    out.channels = channels;
    out.sample_rate_hz = rate;

    if (format == kWavFormatPcm && bits == 16) {
        const std::size_t n = data.size() / 2;
        out.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto* p = reinterpret_cast<const unsigned char*>(data.data() + 2 * i);
            const auto v = static_cast<std::int16_t>(detail::read_u16le(p));
            out.samples[i] = static_cast<float>(v) / 32768.0f;
        }
    } else if (format == kWavFormatIeeeFloat && bits == 32) {
        const std::size_t n = data.size() / 4;
        out.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto* p = reinterpret_cast<const unsigned char*>(data.data() + 4 * i);
            const std::uint32_t u = detail::read_u32le(p);
            float f;
            std::memcpy(&f, &u, 4);
            out.samples[i] = f;
        }
    } else {
        throw IoFailure("read_wav: unsupported format (want PCM16 or float32): " + path);
    }
    return out;
}

/// Write mono IEEE float32. Samples are stored as-is after float32 rounding.
inline void write_wav_f32(const std::string& path, const std::vector<float>& samples,
                          std::uint32_t sample_rate_hz = 50000) {
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 4);
    std::string buf;
    buf.reserve(58 + data_bytes);
    buf += "RIFF";
    detail::put_u32le(buf, 4 + 8 + 18 + 8 + 4 + 8 + data_bytes);
    buf += "WAVE";
    buf += "fmt ";
    detail::put_u32le(buf, 18);
    detail::put_u16le(buf, kWavFormatIeeeFloat);
    detail::put_u16le(buf, 1);  // mono
    detail::put_u32le(buf, sample_rate_hz);
    detail::put_u32le(buf, sample_rate_hz * 4);
    detail::put_u16le(buf, 4);
    detail::put_u16le(buf, 32);
    detail::put_u16le(buf, 0);  // cbSize
    buf += "fact";
    detail::put_u32le(buf, 4);
    detail::put_u32le(buf, static_cast<std::uint32_t>(samples.size()));
    buf += "data";
    detail::put_u32le(buf, data_bytes);
    for (float s : samples) {
        std::uint32_t u;
        std::memcpy(&u, &s, 4);
        detail::put_u32le(buf, u);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(buf.data(), static_cast<std::streamsize>(buf.size())))
        throw IoFailure("write_wav_f32: cannot write " + path);
}

inline void write_wav_f32(const std::string& path, const Waveform& w) {
    std::vector<float> f(w.samples.begin(), w.samples.end());
    write_wav_f32(path, f, w.sample_rate_hz);
}

/// Write mono PCM 16-bit signed little-endian; input clamped to [-1, 1].
inline void write_wav_pcm16(const std::string& path, const std::vector<double>& samples,
                            std::uint32_t sample_rate_hz = 50000) {
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    std::string buf;
    buf.reserve(44 + data_bytes);
    buf += "RIFF";
    detail::put_u32le(buf, 4 + 8 + 16 + 8 + data_bytes);
    buf += "WAVE";
    buf += "fmt ";
    detail::put_u32le(buf, 16);
    detail::put_u16le(buf, kWavFormatPcm);
    detail::put_u16le(buf, 1);
    detail::put_u32le(buf, sample_rate_hz);
    detail::put_u32le(buf, sample_rate_hz * 2);
    detail::put_u16le(buf, 2);
    detail::put_u16le(buf, 16);
    buf += "data";
    detail::put_u32le(buf, data_bytes);
    for (double s : samples) {
        // Same 1/32768 scale as the reader, clamped to the int16 range.
        long v = std::lrint(s * 32768.0);
        v = v < -32768 ? -32768 : (v > 32767 ? 32767 : v);
        detail::put_u16le(buf, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(buf.data(), static_cast<std::streamsize>(buf.size())))
        throw IoFailure("write_wav_pcm16: cannot write " + path);
}

}  // namespace denoise
