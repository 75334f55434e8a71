#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "denoise/errors.hpp"

namespace denoise {

namespace detail {

inline std::uint16_t zip_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline std::uint32_t zip_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::vector<unsigned char> zip_inflate_raw(const unsigned char* src, std::size_t src_len,
                                                  std::size_t out_len) {
    std::vector<unsigned char> out(out_len);
    z_stream strm{};
    if (inflateInit2(&strm, -15) != Z_OK)  // raw deflate stream
        throw ExtractionFailure("zip: inflateInit failed");
    strm.next_in = const_cast<unsigned char*>(src);
    strm.avail_in = static_cast<uInt>(src_len);
    strm.next_out = out.data();
    strm.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&strm, Z_FINISH);
    inflateEnd(&strm);
    if (rc != Z_STREAM_END || strm.total_out != out_len)
        throw ExtractionFailure("zip: corrupt deflate stream");
    return out;
}

inline bool zip_safe_entry_name(const std::string& name) {
    if (name.empty() || name.front() == '/') return false;
    std::size_t pos = 0;
    while (pos <= name.size()) {
        const std::size_t next = name.find('/', pos);
        const std::string part = name.substr(pos, next == std::string::npos ? next : next - pos);
        if (part == "..") return false;
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return true;
}

}  // namespace detail

struct ZipEntry {
    std::string name;
    std::uint16_t method = 0;
    std::uint32_t crc32 = 0;
    std::uint32_t compressed_size = 0;
    std::uint32_t uncompressed_size = 0;
    std::uint32_t local_offset = 0;

    bool is_directory() const { return !name.empty() && name.back() == '/'; }
};

/// Parse the central directory of a ZIP archive held in memory.
inline std::vector<ZipEntry> zip_list(const std::vector<unsigned char>& bytes) {
    constexpr std::uint32_t kEocdSig = 0x06054b50;
    constexpr std::uint32_t kCdSig = 0x02014b50;
    if (bytes.size() < 22) throw ExtractionFailure("zip: file too small");

    // EOCD sits at the end, possibly before a comment up to 64 KiB.
    std::size_t eocd = std::string::npos;
    const std::size_t scan_start = bytes.size() >= 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
    for (std::size_t i = bytes.size() - 22 + 1; i-- > scan_start;) {
        if (detail::zip_u32(&bytes[i]) == kEocdSig) {
            eocd = i;
            break;
        }
    }
    if (eocd == std::string::npos)
        throw ExtractionFailure("zip: end-of-central-directory record not found");

    const std::uint16_t entry_count = detail::zip_u16(&bytes[eocd + 10]);
    const std::uint32_t cd_size = detail::zip_u32(&bytes[eocd + 12]);
    const std::uint32_t cd_offset = detail::zip_u32(&bytes[eocd + 16]);
    if (cd_offset + cd_size > bytes.size())
        throw ExtractionFailure("zip: central directory out of bounds");

    std::vector<ZipEntry> entries;
    std::size_t pos = cd_offset;
    for (std::uint16_t i = 0; i < entry_count; ++i) {
        if (pos + 46 > bytes.size() || detail::zip_u32(&bytes[pos]) != kCdSig)
            throw ExtractionFailure("zip: bad central directory entry");
        ZipEntry e;
        e.method = detail::zip_u16(&bytes[pos + 10]);
        e.crc32 = detail::zip_u32(&bytes[pos + 16]);
        e.compressed_size = detail::zip_u32(&bytes[pos + 20]);
        e.uncompressed_size = detail::zip_u32(&bytes[pos + 24]);
        const std::uint16_t name_len = detail::zip_u16(&bytes[pos + 28]);
        const std::uint16_t extra_len = detail::zip_u16(&bytes[pos + 30]);
        const std::uint16_t comment_len = detail::zip_u16(&bytes[pos + 32]);
        e.local_offset = detail::zip_u32(&bytes[pos + 42]);
        if (pos + 46 + name_len > bytes.size())
            throw ExtractionFailure("zip: truncated entry name");
        e.name.assign(reinterpret_cast<const char*>(&bytes[pos + 46]), name_len);
        entries.push_back(std::move(e));
        pos += 46 + name_len + extra_len + comment_len;
    }
    return entries;
}

/// Decompress one entry (stored or deflate), verifying the CRC.
inline std::vector<unsigned char> zip_read_entry(const std::vector<unsigned char>& bytes,
                                                 const ZipEntry& entry) {
    constexpr std::uint32_t kLocalSig = 0x04034b50;
    const std::size_t pos = entry.local_offset;
    if (pos + 30 > bytes.size() || detail::zip_u32(&bytes[pos]) != kLocalSig)
        throw ExtractionFailure("zip: bad local header for " + entry.name);
    const std::uint16_t name_len = detail::zip_u16(&bytes[pos + 26]);
    const std::uint16_t extra_len = detail::zip_u16(&bytes[pos + 28]);
    const std::size_t data_pos = pos + 30 + name_len + extra_len;
    if (data_pos + entry.compressed_size > bytes.size())
        throw ExtractionFailure("zip: truncated data for " + entry.name);

    std::vector<unsigned char> data;
    if (entry.method == 0) {
        if (entry.compressed_size != entry.uncompressed_size)
            throw ExtractionFailure("zip: stored entry with mismatched sizes: " + entry.name);
        data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data_pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(data_pos + entry.compressed_size));
    } else if (entry.method == 8) {
        data = detail::zip_inflate_raw(&bytes[data_pos], entry.compressed_size,
                                       entry.uncompressed_size);
    } else {
        throw ExtractionFailure("zip: unsupported compression method " +
                                std::to_string(entry.method) + " for " + entry.name);
    }

    const auto crc = static_cast<std::uint32_t>(
        ::crc32(0L, data.empty() ? Z_NULL : data.data(), static_cast<uInt>(data.size())));
    if (crc != entry.crc32) throw ExtractionFailure("zip: CRC mismatch for " + entry.name);
    return data;
}

/// Extract every entry of the archive file under dest_dir. Entry names that
/// escape the destination (absolute or with "..") are rejected.
inline void zip_extract(const std::string& archive_path, const std::string& dest_dir) {
    namespace fs = std::filesystem;
    std::ifstream in(archive_path, std::ios::binary);
    if (!in) throw ExtractionFailure("zip: cannot open " + archive_path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

    const std::vector<ZipEntry> entries = zip_list(bytes);
    for (const ZipEntry& entry : entries) {
        if (!detail::zip_safe_entry_name(entry.name))
            throw ExtractionFailure("zip: unsafe entry name: " + entry.name);
        const fs::path target = fs::path(dest_dir) / entry.name;
        if (entry.is_directory()) {
            fs::create_directories(target);
            continue;
        }
        fs::create_directories(target.parent_path());
        const std::vector<unsigned char> data = zip_read_entry(bytes, entry);
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        if (!out ||
            !out.write(reinterpret_cast<const char*>(data.data()),
                       static_cast<std::streamsize>(data.size())))
            throw ExtractionFailure("zip: cannot write " + target.string());
    }
}

}  // namespace denoise
