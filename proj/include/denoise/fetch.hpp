#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <openssl/evp.h>

#include "denoise/errors.hpp"
#include "denoise/zip.hpp"

namespace denoise {

/// Lowercase hex SHA-256 of a file, streamed.
inline std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("sha256_file: cannot open " + path);

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256_file: digest init failed");
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

namespace detail {

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // /path?query
    std::string filename;
};

inline ParsedUrl parse_url(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw NetworkFailure("fetch: URL has no scheme: " + url);
    const std::size_t path_start = url.find('/', scheme_end + 3);
    ParsedUrl parsed;
    parsed.base = path_start == std::string::npos ? url : url.substr(0, path_start);
    parsed.path = path_start == std::string::npos ? "/" : url.substr(path_start);

    std::string name = parsed.path.substr(parsed.path.rfind('/') + 1);
    const std::size_t query = name.find('?');
    if (query != std::string::npos) name = name.substr(0, query);
    parsed.filename = name.empty() ? "archive.zip" : name;
    return parsed;
}

inline bool download_once(const ParsedUrl& url, const std::string& dest,
                          std::string& error, bool& transient) {
    httplib::Client client(url.base);
    client.set_follow_location(true);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(120, 0);

    std::ofstream out(dest, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("fetch: cannot write " + dest);

    int status = 0;
    auto res = client.Get(
        url.path,
        [&](const httplib::Response& response) {
            status = response.status;
            return true;
        },
        [&](const char* data, std::size_t len) {
            out.write(data, static_cast<std::streamsize>(len));
            return static_cast<bool>(out);
        });

    if (!res) {
        error = "connection failed: " + httplib::to_string(res.error());
        transient = true;
        return false;
    }
    if (status != 200) {
        error = "HTTP status " + std::to_string(status);
        transient = status >= 500;
        return false;
    }
    out.close();
    return static_cast<bool>(out);
}

}  // namespace detail

/// Download an archive and extract it into dest_dir. When a checksum is
/// given, the archive's SHA-256 must match before anything is extracted.
/// One retry on transient failures (connection errors and 5xx).
inline void fetch_dataset(const std::string& url, const std::string& dest_dir,
                          const std::optional<std::string>& expected_checksum = std::nullopt) {
    namespace fs = std::filesystem;
    const detail::ParsedUrl parsed = detail::parse_url(url);
    fs::create_directories(dest_dir);
    const std::string archive = (fs::path(dest_dir) / parsed.filename).string();

    std::string error;
    bool transient = false;
    if (!detail::download_once(parsed, archive, error, transient)) {
        if (!transient || !detail::download_once(parsed, archive, error, transient))
            throw NetworkFailure("fetch: " + error + " for " + url);
    }

    if (expected_checksum) {
        std::string want = *expected_checksum;
        std::transform(want.begin(), want.end(), want.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        const std::string got = sha256_file(archive);
        if (got != want)
            throw ChecksumMismatch("fetch: SHA-256 mismatch for " + archive + ": got " + got +
                                   ", expected " + want);
    }

    zip_extract(archive, dest_dir);
}

}  // namespace denoise
