#pragma once

// Internal helpers for the versioned artifact container shared by every
// serialized model: {kind, format_version, checksum, model}. The checksum is
// fnv1a-64 over the compact dump of the model body, and loading verifies the
// kind tag and format version before comparing checksums.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "p2pscore/errors.hpp"

namespace p2p::container {

constexpr int kFormatVersion = 1;
constexpr const char* kKind = "p2pscore-model";

inline std::string fnv1a64_hex(const std::string& bytes) {
    uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

inline std::string wrap(nlohmann::ordered_json body) {
    nlohmann::ordered_json doc;
    doc["kind"] = kKind;
    doc["format_version"] = kFormatVersion;
    doc["checksum"] = "fnv1a64:" + fnv1a64_hex(body.dump());
    doc["model"] = std::move(body);
    return doc.dump(2) + "\n";
}

// Parses the container and returns the verified model body.
inline nlohmann::ordered_json unwrap(const std::string& text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception&) {
        throw ChecksumMismatchError("model file is not valid JSON (truncated or corrupt)");
    }
    if (!doc.contains("kind") || doc["kind"] != kKind) {
        throw ParseError("not a model file (missing kind tag)");
    }
    if (!doc.contains("format_version") ||
        doc["format_version"].get<int>() != kFormatVersion) {
        throw VersionMismatchError(
            "unsupported model format version " +
            (doc.contains("format_version") ? doc["format_version"].dump()
                                            : std::string("<missing>")) +
            " (expected " + std::to_string(kFormatVersion) + ")");
    }
    nlohmann::ordered_json body;
    std::string expect;
    try {
        body = doc.at("model");
        expect = doc.at("checksum").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    }
    std::string actual = "fnv1a64:" + fnv1a64_hex(body.dump());
    if (expect != actual) {
        throw ChecksumMismatchError("model checksum mismatch: file says " + expect +
                                    ", payload hashes to " + actual);
    }
    return body;
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace p2p::container
