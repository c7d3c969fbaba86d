#pragma once

// Deterministic text emission: shortest round-trip float formatting and
// atomic file replacement (temp + rename).  Byte-identical output for
// identical inputs is a hard requirement of the batch surface.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>

#include "common.hpp"

namespace trojan {

// Shortest decimal string that round-trips to the same double.
inline std::string fmt_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (res.ec != std::errc()) throw numeric_error("fmt_double: conversion failed");
    return std::string(buf, res.ptr);
}

// Row-oriented CSV accumulator; caller supplies the header once.
struct CsvBuilder {
    std::string text;

    explicit CsvBuilder(std::string_view header) {
        text.append(header);
        text.push_back('\n');
    }

    static void append_cell(std::string& out, double v) { out += fmt_double(v); }
    static void append_cell(std::string& out, int v) { out += std::to_string(v); }
    static void append_cell(std::string& out, long v) { out += std::to_string(v); }
    static void append_cell(std::string& out, long long v) { out += std::to_string(v); }
    static void append_cell(std::string& out, const std::string& v) { out += v; }
    static void append_cell(std::string& out, const char* v) { out += v; }

    template <typename T, typename... Rest>
    void row(const T& first, const Rest&... rest) {
        append_cell(text, first);
        ((text.push_back(','), append_cell(text, rest)), ...);
        text.push_back('\n');
    }
};

// Writes text to path via a temp file in the same directory, then renames.
// Readers never observe a partial file.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
    namespace fs = std::filesystem;
    if (path.empty()) throw invalid_input("atomic_write_text: empty path");
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);  // best-effort; open below reports real failures
    const fs::path tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw invalid_input("atomic_write_text: cannot open " + tmp.string());
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.flush();
        if (!out) throw invalid_input("atomic_write_text: short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw invalid_input("atomic_write_text: rename to " + path.string() + " failed: " + ec.message());
}

}  // namespace trojan
