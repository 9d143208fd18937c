#pragma once

#include "rcsep/error.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>

namespace rcsep::detail {

/// Row-oriented CSV writer; numbers use %.17g so output round-trips.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header) : path_(path) {
        out_.open(path);
        if (!out_) throw IoError("cannot write " + path.string());
        for (const auto& h : header) cell(h);
        end_row();
    }

    CsvWriter& cell(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return raw(buf);
    }
    CsvWriter& cell(std::optional<double> v) { return v ? cell(*v) : raw("nan"); }
    CsvWriter& cell(std::uint64_t v) { return raw(std::to_string(v)); }
    CsvWriter& cell(const std::string& v) { return raw(v); }
    CsvWriter& cell(const char* v) { return raw(v); }

    void end_row() {
        out_ << '\n';
        first_ = true;
    }

    void close() {
        out_.close();
        if (!out_) throw IoError("failed writing " + path_.string());
    }

private:
    CsvWriter& raw(const std::string& s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }

    std::filesystem::path path_;
    std::ofstream out_;
    bool first_ = true;
};

} // namespace rcsep::detail
