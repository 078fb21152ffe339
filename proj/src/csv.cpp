#include "prewet/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "prewet/error.hpp"

namespace prewet {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), columns_(header.size()) {
    if (!out_) throw RuntimeFailure("cannot open " + path + " for writing", "io");
    for (const auto& h : header) *this << std::string_view(h);
    end_row();
    rows_ = 0;
}

void CsvWriter::sep() {
    if (field_ > 0) row_ += ',';
    ++field_;
}

CsvWriter& CsvWriter::operator<<(double v) {
    sep();
    row_ += format_double(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long v) {
    sep();
    row_ += std::to_string(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::uint64_t v) {
    sep();
    row_ += std::to_string(v);
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view v) {
    sep();
    row_ += v;
    return *this;
}

void CsvWriter::end_row() {
    if (field_ != columns_) {
        const auto got = field_;
        row_.clear();
        field_ = 0;
        throw SchemaMismatch(path_ + ": row " + std::to_string(rows_ + 1) + " has " +
                             std::to_string(got) + " fields, expected " +
                             std::to_string(columns_));
    }
    row_ += '\n';
    out_ << row_;
    row_.clear();
    field_ = 0;
    ++rows_;
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw RuntimeFailure("write failed for " + path_, "io");
    out_.close();
}

CsvReader::CsvReader(const std::string& path, const std::vector<std::string>& expected)
    : in_(path, std::ios::binary), path_(path), header_(expected) {
    if (!in_) throw ValidationError("cannot open " + path, "io");
    if (!std::getline(in_, line_)) throw SchemaMismatch(path + ": missing header");
    const auto got = split_csv_line(line_);
    for (std::size_t c = 0; c < expected.size(); ++c) {
        if (c >= got.size() || got[c] != expected[c])
            throw SchemaMismatch(path + ": row 0, column " + std::to_string(c + 1) +
                                 ": expected '" + expected[c] + "'");
    }
    if (got.size() != expected.size())
        throw SchemaMismatch(path + ": row 0, column " + std::to_string(expected.size() + 1) +
                             ": unexpected extra column");
}

bool CsvReader::next() {
    if (!std::getline(in_, line_)) return false;
    ++row_;
    fields_ = split_csv_line(line_);
    if (fields_.size() != header_.size())
        fail(std::min(fields_.size(), header_.size()),
             "expected " + std::to_string(header_.size()) + " fields, found " +
                 std::to_string(fields_.size()));
    return true;
}

void CsvReader::fail(std::size_t column, const std::string& why) const {
    throw SchemaMismatch(path_ + ": row " + std::to_string(row_) + ", column " +
                         std::to_string(column + 1) + ": " + why);
}

double CsvReader::get_double(std::size_t column) const {
    const auto& f = fields_.at(column);
    double v = 0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        fail(column, "not a number: '" + f + "'");
    return v;
}

long CsvReader::get_long(std::size_t column) const {
    const auto& f = fields_.at(column);
    long v = 0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        fail(column, "not an integer: '" + f + "'");
    return v;
}

std::uint64_t CsvReader::get_u64(std::size_t column) const {
    const auto& f = fields_.at(column);
    std::uint64_t v = 0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        fail(column, "not an unsigned integer: '" + f + "'");
    return v;
}

const std::string& CsvReader::get_string(std::size_t column) const { return fields_.at(column); }

}  // namespace prewet
