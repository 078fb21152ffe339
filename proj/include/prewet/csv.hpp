#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace prewet {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Streaming CSV writer: header first, LF line endings, floats in shortest
/// round-trip form.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::vector<std::string> header);

    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long v);
    CsvWriter& operator<<(int v) { return *this << static_cast<long>(v); }
    CsvWriter& operator<<(std::uint64_t v);
    CsvWriter& operator<<(std::string_view v);
    /// Ends the current row; throws SchemaMismatch on a wrong field count and
    /// discards the row.
    void end_row();
    void close();

    std::size_t rows() const { return rows_; }

private:
    void sep();

    std::ofstream out_;
    std::string path_;
    std::size_t columns_;
    std::string row_;  // pending row, written only by a valid end_row
    std::size_t field_ = 0;
    std::size_t rows_ = 0;
};

/// Streaming CSV reader checking the header against a schema. Only the
/// current row is held in memory.
class CsvReader {
public:
    /// Throws SchemaMismatch unless the header equals `expected` exactly.
    CsvReader(const std::string& path, const std::vector<std::string>& expected);

    /// Advances to the next data row; false at end of file.
    bool next();

    /// Data row number, 1-based (the header is row 0).
    std::size_t row() const { return row_; }

    double get_double(std::size_t column) const;
    long get_long(std::size_t column) const;
    std::uint64_t get_u64(std::size_t column) const;
    const std::string& get_string(std::size_t column) const;

private:
    [[noreturn]] void fail(std::size_t column, const std::string& why) const;

    std::ifstream in_;
    std::string path_;
    std::vector<std::string> header_;
    std::vector<std::string> fields_;
    std::string line_;
    std::size_t row_ = 0;
};

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace prewet
