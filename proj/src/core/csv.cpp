#include "lossbal/csv.hpp"

#include <charconv>
#include <stdexcept>

#include "lossbal/error.hpp"

namespace lossbal {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (const auto& c : columns) cell(std::string_view(c));
    end_row();
}

void CsvWriter::sep() {
    if (!first_) row_ += ',';
    first_ = false;
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    row_ += format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(std::optional<double> v) {
    sep();
    if (v) row_ += format_double(*v);
    return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
    sep();
    row_ += std::to_string(v);
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
    sep();
    row_ += v;
    return *this;
}

void CsvWriter::end_row() {
    row_ += '\n';
    out_ << row_;
    row_.clear();
    first_ = true;
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw Error("error while writing CSV file");
}

}  // namespace lossbal
