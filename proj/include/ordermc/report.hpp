#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ordermc::report {

// Flat record: ordered key/value pairs. Keys use '.' for grouping
// ("config.epsilon"); both serializers emit the same values, so a CSV row
// and a JSON line of the same record carry identical numeric text.
using Value = std::variant<std::string, double, std::int64_t, std::uint64_t, bool,
                           std::vector<double>>;

struct Record {
    std::vector<std::pair<std::string, Value>> fields;

    Record& add(std::string key, Value value) {
        fields.emplace_back(std::move(key), std::move(value));
        return *this;
    }
};

// Doubles are serialized with 17 significant digits: enough to round-trip
// exactly, and stable across runs.
std::string format_double(double v);

std::string to_json_line(const Record& r);
std::string csv_header(const Record& r);
std::string csv_row(const Record& r);

enum class Format { json_lines, csv };

Format parse_format(const std::string& name); // "json-lines" | "csv"
std::string to_string(Format f);

// Streams records to an ostream as they arrive; CSV emits the header from
// the first record's keys.
class Writer {
  public:
    Writer(std::ostream& out, Format format) : out_(out), format_(format) {}

    void write(const Record& r);

  private:
    std::ostream& out_;
    Format format_;
    bool wrote_header_ = false;
};

} // namespace ordermc::report
