#include "ordermc/report.hpp"

#include "ordermc/errors.hpp"

#include <cmath>
#include <cstdio>

namespace ordermc::report {

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string csv_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

struct ValueText {
    std::string json;
    std::string csv;
};

ValueText render(const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) {
        return {"\"" + json_escape(*s) + "\"", csv_escape(*s)};
    }
    if (const auto* d = std::get_if<double>(&v)) {
        const std::string t = format_double(*d);
        return {t, t};
    }
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        const std::string t = std::to_string(*i);
        return {t, t};
    }
    if (const auto* u = std::get_if<std::uint64_t>(&v)) {
        const std::string t = std::to_string(*u);
        return {t, t};
    }
    if (const auto* b = std::get_if<bool>(&v)) {
        const std::string t = *b ? "true" : "false";
        return {t, t};
    }
    const auto& arr = std::get<std::vector<double>>(v);
    std::string json = "[";
    std::string csv;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (i) {
            json += ',';
            csv += ';';
        }
        const std::string t = format_double(arr[i]);
        json += t;
        csv += t;
    }
    json += ']';
    return {json, csv_escape(csv)};
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_json_line(const Record& r) {
    std::string out = "{";
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
        if (i) out += ',';
        out += "\"" + json_escape(r.fields[i].first) + "\":" + render(r.fields[i].second).json;
    }
    out += '}';
    return out;
}

std::string csv_header(const Record& r) {
    std::string out;
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(r.fields[i].first);
    }
    return out;
}

std::string csv_row(const Record& r) {
    std::string out;
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
        if (i) out += ',';
        out += render(r.fields[i].second).csv;
    }
    return out;
}

Format parse_format(const std::string& name) {
    if (name == "json-lines" || name == "jsonl") return Format::json_lines;
    if (name == "csv") return Format::csv;
    throw config_error("unknown report format '" + name + "' (use json-lines or csv)");
}

std::string to_string(Format f) { return f == Format::json_lines ? "json-lines" : "csv"; }

void Writer::write(const Record& r) {
    if (format_ == Format::csv && !wrote_header_) {
        out_ << csv_header(r) << '\n';
        wrote_header_ = true;
    }
    out_ << (format_ == Format::csv ? csv_row(r) : to_json_line(r)) << '\n';
    out_.flush();
}

} // namespace ordermc::report
