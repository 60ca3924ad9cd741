#include "censearch/report.hpp"

#include "censearch/errors.hpp"

#include <algorithm>
#include <cstdio>

namespace censearch {

namespace {

constexpr int kSchemaVersion = 1;

std::string printf_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string json_value(const Field& f) {
    switch (f.kind) {
        case Field::Kind::Text: return json_escape(f.value);
        case Field::Kind::Boolean:
        case Field::Kind::Integer: return f.value;
        case Field::Kind::Number:
            // inf/nan are not JSON; fall back to a string.
            if (f.value.find("inf") != std::string::npos ||
                f.value.find("nan") != std::string::npos)
                return json_escape(f.value);
            return f.value;
    }
    throw UnsupportedValue("unknown field kind");
}

}  // namespace

std::optional<OutputFormat> format_from_string(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "jsonl") return OutputFormat::JsonLines;
    if (name == "pretty") return OutputFormat::Pretty;
    return std::nullopt;
}

std::string to_string(OutputFormat format) {
    switch (format) {
        case OutputFormat::Csv: return "csv";
        case OutputFormat::JsonLines: return "jsonl";
        case OutputFormat::Pretty: return "pretty";
    }
    throw UnsupportedValue("unknown output format");
}

std::string format_machine(double v) { return printf_double("%.17g", v); }
std::string format_pretty(double v) { return printf_double("%.4f", v); }

Field Field::text(std::string key, std::string value, std::string pretty) {
    return {std::move(key), std::move(value), Kind::Text, std::move(pretty)};
}
Field Field::number(std::string key, double v, std::string pretty) {
    return {std::move(key), format_machine(v), Kind::Number, std::move(pretty)};
}
Field Field::integer(std::string key, long long v) {
    return {std::move(key), std::to_string(v), Kind::Integer, {}};
}
Field Field::boolean(std::string key, bool v) {
    return {std::move(key), v ? "true" : "false", Kind::Boolean, {}};
}

void write_records(std::ostream& out, OutputFormat format,
                   const std::vector<Record>& records) {
    if (records.empty()) return;
    for (const auto& record : records)
        if (record.size() != records.front().size())
            throw BadDimensions("records do not share one layout");

    switch (format) {
        case OutputFormat::Csv: {
            const auto& head = records.front();
            for (std::size_t i = 0; i < head.size(); ++i)
                out << (i ? "," : "") << csv_escape(head[i].key);
            out << '\n';
            for (const auto& record : records) {
                for (std::size_t i = 0; i < record.size(); ++i)
                    out << (i ? "," : "") << csv_escape(record[i].value);
                out << '\n';
            }
            break;
        }
        case OutputFormat::JsonLines: {
            for (const auto& record : records) {
                out << "{\"schema_version\":" << kSchemaVersion;
                for (const auto& f : record)
                    out << ',' << json_escape(f.key) << ':' << json_value(f);
                out << "}\n";
            }
            break;
        }
        case OutputFormat::Pretty: {
            std::size_t width = 0;
            for (const auto& f : records.front()) width = std::max(width, f.key.size());
            bool first = true;
            for (const auto& record : records) {
                if (!first) out << '\n';
                first = false;
                for (const auto& f : record) {
                    out << f.key;
                    out << std::string(width - f.key.size() + 2, ' ');
                    out << (f.pretty.empty() ? f.value : f.pretty) << '\n';
                }
            }
            break;
        }
    }
}

void write_trace(std::ostream& out, const std::vector<TraceEntry>& trace) {
    out << "iteration,scheme,psi,accepted\n";
    for (const auto& e : trace) {
        out << e.iteration << ',' << csv_escape(to_csv_string(e.scheme)) << ','
            << format_machine(e.psi) << ',' << (e.accepted ? "true" : "false") << '\n';
    }
}

void write_variance_rows(std::ostream& out, OutputFormat format,
                         const std::vector<VarianceCheckRow>& rows) {
    std::vector<Record> records;
    records.reserve(rows.size());
    for (const auto& r : rows) {
        records.push_back({
            Field::number("s", r.s, format_pretty(r.s)),
            Field::number("empirical", r.empirical, format_pretty(r.empirical)),
            Field::number("asymptotic", r.asymptotic, format_pretty(r.asymptotic)),
            Field::number("ratio", r.ratio, format_pretty(r.ratio)),
            Field::integer("replications", r.replications),
            Field::integer("excluded", r.excluded),
        });
    }
    write_records(out, format, records);
}

}  // namespace censearch
