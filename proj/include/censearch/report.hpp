#pragma once

#include "censearch/montecarlo.hpp"
#include "censearch/search.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace censearch {

enum class OutputFormat { Csv, JsonLines, Pretty };

std::optional<OutputFormat> format_from_string(const std::string& name);
std::string to_string(OutputFormat format);

/// %.17g: round-trips a double exactly.
std::string format_machine(double v);
/// %.4f: table display.
std::string format_pretty(double v);

/// One output cell, already formatted for the machine modes; pretty mode
/// may substitute `pretty` when present (run-length schemes, 4-decimal psi).
struct Field {
    enum class Kind { Text, Number, Integer, Boolean };

    std::string key;
    std::string value;
    Kind kind = Kind::Text;
    std::string pretty;  ///< optional display override

    static Field text(std::string key, std::string value, std::string pretty = "");
    static Field number(std::string key, double v, std::string pretty = "");
    static Field integer(std::string key, long long v);
    static Field boolean(std::string key, bool v);
};

using Record = std::vector<Field>;

/// Renders records in the requested format. All records must share one
/// key layout. CSV: header plus one line per record, fields quoted when
/// they contain commas or quotes. JSON lines: one object per record with
/// a leading schema_version field. Pretty: aligned key/value blocks.
/// Output is byte-deterministic in the records.
void write_records(std::ostream& out, OutputFormat format, const std::vector<Record>& records);

/// Newline-delimited trace: iteration, scheme, psi (17 significant
/// digits), accepted.
void write_trace(std::ostream& out, const std::vector<TraceEntry>& trace);

/// Validation table: s, empirical, asymptotic, ratio, replications, excluded.
void write_variance_rows(std::ostream& out, OutputFormat format,
                         const std::vector<VarianceCheckRow>& rows);

}  // namespace censearch
