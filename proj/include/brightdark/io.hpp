#pragma once

// Tabular datasets and their CSV / JSON encodings.
//
// CSV: one header line, comma separated, '\n' line endings, trailing newline.
// Reals use the shortest round-trip decimal form; booleans are 0/1.
// JSON: {"meta": {...}, "columns": [...], "data": [{column: value}, ...]}.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "brightdark/scan.hpp"
#include "brightdark/unified.hpp"

namespace brightdark {

using Json = nlohmann::ordered_json;
using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

enum class Format { csv, json };

Format parse_format(const std::string& s);

/// Shortest decimal that round-trips to the same double; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_number(double v);

void write_csv(const Table& table, std::ostream& out);
Json to_json(const Table& table, const Json& meta);
Table table_from_json(const Json& doc);

void emit(const Table& table, Format format, const Json& meta, std::ostream& sink);

/// phase_rad,p_bright plus counts when present and expected_counts when
/// present; optional columns are emitted only if every point carries them.
Table to_table(const FringeDataset& data);
Table to_table(const std::vector<Sample>& samples, const std::string& x_name, const std::string& y_name);
Table to_table(const std::vector<SpectrumLine>& spectrum);

Json to_json(const EnbsConfig& cfg);
Json to_json(const ScanSpec& spec);

} // namespace brightdark
