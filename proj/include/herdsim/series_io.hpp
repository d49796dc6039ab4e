#pragma once

// Machine-readable output shared by the simulate, exact and verify commands.
//
// CSV header (fixed):
//   index,theta_mode,p,ci_low,ci_high,p_reveal,reveal_bound,correct_bound,satisfied,method
//
// JSON document (keys in this order):
//   {"schema": "herdsim.series/1", "command": ..., "config": {...},
//    "rows": [{<one object per CSV row, same keys and order>}]}
//
// Reals are written in shortest round-trip form; booleans as true/false.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace herdsim {

inline constexpr const char* kSeriesSchema = "herdsim.series/1";

struct SeriesRow {
    std::uint64_t index = 0;
    std::string theta_mode;
    double p = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_reveal = 0.0;
    double reveal_bound = 0.0;
    double correct_bound = 0.0;
    bool satisfied = false;
    std::string method;

    friend bool operator==(const SeriesRow&, const SeriesRow&) = default;
};

/// RFC 4180 field quoting: fields containing a comma, quote or line break
/// are wrapped in quotes with inner quotes doubled.
std::string csv_escape(const std::string& field);

/// Shortest representation that parses back to the same double.
std::string format_real(double value);

void write_csv(std::ostream& out, std::span<const SeriesRow> rows);
void write_json(std::ostream& out, const std::string& command, const nlohmann::ordered_json& config,
                std::span<const SeriesRow> rows);

/// Parses a document produced by write_json. Throws std::runtime_error on
/// schema mismatch.
std::vector<SeriesRow> read_json_rows(std::istream& in);

/// Parses the fixed CSV schema (header required).
std::vector<SeriesRow> read_csv_rows(std::istream& in);

}  // namespace herdsim
