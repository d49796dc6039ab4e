#include "herdsim/series_io.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace herdsim {

namespace {

constexpr const char* kCsvHeader =
    "index,theta_mode,p,ci_low,ci_high,p_reveal,reveal_bound,correct_bound,satisfied,method";

nlohmann::ordered_json row_to_json(const SeriesRow& r) {
    nlohmann::ordered_json j;
    j["index"] = r.index;
    j["theta_mode"] = r.theta_mode;
    j["p"] = r.p;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    j["p_reveal"] = r.p_reveal;
    j["reveal_bound"] = r.reveal_bound;
    j["correct_bound"] = r.correct_bound;
    j["satisfied"] = r.satisfied;
    j["method"] = r.method;
    return j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}

bool parse_bool(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw std::runtime_error("expected true/false, got '" + s + "'");
}

}  // namespace

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_real(double value) { return fmt::format("{}", value); }

void write_csv(std::ostream& out, std::span<const SeriesRow> rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.index << ',' << csv_escape(r.theta_mode) << ',' << format_real(r.p) << ','
            << format_real(r.ci_low) << ',' << format_real(r.ci_high) << ',' << format_real(r.p_reveal)
            << ',' << format_real(r.reveal_bound) << ',' << format_real(r.correct_bound) << ','
            << (r.satisfied ? "true" : "false") << ',' << csv_escape(r.method) << '\n';
    }
}

void write_json(std::ostream& out, const std::string& command, const nlohmann::ordered_json& config,
                std::span<const SeriesRow> rows) {
    nlohmann::ordered_json doc;
    doc["schema"] = kSeriesSchema;
    doc["command"] = command;
    doc["config"] = config;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) doc["rows"].push_back(row_to_json(r));
    out << doc.dump(2) << '\n';
}

std::vector<SeriesRow> read_json_rows(std::istream& in) {
    const auto doc = nlohmann::ordered_json::parse(in);
    if (!doc.contains("schema") || doc["schema"] != kSeriesSchema) {
        throw std::runtime_error("not a herdsim series document");
    }
    std::vector<SeriesRow> rows;
    for (const auto& j : doc.at("rows")) {
        SeriesRow r;
        r.index = j.at("index").get<std::uint64_t>();
        r.theta_mode = j.at("theta_mode").get<std::string>();
        r.p = j.at("p").get<double>();
        r.ci_low = j.at("ci_low").get<double>();
        r.ci_high = j.at("ci_high").get<double>();
        r.p_reveal = j.at("p_reveal").get<double>();
        r.reveal_bound = j.at("reveal_bound").get<double>();
        r.correct_bound = j.at("correct_bound").get<double>();
        r.satisfied = j.at("satisfied").get<bool>();
        r.method = j.at("method").get<std::string>();
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<SeriesRow> read_csv_rows(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("missing or unexpected CSV header");
    }
    std::vector<SeriesRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 10) throw std::runtime_error("expected 10 CSV fields, got " + std::to_string(f.size()));
        SeriesRow r;
        r.index = std::stoull(f[0]);
        r.theta_mode = f[1];
        r.p = std::stod(f[2]);
        r.ci_low = std::stod(f[3]);
        r.ci_high = std::stod(f[4]);
        r.p_reveal = std::stod(f[5]);
        r.reveal_bound = std::stod(f[6]);
        r.correct_bound = std::stod(f[7]);
        r.satisfied = parse_bool(f[8]);
        r.method = f[9];
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace herdsim
