#pragma once

#include "ftrend/csv.hpp"
#include "ftrend/error.hpp"
#include "ftrend/series.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ftrend {

enum class TemperatureFormat { giss_annual, plain_two_column, ensemble_member };

[[nodiscard]] inline TemperatureFormat temperature_format_from_string(const std::string& s) {
    if (s == "giss_annual") return TemperatureFormat::giss_annual;
    if (s == "plain_two_column") return TemperatureFormat::plain_two_column;
    if (s == "ensemble_member") return TemperatureFormat::ensemble_member;
    throw std::invalid_argument("unknown temperature format '" + s + "'");
}

namespace detail {

struct YearValue {
    int year;
    std::optional<double> value;  // nullopt marks a GISS "***" cell
    std::size_t line;
};

inline std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line);
}

// Rows must be strictly increasing and contiguous.
inline AnnualSeries assemble(std::vector<YearValue> rows, Unit unit, const std::string& source) {
    // Trailing missing cells (an incomplete current year) are dropped; interior ones are errors.
    while (!rows.empty() && !rows.back().value) rows.pop_back();
    if (rows.empty()) throw DataError(source + ": empty file (no data rows)");
    std::vector<double> values;
    values.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) {
            int expected = rows[i - 1].year + 1;
            if (rows[i].year <= rows[i - 1].year) {
                throw DataError(where(source, rows[i].line) + ": years not strictly increasing (" +
                                std::to_string(rows[i].year) + " after " +
                                std::to_string(rows[i - 1].year) + ")");
            }
            if (rows[i].year != expected) throw GapError(expected);
        }
        if (!rows[i].value) {
            throw DataError(where(source, rows[i].line) + ": missing value for year " +
                            std::to_string(rows[i].year));
        }
        values.push_back(*rows[i].value);
    }
    if (values.size() < 2) throw DataError(source + ": need at least 2 years of data");
    return {rows.front().year, std::move(values), unit, BaselinePeriod{1951, 1980}};
}

}  // namespace detail

/**
 * @brief Parse an annual temperature-anomaly table.
 *
 * plain_two_column and ensemble_member read `year,value` rows, with an optional
 * header row (recognized by a non-integer first cell). giss_annual requires a
 * header; the `J-D` column is used when present, otherwise the second column.
 * `***` marks a missing GISS value: trailing missing years are dropped, interior
 * ones raise DataError. Lines starting with '#' are comments.
 */
[[nodiscard]] inline AnnualSeries parse_temperature_text(std::istream& in, TemperatureFormat format,
                                                         const std::string& source = "<stream>") {
    std::vector<detail::YearValue> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    std::size_t value_col = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::skippable(line)) continue;
        auto cells = csv::split(line);
        if (!header_seen) {
            header_seen = true;
            bool numeric_first = csv::parse_int(cells[0]).has_value();
            if (format == TemperatureFormat::giss_annual) {
                if (numeric_first) {
                    throw DataError(detail::where(source, lineno) +
                                    ": giss_annual format requires a header row");
                }
                auto it = std::find(cells.begin(), cells.end(), std::string_view{"J-D"});
                value_col = it != cells.end() ? static_cast<std::size_t>(it - cells.begin()) : 1;
                continue;
            }
            if (!numeric_first) continue;
        }
        if (cells.size() <= value_col) {
            throw DataError(detail::where(source, lineno) + ": expected at least " +
                            std::to_string(value_col + 1) + " columns");
        }
        auto year = csv::parse_int(cells[0]);
        if (!year) {
            throw DataError(detail::where(source, lineno) + ": non-numeric year '" +
                            std::string(cells[0]) + "' in row " + std::to_string(lineno));
        }
        auto cell = cells[value_col];
        if (format == TemperatureFormat::giss_annual && cell == "***") {
            rows.push_back({*year, std::nullopt, lineno});
            continue;
        }
        auto v = csv::parse_double(cell);
        if (!v) {
            throw DataError(detail::where(source, lineno) + ": non-numeric value '" +
                            std::string(cell) + "' in row " + std::to_string(lineno));
        }
        rows.push_back({*year, *v, lineno});
    }
    return detail::assemble(std::move(rows), Unit::celsius_anomaly, source);
}

[[nodiscard]] inline AnnualSeries parse_temperature_csv(const std::string& path,
                                                        TemperatureFormat format) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open temperature file '" + path + "'");
    return parse_temperature_text(in, format, path);
}

/// Writes `year,value` with round-trip precision.
inline void write_plain_csv(const AnnualSeries& s, std::ostream& os) {
    csv::Writer w(os);
    w.header({"year", "value"});
    for (std::size_t i = 0; i < s.size(); ++i) w.row(s.start_year() + static_cast<int>(i), s[i]);
}

enum class ForcingRole { anthropogenic, natural, ignore };

using ColumnMap = std::map<std::string, ForcingRole>;

[[nodiscard]] inline ForcingRole forcing_role_from_string(const std::string& s) {
    if (s == "anthropogenic") return ForcingRole::anthropogenic;
    if (s == "natural") return ForcingRole::natural;
    if (s == "ignore") return ForcingRole::ignore;
    throw DataError("unknown forcing role '" + s + "' (expected anthropogenic|natural|ignore)");
}

/// Reads a JSON sidecar of the form {"column_map": {"CO2": "anthropogenic", ...}}.
[[nodiscard]] inline ColumnMap load_column_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open column map '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("column map '" + path + "': " + e.what());
    }
    if (!j.contains("column_map") || !j["column_map"].is_object()) {
        throw DataError("column map '" + path + "': missing object field 'column_map'");
    }
    ColumnMap map;
    for (auto& [k, v] : j["column_map"].items()) {
        if (!v.is_string()) throw DataError("column map '" + path + "': role for '" + k + "' is not a string");
        map[k] = forcing_role_from_string(v.get<std::string>());
    }
    return map;
}

/**
 * @brief Parse a `year,<constituent>...` forcing table and aggregate by role.
 *
 * Aggregates are summed in the column map's (sorted-name) order, so they do not
 * depend on the column order of the file. Table columns absent from the map are
 * ignored; map entries absent from the table are an error.
 */
[[nodiscard]] inline ForcingTable parse_forcing_text(std::istream& in, const ColumnMap& column_map,
                                                     const std::string& source = "<stream>") {
    bool any_selected = std::any_of(column_map.begin(), column_map.end(),
                                    [](const auto& kv) { return kv.second != ForcingRole::ignore; });
    if (!any_selected) throw DataError(source + ": no forcing columns selected");

    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::skippable(line)) continue;
        for (auto c : csv::split(line)) header.emplace_back(c);
        break;
    }
    if (header.empty()) throw DataError(source + ": empty file (no header)");

    std::map<std::string, std::size_t> col_index;
    for (std::size_t i = 1; i < header.size(); ++i) col_index[header[i]] = i;
    for (const auto& [name, role] : column_map) {
        if (!col_index.count(name)) throw DataError(source + ": unknown column '" + name + "'");
    }

    std::map<std::string, std::vector<double>> constituents;
    std::vector<int> years;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::skippable(line)) continue;
        auto cells = csv::split(line);
        if (cells.size() != header.size()) {
            throw DataError(detail::where(source, lineno) + ": expected " +
                            std::to_string(header.size()) + " columns, got " +
                            std::to_string(cells.size()));
        }
        auto year = csv::parse_int(cells[0]);
        if (!year) {
            throw DataError(detail::where(source, lineno) + ": non-numeric year '" +
                            std::string(cells[0]) + "' in row " + std::to_string(lineno));
        }
        if (!years.empty()) {
            if (*year <= years.back()) {
                throw DataError(detail::where(source, lineno) + ": years not strictly increasing");
            }
            if (*year != years.back() + 1) throw GapError(years.back() + 1);
        }
        years.push_back(*year);
        for (const auto& [name, role] : column_map) {
            auto v = csv::parse_double(cells[col_index[name]]);
            if (!v) {
                throw DataError(detail::where(source, lineno) + ": non-numeric value '" +
                                std::string(cells[col_index[name]]) + "' in row " +
                                std::to_string(lineno));
            }
            constituents[name].push_back(*v);
        }
    }
    if (years.empty()) throw DataError(source + ": empty file (no data rows)");

    std::vector<double> anthro(years.size(), 0.0), natural(years.size(), 0.0);
    for (const auto& [name, role] : column_map) {
        if (role == ForcingRole::ignore) continue;
        auto& target = role == ForcingRole::anthropogenic ? anthro : natural;
        const auto& col = constituents[name];
        for (std::size_t i = 0; i < years.size(); ++i) target[i] += col[i];
    }
    return {years.front(), std::move(anthro), std::move(natural), Unit::watts_per_m2,
            std::move(constituents)};
}

[[nodiscard]] inline ForcingTable parse_forcing_table(const std::string& path,
                                                      const ColumnMap& column_map) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open forcing file '" + path + "'");
    return parse_forcing_text(in, column_map, path);
}

/// Writes `year,anthropogenic,natural` with round-trip precision.
inline void write_forcing_csv(const ForcingTable& f, std::ostream& os) {
    csv::Writer w(os);
    w.header({"year", "anthropogenic", "natural"});
    for (std::size_t i = 0; i < f.size(); ++i) {
        w.row(f.start_year() + static_cast<int>(i), f.anthropogenic()[i], f.natural()[i]);
    }
}

/**
 * @brief Splice a future pathway onto historical forcing.
 *
 * Future anthropogenic values are shifted by the constant that makes them meet
 * the historical value at `splice_year`; natural forcing is held at its
 * historical splice-year value afterwards. Years up to and including the splice
 * year are copied from the historical table unchanged.
 */
[[nodiscard]] inline Scenario build_scenario(const ForcingTable& historical, const ForcingTable& future,
                                             int splice_year, std::string label = "scenario") {
    if (!historical.covers(splice_year) || !future.covers(splice_year)) {
        throw DataError("non-overlapping years: splice year " + std::to_string(splice_year) +
                        " must be covered by both tables (historical " +
                        std::to_string(historical.start_year()) + "-" +
                        std::to_string(historical.end_year()) + ", future " +
                        std::to_string(future.start_year()) + "-" +
                        std::to_string(future.end_year()) + ")");
    }
    const double shift = historical.anthropogenic_at(splice_year) - future.anthropogenic_at(splice_year);
    const double natural_hold = historical.natural_at(splice_year);
    const int last = std::max(future.end_year(), splice_year);
    std::vector<double> anthro, natural;
    for (int y = historical.start_year(); y <= last; ++y) {
        if (y <= splice_year) {
            anthro.push_back(historical.anthropogenic_at(y));
            natural.push_back(historical.natural_at(y));
        } else {
            anthro.push_back(future.anthropogenic_at(y) + shift);
            natural.push_back(natural_hold);
        }
    }
    return {ForcingTable(historical.start_year(), std::move(anthro), std::move(natural),
                         historical.unit()),
            std::move(label), splice_year, shift};
}

/// Forcing expressed in multiples of the CO2-doubling forcing.
[[nodiscard]] inline ForcingTable normalize_forcing(const ForcingTable& f, double f2x) {
    if (!(f2x > 0.0) || !std::isfinite(f2x)) {
        throw std::invalid_argument("normalize_forcing: f2x must be positive, got " + csv::format(f2x));
    }
    std::vector<double> a(f.anthropogenic().begin(), f.anthropogenic().end());
    std::vector<double> n(f.natural().begin(), f.natural().end());
    for (auto& v : a) v /= f2x;
    for (auto& v : n) v /= f2x;
    return {f.start_year(), std::move(a), std::move(n), Unit::doublings};
}

/// Anthropogenic trajectory multiplied by a constant (natural untouched).
[[nodiscard]] inline ForcingTable scale_anthropogenic(const ForcingTable& f, double scale) {
    std::vector<double> a(f.anthropogenic().begin(), f.anthropogenic().end());
    for (auto& v : a) v *= scale;
    return {f.start_year(), std::move(a), std::vector<double>(f.natural().begin(), f.natural().end()),
            f.unit()};
}

}  // namespace ftrend
