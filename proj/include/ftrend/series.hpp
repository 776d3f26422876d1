#pragma once

#include "ftrend/error.hpp"

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ftrend {

enum class Unit { celsius_anomaly, watts_per_m2, doublings, unitless };

inline const char* to_string(Unit u) {
    switch (u) {
        case Unit::celsius_anomaly: return "degC_anomaly";
        case Unit::watts_per_m2: return "W/m2";
        case Unit::doublings: return "doublings";
        case Unit::unitless: return "unitless";
    }
    return "unknown";
}

struct BaselinePeriod {
    int first_year{};
    int last_year{};
};

/**
 * @brief Year-indexed annual values with one entry per year and no gaps.
 *
 * Construction validates the invariants (length >= 2, every value finite); a
 * constructed series is immutable.
 */
class AnnualSeries {
public:
    AnnualSeries(int start_year, std::vector<double> values, Unit unit = Unit::unitless,
                 std::optional<BaselinePeriod> baseline = std::nullopt)
        : start_year_(start_year), values_(std::move(values)), unit_(unit), baseline_(baseline) {
        if (values_.size() < 2) {
            throw DataError("annual series needs at least 2 values, got " +
                            std::to_string(values_.size()));
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw DataError("non-finite value in year " +
                                std::to_string(start_year_ + static_cast<int>(i)));
            }
        }
    }

    [[nodiscard]] int start_year() const noexcept { return start_year_; }
    [[nodiscard]] int end_year() const noexcept {
        return start_year_ + static_cast<int>(values_.size()) - 1;
    }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& vector() const noexcept { return values_; }
    [[nodiscard]] Unit unit() const noexcept { return unit_; }
    [[nodiscard]] const std::optional<BaselinePeriod>& baseline() const noexcept {
        return baseline_;
    }

    [[nodiscard]] bool contains(int year) const noexcept {
        return year >= start_year_ && year <= end_year();
    }

    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    [[nodiscard]] double at_year(int year) const {
        if (!contains(year)) {
            throw DataError("year " + std::to_string(year) + " outside series range " +
                            std::to_string(start_year_) + "-" + std::to_string(end_year()));
        }
        return values_[static_cast<std::size_t>(year - start_year_)];
    }

    /// Sub-series covering [first, last] inclusive.
    [[nodiscard]] AnnualSeries slice(int first, int last) const {
        if (first > last || !contains(first) || !contains(last)) {
            throw DataError("slice " + std::to_string(first) + "-" + std::to_string(last) +
                            " outside series range " + std::to_string(start_year_) + "-" +
                            std::to_string(end_year()));
        }
        auto b = values_.begin() + (first - start_year_);
        return {first, std::vector<double>(b, b + (last - first + 1)), unit_, baseline_};
    }

private:
    int start_year_;
    std::vector<double> values_;
    Unit unit_;
    std::optional<BaselinePeriod> baseline_;
};

/**
 * @brief Per-year anthropogenic and natural forcing aggregates.
 *
 * The optional constituent columns keep the per-agent values the aggregates were
 * built from; they are carried for reporting only.
 */
class ForcingTable {
public:
    ForcingTable(int start_year, std::vector<double> anthropogenic, std::vector<double> natural,
                 Unit unit = Unit::watts_per_m2,
                 std::map<std::string, std::vector<double>> constituents = {})
        : start_year_(start_year),
          anthropogenic_(std::move(anthropogenic)),
          natural_(std::move(natural)),
          unit_(unit),
          constituents_(std::move(constituents)) {
        if (anthropogenic_.size() != natural_.size()) {
            throw DataError("forcing table: anthropogenic and natural lengths differ (" +
                            std::to_string(anthropogenic_.size()) + " vs " +
                            std::to_string(natural_.size()) + ")");
        }
        if (anthropogenic_.empty()) throw DataError("forcing table is empty");
        for (std::size_t i = 0; i < anthropogenic_.size(); ++i) {
            if (!std::isfinite(anthropogenic_[i]) || !std::isfinite(natural_[i])) {
                throw DataError("non-finite forcing in year " +
                                std::to_string(start_year_ + static_cast<int>(i)));
            }
        }
    }

    [[nodiscard]] int start_year() const noexcept { return start_year_; }
    [[nodiscard]] int end_year() const noexcept {
        return start_year_ + static_cast<int>(anthropogenic_.size()) - 1;
    }
    [[nodiscard]] std::size_t size() const noexcept { return anthropogenic_.size(); }
    [[nodiscard]] bool covers(int year) const noexcept {
        return year >= start_year_ && year <= end_year();
    }
    [[nodiscard]] std::span<const double> anthropogenic() const noexcept { return anthropogenic_; }
    [[nodiscard]] std::span<const double> natural() const noexcept { return natural_; }
    [[nodiscard]] Unit unit() const noexcept { return unit_; }
    [[nodiscard]] const std::map<std::string, std::vector<double>>& constituents() const noexcept {
        return constituents_;
    }

    [[nodiscard]] double anthropogenic_at(int year) const { return anthropogenic_[index(year)]; }
    [[nodiscard]] double natural_at(int year) const { return natural_[index(year)]; }

private:
    [[nodiscard]] std::size_t index(int year) const {
        if (!covers(year)) {
            throw DataError("forcing table does not cover year " + std::to_string(year) + " (" +
                            std::to_string(start_year_) + "-" + std::to_string(end_year()) + ")");
        }
        return static_cast<std::size_t>(year - start_year_);
    }

    int start_year_;
    std::vector<double> anthropogenic_;
    std::vector<double> natural_;
    Unit unit_;
    std::map<std::string, std::vector<double>> constituents_;
};

/// Historical forcing spliced onto a future pathway.
struct Scenario {
    ForcingTable forcing;
    std::string label;
    int splice_year{};
    double anthropogenic_shift{};
};

}  // namespace ftrend
