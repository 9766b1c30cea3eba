#include "dps/table.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dps {

namespace {

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

} // namespace

void Table::add_row(std::vector<Cell> row)
{
    if (row.size() != columns.size()) {
        throw std::logic_error("row has " + std::to_string(row.size()) + " cells for " +
                               std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

TableFormat parse_table_format(const std::string& name)
{
    if (name == "csv") {
        return TableFormat::csv;
    }
    if (name == "json") {
        return TableFormat::json;
    }
    throw std::invalid_argument("unknown output format '" + name + "' (csv or json)");
}

void write_csv(std::ostream& out, const Table& table)
{
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << csv_escape(table.columns[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "");
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        out << format_double(v);
                    } else if constexpr (std::is_same_v<T, std::string>) {
                        out << csv_escape(v);
                    } else if constexpr (std::is_same_v<T, bool>) {
                        out << (v ? "true" : "false");
                    } else {
                        out << v;
                    }
                },
                row[i]);
        }
        out << '\n';
    }
}

void write_json(std::ostream& out, const Table& table)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        // JSON has no NaN or infinity
                        obj[table.columns[i]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr;
                    } else {
                        obj[table.columns[i]] = v;
                    }
                },
                row[i]);
        }
        arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
}

void write_table(std::ostream& out, const Table& table, TableFormat format)
{
    if (format == TableFormat::csv) {
        write_csv(out, table);
    } else {
        write_json(out, table);
    }
}

} // namespace dps
