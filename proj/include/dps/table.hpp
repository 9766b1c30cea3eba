#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace dps {

using Cell = std::variant<std::int64_t, double, std::string, bool>;

/// Long-format result table. Column names carry their unit as a suffix,
/// e.g. "tx_packets" or "energy_J".
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

enum class TableFormat { csv, json };

TableFormat parse_table_format(const std::string& name);

/// Doubles are printed in shortest round-trip form, so equal tables give
/// byte-identical output.
void write_csv(std::ostream& out, const Table& table);

/// An array of objects keyed by column name.
void write_json(std::ostream& out, const Table& table);

void write_table(std::ostream& out, const Table& table, TableFormat format);

} // namespace dps
