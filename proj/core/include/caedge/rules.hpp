#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace caedge {

/// Neighborhood cell as (dy, dx) relative to the center, y growing downwards.
struct CellOffset {
    int dy = 0;
    int dx = 0;

    bool operator==(const CellOffset&) const = default;
    auto operator<=>(const CellOffset&) const = default;
};

/// Assignment of rule bits to neighborhood cells: table[bit] is the cell whose
/// value is 2^bit. Bit 0 must be the center cell (0,0); together the entries
/// must cover the full Moore neighborhood of the radius exactly once.
using NumberingTable = std::vector<CellOffset>;

/// (2r+1)^2, the Moore neighborhood size including the center.
int neighborhood_cells(int radius);

/// Largest rule number for a radius: 2^((2r+1)^2) - 1.
/// Only radii 1 and 2 are supported; anything else throws std::invalid_argument.
std::uint64_t max_rule(int radius);

/// Built-in numbering. Center is bit 0; the inner ring follows clockwise from
/// east at bit 1; for radius 2 the outer ring continues clockwise from (0,2)
/// at bit 9.
const NumberingTable& default_numbering(int radius);

/// The cells a rule selects, together with the rule number that produced them.
struct RuleMask {
    int radius = 1;
    std::uint64_t rule_number = 0;
    std::vector<CellOffset> offsets;  // ordered by bit index

    bool contains(int dy, int dx) const;
};

/// Expands rule number z into its cell set: bit b of z selects table[b].
/// Throws std::invalid_argument if z exceeds max_rule(radius).
RuleMask decode_rule(std::uint64_t z, int radius);
RuleMask decode_rule(std::uint64_t z, int radius, const NumberingTable& table);

/// Inverse of decode_rule: sums the cell values of the given offsets.
/// Unknown offsets throw std::invalid_argument.
std::uint64_t encode_rule(const std::vector<CellOffset>& offsets, int radius);
std::uint64_t encode_rule(const std::vector<CellOffset>& offsets, int radius, const NumberingTable& table);

/// Numbering tables serialize as a JSON array of [bit, dy, dx] triples.
/// load_numbering validates the bijection (and that bit 0 is the center).
NumberingTable load_numbering(const std::string& path);
void save_numbering(const std::string& path, const NumberingTable& table);

}  // namespace caedge
