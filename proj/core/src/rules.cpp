#include "caedge/rules.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace caedge {

int neighborhood_cells(int radius) {
    if (radius < 1) throw std::invalid_argument("neighborhood_cells: radius must be >= 1");
    const int side = 2 * radius + 1;
    return side * side;
}

std::uint64_t max_rule(int radius) {
    if (radius < 1 || radius > 2)
        throw std::invalid_argument("max_rule: supported radii are 1 and 2");
    return (std::uint64_t{1} << neighborhood_cells(radius)) - 1;
}

const NumberingTable& default_numbering(int radius) {
    // bit 0 is the center; each ring is walked clockwise starting from due east
    static const NumberingTable inner = {
        {0, 0},  {0, 1},  {1, 1},  {1, 0}, {1, -1},
        {0, -1}, {-1, -1}, {-1, 0}, {-1, 1},
    };
    static const NumberingTable outer = [] {
        NumberingTable t = inner;
        const NumberingTable ring = {
            {0, 2},   {1, 2},   {2, 2},   {2, 1},  {2, 0},  {2, -1},  {2, -2},  {1, -2},
            {0, -2},  {-1, -2}, {-2, -2}, {-2, -1}, {-2, 0}, {-2, 1}, {-2, 2},  {-1, 2},
        };
        t.insert(t.end(), ring.begin(), ring.end());
        return t;
    }();

    if (radius == 1) return inner;
    if (radius == 2) return outer;
    throw std::invalid_argument("default_numbering: supported radii are 1 and 2");
}

namespace {

void validate_table(const NumberingTable& table, int radius) {
    if (static_cast<int>(table.size()) != neighborhood_cells(radius))
        throw std::invalid_argument("numbering table size does not match radius");
    std::set<std::pair<int, int>> seen;
    for (const auto& cell : table) {
        if (cell.dy < -radius || cell.dy > radius || cell.dx < -radius || cell.dx > radius)
            throw std::invalid_argument("numbering table offset outside neighborhood");
        if (!seen.insert({cell.dy, cell.dx}).second)
            throw std::invalid_argument("numbering table has duplicate offsets");
    }
}

}  // namespace

bool RuleMask::contains(int dy, int dx) const {
    return std::find(offsets.begin(), offsets.end(), CellOffset{dy, dx}) != offsets.end();
}

RuleMask decode_rule(std::uint64_t rule_number, int radius, const NumberingTable& table) {
    validate_table(table, radius);
    if (rule_number > max_rule(radius))
        throw std::invalid_argument("decode_rule: rule number exceeds neighborhood capacity");

    RuleMask mask;
    mask.radius = radius;
    mask.rule_number = rule_number;
    for (std::size_t bit = 0; bit < table.size(); ++bit)
        if (rule_number >> bit & 1) mask.offsets.push_back(table[bit]);
    return mask;
}

RuleMask decode_rule(std::uint64_t rule_number, int radius) {
    return decode_rule(rule_number, radius, default_numbering(radius));
}

std::uint64_t encode_rule(const std::vector<CellOffset>& offsets, int radius,
                          const NumberingTable& table) {
    validate_table(table, radius);
    std::uint64_t rule = 0;
    for (const auto& cell : offsets) {
        const auto it = std::find(table.begin(), table.end(), cell);
        if (it == table.end())
            throw std::invalid_argument("encode_rule: offset not present in numbering table");
        rule |= std::uint64_t{1} << (it - table.begin());
    }
    return rule;
}

std::uint64_t encode_rule(const std::vector<CellOffset>& offsets, int radius) {
    return encode_rule(offsets, radius, default_numbering(radius));
}

NumberingTable load_numbering(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open numbering table");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    if (!doc.is_array() || doc.empty())
        throw std::runtime_error(path + ": expected a non-empty JSON array");

    const int cells = static_cast<int>(doc.size());
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cells))));
    if (side * side != cells || side < 3 || side > 5 || side % 2 == 0)
        throw std::runtime_error(path + ": entry count must describe a radius-1 or radius-2 neighborhood");
    const int radius = side / 2;

    NumberingTable table(cells, CellOffset{0, 0});
    std::vector<bool> assigned(cells, false);
    for (const auto& item : doc) {
        if (!item.is_array() || item.size() != 3)
            throw std::runtime_error(path + ": each entry must be [bit, dy, dx]");
        const int bit = item[0].get<int>();
        if (bit < 0 || bit >= cells)
            throw std::runtime_error(path + ": bit index out of range");
        if (assigned[bit]) throw std::runtime_error(path + ": duplicate bit index");
        table[bit] = {item[1].get<int>(), item[2].get<int>()};
        assigned[bit] = true;
    }
    if (!std::all_of(assigned.begin(), assigned.end(), [](bool b) { return b; }))
        throw std::runtime_error(path + ": table does not cover every bit");
    if (!(table[0] == CellOffset{0, 0}))
        throw std::runtime_error(path + ": bit 0 must be the center cell");
    try {
        validate_table(table, radius);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return table;
}

void save_numbering(const std::string& path, const NumberingTable& table) {
    nlohmann::json doc = nlohmann::json::array();
    for (std::size_t bit = 0; bit < table.size(); ++bit)
        doc.push_back({bit, table[bit].dy, table[bit].dx});
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << doc.dump(2) << '\n';
}

}  // namespace caedge
