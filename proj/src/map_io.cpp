#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "patrol/error.hpp"
#include "patrol/io.hpp"
#include "patrol/terrain.hpp"

namespace patrol {

using nlohmann::ordered_json;

namespace {

constexpr const char* kMapFormat = "patrol-map";
constexpr int kMapVersion = 1;

void reject_unknown(const ordered_json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw Error(ErrorCode::kParseError, where + ": unknown field '" + it.key() + "'");
    }
  }
}

std::int64_t int_field(const ordered_json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw Error(ErrorCode::kParseError, where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw Error(ErrorCode::kParseError, where + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

bool flag_field(const ordered_json& obj, const char* key, const std::string& where) {
  const auto v = int_field(obj, key, where);
  if (v != 0 && v != 1) throw Error(ErrorCode::kParseError, where + "." + key + ": expected 0 or 1");
  return v == 1;
}

}  // namespace

std::string serialize_map(const GridMap& grid) {
  validate(grid);
  // One cell record per line keeps diffs and parse diagnostics readable.
  std::ostringstream out;
  out << "{\n";
  out << "  \"format\": \"" << kMapFormat << "\",\n";
  out << "  \"version\": " << kMapVersion << ",\n";
  out << "  \"rows\": " << grid.rows << ",\n";
  out << "  \"cols\": " << grid.cols << ",\n";
  out << "  \"cell_side_m\": " << ordered_json(grid.cell_side_m).dump() << ",\n";
  out << "  \"cells\": [\n";
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const Cell& c = grid.cells[i];
    out << "    {\"road\": " << (c.has_road ? 1 : 0) << ", \"crime\": " << c.crime_count
        << ", \"zone\": " << (c.in_zone ? 1 : 0) << "}" << (i + 1 < grid.cells.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

GridMap parse_map(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, describe_parse_error(text, e.byte, e.what()));
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "map: top level must be an object");
  reject_unknown(doc, {"format", "version", "rows", "cols", "cell_side_m", "cells"}, "map");
  if (!doc.contains("format") || doc.at("format") != kMapFormat) {
    throw Error(ErrorCode::kParseError, std::string("map.format: expected '") + kMapFormat + "'");
  }
  if (int_field(doc, "version", "map") != kMapVersion) {
    throw Error(ErrorCode::kParseError, "map.version: unsupported version");
  }
  GridMap grid;
  grid.rows = static_cast<int>(int_field(doc, "rows", "map"));
  grid.cols = static_cast<int>(int_field(doc, "cols", "map"));
  if (!doc.contains("cell_side_m") || !doc.at("cell_side_m").is_number()) {
    throw Error(ErrorCode::kParseError, "map.cell_side_m: expected a number");
  }
  grid.cell_side_m = doc.at("cell_side_m").get<double>();
  if (!doc.contains("cells") || !doc.at("cells").is_array()) {
    throw Error(ErrorCode::kParseError, "map.cells: expected an array");
  }
  const auto& cells = doc.at("cells");
  if (grid.rows <= 0 || grid.cols <= 0 ||
      static_cast<std::size_t>(grid.rows) * static_cast<std::size_t>(grid.cols) != cells.size()) {
    throw Error(ErrorCode::kParseError, "map.cells: expected rows*cols = " +
                                            std::to_string(static_cast<long long>(grid.rows) * grid.cols) +
                                            " records, found " + std::to_string(cells.size()));
  }
  grid.cells.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string where = "map.cells[" + std::to_string(i) + "]";
    const auto& rec = cells[i];
    if (!rec.is_object()) throw Error(ErrorCode::kParseError, where + ": expected an object");
    reject_unknown(rec, {"road", "crime", "zone"}, where);
    Cell cell;
    cell.has_road = flag_field(rec, "road", where);
    cell.crime_count = int_field(rec, "crime", where);
    cell.in_zone = flag_field(rec, "zone", where);
    grid.cells.push_back(cell);
  }
  validate(grid);
  return grid;
}

GridMap load_map(const std::filesystem::path& path) { return parse_map(read_text_file(path)); }

void save_map(const GridMap& grid, const std::filesystem::path& path) { write_text_file(path, serialize_map(grid)); }

}  // namespace patrol
