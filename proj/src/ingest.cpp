#include "chirail/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chirail/csv.hpp"
#include "chirail/error.hpp"

namespace chirail {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(std::string(s), &pos);
    if (pos != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::string to_string(const Date& d) {
  std::ostringstream out;
  out << d.month << '/' << d.day << '/' << d.year;
  return out.str();
}

std::optional<Date> parse_date(std::string_view text) {
  const std::string t = trim(text);
  const auto s1 = t.find('/');
  if (s1 == std::string::npos) return std::nullopt;
  const auto s2 = t.find('/', s1 + 1);
  if (s2 == std::string::npos) return std::nullopt;
  const auto month = parse_int(std::string_view(t).substr(0, s1));
  const auto day = parse_int(std::string_view(t).substr(s1 + 1, s2 - s1 - 1));
  const auto year = parse_int(std::string_view(t).substr(s2 + 1));
  if (!month || !day || !year) return std::nullopt;
  if (s1 < 1 || s1 > 2 || s2 - s1 - 1 < 1 || s2 - s1 - 1 > 2) return std::nullopt;
  if (t.size() - s2 - 1 != 4) return std::nullopt;
  if (*month < 1 || *month > 12) return std::nullopt;
  if (*day < 1 || *day > days_in_month(*year, *month)) return std::nullopt;
  return Date{*year, *month, *day};
}

std::string normalize_place_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool at_word_start = true;
  bool pending_space = false;
  for (char c : raw) {
    if (c == '.') continue;
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
      at_word_start = true;
    }
    const auto uc = static_cast<unsigned char>(c);
    out += at_word_start ? static_cast<char>(std::toupper(uc))
                         : static_cast<char>(std::tolower(uc));
    at_word_start = false;
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

namespace {

int require_column(const DelimitedTable& table, const std::string& name,
                   const std::string& fallback = {}) {
  int col = table.column(name);
  if (col < 0 && !fallback.empty()) col = table.column(fallback);
  if (col < 0) {
    throw ConfigError("missing required column '" + name + "'");
  }
  return col;
}

}  // namespace

ParsedCases parse_case_records(std::string_view raw_table,
                               const SchemaConfig& schema) {
  const DelimitedTable table = parse_delimited(raw_table);
  const int date_col = require_column(table, schema.date);
  const int county_col = require_column(table, schema.county);
  const int city_col = require_column(table, schema.city);
  const int history_col = require_column(
      table, schema.history, schema.history == "histroy" ? "history" : "");
  const int id_col = table.column(schema.id);

  ParsedCases out;
  int row_index = 0;
  for (const auto& row : table.rows) {
    ++row_index;
    auto cell = [&](int col) -> std::string {
      return col >= 0 && col < static_cast<int>(row.size()) ? row[col]
                                                            : std::string{};
    };
    int id = row_index;
    if (id_col >= 0) {
      if (const auto v = parse_int(trim(cell(id_col)))) id = *v;
    }

    const auto date = parse_date(cell(date_col));
    if (!date) {
      out.issues.push_back({id, "date_announced", "bad_date",
                            "unparseable date '" + trim(cell(date_col)) + "'"});
      continue;
    }
    const std::string county = normalize_place_name(cell(county_col));
    if (county.empty()) {
      out.issues.push_back({id, "county", "missing_county", "county is empty"});
      continue;
    }

    CaseRecord rec;
    rec.id = id;
    rec.date_announced = *date;
    rec.county = county;
    const std::string city = normalize_place_name(cell(city_col));
    if (!city.empty() && to_lower(city) != "unknown") rec.city = city;
    rec.history_text = trim(to_lower(cell(history_col)));
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string serialize_case_records(const std::vector<CaseRecord>& records) {
  std::ostringstream out;
  out << "id,data_announced,COUNTY,CITY,histroy\n";
  for (const auto& r : records) {
    out << r.id << ',' << to_string(r.date_announced) << ','
        << csv_escape(r.county) << ','
        << csv_escape(r.city ? *r.city : std::string("Unknown")) << ','
        << csv_escape(r.history_text) << '\n';
  }
  return out.str();
}

std::string to_string(PlaceKind kind) {
  switch (kind) {
    case PlaceKind::City: return "city";
    case PlaceKind::Landmark: return "landmark";
    case PlaceKind::Facility: return "facility";
  }
  return "city";
}

std::optional<PlaceKind> parse_place_kind(std::string_view s) {
  const std::string t = to_lower(trim(s));
  if (t == "city") return PlaceKind::City;
  if (t == "landmark") return PlaceKind::Landmark;
  if (t == "facility") return PlaceKind::Facility;
  return std::nullopt;
}

void Gazetteer::add(GazetteerEntry entry) {
  const std::size_t idx = entries_.size();
  std::vector<std::string> keys;
  keys.push_back(to_lower(entry.canonical_name));
  for (const auto& a : entry.aliases) keys.push_back(to_lower(a));
  for (const auto& key : keys) {
    const auto it = index_.find(key);
    if (it != index_.end()) {
      throw InputError("gazetteer name collision on '" + key + "' between '" +
                       entries_[it->second].canonical_name + "' and '" +
                       entry.canonical_name + "'");
    }
  }
  for (const auto& key : keys) index_.emplace(key, idx);
  entries_.push_back(std::move(entry));
}

const GazetteerEntry* Gazetteer::lookup(std::string_view name) const {
  const auto it = index_.find(to_lower(name));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::optional<GeoPoint> Gazetteer::county_centroid(
    std::string_view normalized_county) const {
  double lat = 0.0, lon = 0.0;
  int n_cities = 0, n_any = 0;
  double any_lat = 0.0, any_lon = 0.0;
  for (const auto& e : entries_) {
    if (!e.county || *e.county != normalized_county) continue;
    any_lat += e.location.lat;
    any_lon += e.location.lon;
    ++n_any;
    if (e.kind == PlaceKind::City) {
      lat += e.location.lat;
      lon += e.location.lon;
      ++n_cities;
    }
  }
  if (n_cities > 0) return GeoPoint{lat / n_cities, lon / n_cities};
  if (n_any > 0) return GeoPoint{any_lat / n_any, any_lon / n_any};
  return std::nullopt;
}

Gazetteer load_gazetteer(std::string_view raw_table) {
  const DelimitedTable table = parse_delimited(raw_table);
  const int name_col = require_column(table, "canonical_name");
  const int alias_col = require_column(table, "aliases");
  const int kind_col = require_column(table, "kind");
  const int county_col = require_column(table, "county");
  const int lat_col = require_column(table, "lat");
  const int lon_col = require_column(table, "lon");

  Gazetteer gaz;
  for (const auto& row : table.rows) {
    auto cell = [&](int col) -> std::string {
      return col < static_cast<int>(row.size()) ? row[col] : std::string{};
    };
    GazetteerEntry entry;
    entry.canonical_name = trim(cell(name_col));
    if (entry.canonical_name.empty()) {
      throw InputError("gazetteer row with empty canonical_name");
    }
    std::stringstream aliases(cell(alias_col));
    std::string alias;
    while (std::getline(aliases, alias, ';')) {
      const std::string t = trim(alias);
      if (!t.empty()) entry.aliases.push_back(t);
    }
    const auto kind = parse_place_kind(cell(kind_col));
    if (!kind) {
      throw InputError("gazetteer entry '" + entry.canonical_name +
                       "' has unknown kind '" + trim(cell(kind_col)) + "'");
    }
    entry.kind = *kind;
    const std::string county = normalize_place_name(cell(county_col));
    if (!county.empty()) entry.county = county;
    const auto lat = parse_double(trim(cell(lat_col)));
    const auto lon = parse_double(trim(cell(lon_col)));
    if (!lat || !lon || *lat < -90.0 || *lat > 90.0 || *lon < -180.0 ||
        *lon > 180.0) {
      throw InputError("gazetteer entry '" + entry.canonical_name +
                       "' has out-of-range coordinates");
    }
    entry.location = GeoPoint{*lat, *lon};
    gaz.add(std::move(entry));
  }
  return gaz;
}

BoundingBox default_study_region() {
  return BoundingBox{41.2, -88.5, 42.5, -87.2};
}

namespace {

void append_polyline(std::vector<RailLine>& out, const std::string& line_id,
                     std::vector<GeoPoint> vertices, const BoundingBox& region) {
  // drop consecutive duplicates
  std::vector<GeoPoint> distinct;
  for (const auto& v : vertices) {
    if (distinct.empty() || !(distinct.back() == v)) distinct.push_back(v);
  }
  if (distinct.size() < 2) {
    throw InputError("rail line '" + line_id +
                     "' has fewer than 2 distinct vertices");
  }
  for (const auto& v : distinct) {
    if (!is_valid(v) || !region.contains(v)) {
      throw InputError("rail line '" + line_id + "' has vertex (" +
                       std::to_string(v.lat) + ", " + std::to_string(v.lon) +
                       ") outside the study region");
    }
  }
  out.push_back(RailLine{line_id, std::move(distinct)});
}

std::vector<RailLine> load_rail_geojson(std::string_view text,
                                        const BoundingBox& region) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("rail geometry is not valid JSON: ") + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection") {
    throw InputError("rail GeoJSON must be a FeatureCollection");
  }
  std::vector<RailLine> out;
  for (const auto& feature : doc.value("features", nlohmann::json::array())) {
    const auto& props = feature.value("properties", nlohmann::json::object());
    std::string line_id;
    for (const char* key : {"line_id", "id", "name"}) {
      if (props.contains(key) && props[key].is_string()) {
        line_id = props[key].get<std::string>();
        break;
      }
    }
    if (line_id.empty()) {
      throw InputError("rail feature without a line-id property");
    }
    const auto& geom = feature.value("geometry", nlohmann::json::object());
    const std::string type = geom.value("type", "");
    auto to_points = [&](const nlohmann::json& coords) {
      std::vector<GeoPoint> pts;
      for (const auto& c : coords) {
        if (!c.is_array() || c.size() < 2) {
          throw InputError("rail line '" + line_id + "' has a malformed coordinate");
        }
        pts.push_back(GeoPoint{c[1].get<double>(), c[0].get<double>()});
      }
      return pts;
    };
    if (type == "LineString") {
      append_polyline(out, line_id, to_points(geom["coordinates"]), region);
    } else if (type == "MultiLineString") {
      const auto& parts = geom["coordinates"];
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string part_id =
            parts.size() == 1 ? line_id : line_id + ":" + std::to_string(i + 1);
        append_polyline(out, part_id, to_points(parts[i]), region);
      }
    } else {
      throw InputError("rail feature '" + line_id +
                       "' has unsupported geometry type '" + type + "'");
    }
  }
  return out;
}

std::vector<RailLine> load_rail_gtfs(std::string_view text,
                                     const BoundingBox& region) {
  const DelimitedTable table = parse_delimited(text);
  const int id_col = require_column(table, "shape_id");
  const int lat_col = table.column("shape_pt_lat") >= 0
                          ? table.column("shape_pt_lat")
                          : require_column(table, "lat");
  const int lon_col = table.column("shape_pt_lon") >= 0
                          ? table.column("shape_pt_lon")
                          : require_column(table, "lon");
  const int seq_col = table.column("shape_pt_sequence") >= 0
                          ? table.column("shape_pt_sequence")
                          : require_column(table, "sequence");

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<int, GeoPoint>>> shapes;
  for (const auto& row : table.rows) {
    auto cell = [&](int col) -> std::string {
      return col < static_cast<int>(row.size()) ? row[col] : std::string{};
    };
    const std::string id = trim(cell(id_col));
    const auto lat = parse_double(trim(cell(lat_col)));
    const auto lon = parse_double(trim(cell(lon_col)));
    const auto seq = parse_int(trim(cell(seq_col)));
    if (id.empty() || !lat || !lon || !seq) {
      throw InputError("malformed GTFS shapes row for shape '" + id + "'");
    }
    if (shapes.find(id) == shapes.end()) order.push_back(id);
    shapes[id].emplace_back(*seq, GeoPoint{*lat, *lon});
  }
  std::vector<RailLine> out;
  for (const auto& id : order) {
    auto& pts = shapes[id];
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<GeoPoint> vertices;
    vertices.reserve(pts.size());
    for (const auto& [seq, p] : pts) vertices.push_back(p);
    append_polyline(out, id, std::move(vertices), region);
  }
  return out;
}

}  // namespace

std::vector<RailLine> load_rail_lines(std::string_view geometry_input,
                                      const BoundingBox& region) {
  const auto first = geometry_input.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    throw InputError("rail geometry input is empty");
  }
  if (geometry_input[first] == '{' || geometry_input[first] == '[') {
    return load_rail_geojson(geometry_input, region);
  }
  return load_rail_gtfs(geometry_input, region);
}

}  // namespace chirail
