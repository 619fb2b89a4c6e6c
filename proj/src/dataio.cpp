#include "ivafuse/dataio.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ivafuse::dataio {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string where(const std::filesystem::path& path, std::size_t line, std::size_t col) {
  std::ostringstream os;
  os << path.string() << ":" << line;
  if (col > 0) os << ":" << col;
  return os.str();
}

// Reads a header + rows CSV whose first column is "id".
struct RawCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

RawCsv read_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  RawCsv csv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    if (csv.header.empty()) {
      csv.header = std::move(cells);
      if (csv.header.front() != "id") {
        throw ParseError(where(path, lineno, 1) + ": first header cell must be \"id\"", lineno, 1);
      }
      continue;
    }
    if (cells.size() != csv.header.size()) {
      throw ParseError(where(path, lineno, 0) + ": ragged row (" + std::to_string(cells.size()) +
                           " cells, header has " + std::to_string(csv.header.size()) + ")",
                       lineno, 0);
    }
    csv.rows.push_back(std::move(cells));
    csv.line_numbers.push_back(lineno);
  }
  if (csv.header.empty()) throw Error(path.string() + ": empty file");
  return csv;
}

}  // namespace

std::optional<int> atomic_number(std::string_view symbol) {
  static constexpr std::array<std::pair<std::string_view, int>, 11> kTable{{
      {"H", 1}, {"B", 5}, {"C", 6}, {"N", 7}, {"O", 8}, {"F", 9},
      {"P", 15}, {"S", 16}, {"Cl", 17}, {"Br", 35}, {"I", 53},
  }};
  for (const auto& [sym, z] : kTable) {
    if (sym == symbol) return z;
  }
  return std::nullopt;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

void validate(const FeatureTable& t) {
  if (t.data.rows() != static_cast<Index>(t.features.size())) {
    throw Error("table " + t.name + ": row count does not match feature labels");
  }
  if (t.data.cols() != static_cast<Index>(t.molecule_ids.size())) {
    throw Error("table " + t.name + ": column count does not match molecule ids");
  }
  if (!t.data.allFinite()) throw Error("table " + t.name + ": non-finite entry");
  std::unordered_set<std::string> seen;
  for (const auto& f : t.features) {
    if (!seen.insert(f).second) throw Error("table " + t.name + ": duplicate feature label " + f);
  }
}

FeatureTable load_feature_table(const std::filesystem::path& path, const std::string& name) {
  const RawCsv csv = read_csv(path);
  if (csv.rows.empty()) throw Error(path.string() + ": empty table");

  FeatureTable t;
  t.name = name;
  t.features.assign(csv.header.begin() + 1, csv.header.end());
  const auto d = static_cast<Index>(t.features.size());
  const auto n = static_cast<Index>(csv.rows.size());
  t.data.resize(d, n);
  t.molecule_ids.reserve(n);

  std::unordered_set<std::string> ids;
  for (Index j = 0; j < n; ++j) {
    const auto& row = csv.rows[j];
    const std::size_t lineno = csv.line_numbers[j];
    if (!ids.insert(row[0]).second) {
      throw ParseError(where(path, lineno, 1) + ": duplicate molecule id " + row[0], lineno, 1);
    }
    t.molecule_ids.push_back(row[0]);
    for (Index i = 0; i < d; ++i) {
      const auto v = parse_double(row[i + 1]);
      if (!v) {
        throw ParseError(where(path, lineno, i + 2) + ": non-numeric cell \"" + row[i + 1] + "\"",
                         lineno, i + 2);
      }
      t.data(i, j) = *v;
    }
  }
  validate(t);
  return t;
}

void write_feature_table(const std::filesystem::path& path, const FeatureTable& t) {
  validate(t);
  std::ostringstream os;
  os << "id";
  for (const auto& f : t.features) os << ',' << f;
  os << '\n';
  for (Index j = 0; j < t.size(); ++j) {
    os << t.molecule_ids[j];
    for (Index i = 0; i < t.dim(); ++i) os << ',' << format_double(t.data(i, j));
    os << '\n';
  }
  write_text(path, os.str());
}

GeometrySet load_xyz_set(const std::filesystem::path& path) {
  auto in = open_input(path);
  GeometrySet set;
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](std::string& out) {
    if (!std::getline(in, out)) return false;
    ++lineno;
    return true;
  };

  while (next(line)) {
    if (trim(line).empty()) continue;
    const std::size_t header_line = lineno;
    const auto count_text = trim(line);
    long count = 0;
    const auto [p, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc() || p != count_text.data() + count_text.size() || count < 1) {
      throw ParseError(where(path, lineno, 1) + ": expected positive atom count", lineno, 1);
    }
    Geometry g;
    if (!next(line)) {
      throw ParseError(where(path, lineno, 0) + ": missing comment line", lineno, 0);
    }
    g.id = std::string(trim(line));
    if (g.id.empty()) g.id = "mol" + std::to_string(set.molecules.size() + 1);

    for (long a = 0; a < count; ++a) {
      if (!next(line) || trim(line).empty()) {
        throw ParseError(where(path, lineno, 0) + ": block at line " + std::to_string(header_line) +
                             " claims " + std::to_string(count) + " atoms but provides " +
                             std::to_string(a),
                         lineno, 0);
      }
      std::istringstream fields{std::string(trim(line))};
      std::string sym, xs, ys, zs;
      fields >> sym >> xs >> ys >> zs;
      const auto z = atomic_number(sym);
      if (!z) throw ParseError(where(path, lineno, 1) + ": unknown element symbol \"" + sym + "\"", lineno, 1);
      Atom atom{sym, *z, {}};
      const std::array<const std::string*, 3> coords{&xs, &ys, &zs};
      for (int c = 0; c < 3; ++c) {
        const auto v = parse_double(*coords[c]);
        if (!v) {
          throw ParseError(where(path, lineno, c + 2) + ": non-numeric coordinate \"" + *coords[c] + "\"",
                           lineno, c + 2);
        }
        atom.position(c) = *v;
      }
      for (const auto& other : g.atoms) {
        if (other.position == atom.position) {
          throw ParseError(where(path, lineno, 0) + ": coincident atoms in molecule " + g.id, lineno, 0);
        }
      }
      g.atoms.push_back(std::move(atom));
    }
    set.molecules.push_back(std::move(g));
  }
  return set;
}

namespace {

// "name [units]" -> (name, units)
std::pair<std::string, std::string> split_units(std::string_view h) {
  std::string_view units;
  if (const auto lb = h.find('['); lb != std::string_view::npos && h.back() == ']') {
    units = h.substr(lb + 1, h.size() - lb - 2);
    h = trim(h.substr(0, lb));
  }
  return {std::string(h), std::string(units)};
}

}  // namespace

std::vector<std::string> label_columns(const std::filesystem::path& path) {
  const RawCsv csv = read_csv(path);
  std::vector<std::string> names;
  for (std::size_t c = 1; c < csv.header.size(); ++c) names.push_back(split_units(csv.header[c]).first);
  return names;
}

LabelVector load_labels(const std::filesystem::path& path, const std::string& property) {
  const RawCsv csv = read_csv(path);
  std::size_t col = 0;
  LabelVector out;
  for (std::size_t c = 1; c < csv.header.size(); ++c) {
    auto [name, units] = split_units(csv.header[c]);
    if (name == property) {
      col = c;
      out.units = units;
      break;
    }
  }
  if (col == 0) {
    std::string avail;
    for (std::size_t c = 1; c < csv.header.size(); ++c) avail += (c > 1 ? ", " : "") + split_units(csv.header[c]).first;
    throw Error(path.string() + ": unknown property \"" + property + "\"; available columns: " + avail);
  }
  out.property_name = property;
  out.values.resize(static_cast<Index>(csv.rows.size()));
  std::unordered_set<std::string> ids;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::size_t lineno = csv.line_numbers[r];
    const auto v = parse_double(csv.rows[r][col]);
    if (!v) {
      throw ParseError(where(path, lineno, col + 1) + ": missing or non-numeric value for " + property,
                       lineno, col + 1);
    }
    if (!ids.insert(csv.rows[r][0]).second) {
      throw ParseError(where(path, lineno, 1) + ": duplicate molecule id " + csv.rows[r][0], lineno, 1);
    }
    out.values(static_cast<Index>(r)) = *v;
    out.molecule_ids.push_back(csv.rows[r][0]);
  }
  return out;
}

std::vector<SmilesRecord> load_smiles_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<SmilesRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    SmilesRecord rec;
    if (const auto tab = t.find('\t'); tab != std::string_view::npos) {
      rec.smiles = std::string(trim(t.substr(0, tab)));
      rec.id = std::string(trim(t.substr(tab + 1)));
    } else {
      rec.smiles = std::string(t);
    }
    if (rec.id.empty()) rec.id = "mol" + std::to_string(lineno);
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

// Position of every target id within ids; with allow_extra, ids may hold
// more molecules than target.
std::vector<Index> permutation_to(const std::vector<std::string>& ids,
                                  const std::vector<std::string>& target, const std::string& what,
                                  bool allow_extra = false) {
  if (allow_extra ? ids.size() < target.size() : ids.size() != target.size()) {
    throw Error(what + ": molecule id sets differ (" + std::to_string(ids.size()) + " vs " +
                std::to_string(target.size()) + " ids)");
  }
  std::unordered_map<std::string, Index> pos;
  for (std::size_t i = 0; i < ids.size(); ++i) pos.emplace(ids[i], static_cast<Index>(i));
  std::vector<Index> perm;
  perm.reserve(target.size());
  for (const auto& id : target) {
    const auto it = pos.find(id);
    if (it == pos.end()) throw Error(what + ": molecule id " + id + " missing");
    perm.push_back(it->second);
  }
  return perm;
}

}  // namespace

FeatureTable select_columns(const FeatureTable& t, const std::vector<Index>& columns) {
  FeatureTable out;
  out.name = t.name;
  out.features = t.features;
  out.data.resize(t.dim(), static_cast<Index>(columns.size()));
  out.molecule_ids.reserve(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.data.col(static_cast<Index>(j)) = t.data.col(columns[j]);
    out.molecule_ids.push_back(t.molecule_ids[columns[j]]);
  }
  return out;
}

std::vector<FeatureTable> align_tables(std::vector<FeatureTable> tables) {
  if (tables.size() < 2) return tables;
  const auto& ref = tables.front().molecule_ids;
  for (std::size_t k = 1; k < tables.size(); ++k) {
    if (tables[k].molecule_ids == ref) continue;
    const auto perm = permutation_to(tables[k].molecule_ids, ref,
                                     "align " + tables[k].name + " to " + tables.front().name);
    tables[k] = select_columns(tables[k], perm);
  }
  return tables;
}

LabelVector align_labels(const LabelVector& labels, const std::vector<std::string>& ids) {
  if (labels.molecule_ids == ids) return labels;
  const auto perm = permutation_to(labels.molecule_ids, ids, "align labels " + labels.property_name, true);
  LabelVector out = labels;
  out.molecule_ids = ids;
  out.values.resize(static_cast<Index>(ids.size()));
  for (std::size_t i = 0; i < perm.size(); ++i) out.values(static_cast<Index>(i)) = labels.values(perm[i]);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace ivafuse::dataio
