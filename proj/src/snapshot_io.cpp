#include "swarm/snapshot_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "swarm/config.hpp"

namespace fs = std::filesystem;

namespace swarm {

namespace {

constexpr const char* kColumns1d = "i,x1,rho,u1,l";
constexpr const char* kColumns2d = "i,j,x1,x2,rho,u1,u2,l";

const std::vector<std::string>& reserved_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k{"dim", "n1", "n2", "dx1", "dx2", "extent1", "extent2", "time", "step"};
    for (const char* p : kParamKeys) k.emplace_back(p);
    return k;
  }();
  return keys;
}

bool is_reserved(const std::string& key) {
  const auto& keys = reserved_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

struct ParsedFile {
  std::vector<std::pair<std::string, std::string>> header;
  Grid grid;
  ModelParams params;
  Snapshot snapshot;
};

std::string require(const std::vector<std::pair<std::string, std::string>>& header,
                    const std::string& key, const std::string& where) {
  for (const auto& [k, v] : header)
    if (k == key) return v;
  throw ParseError(where + ": missing header key '" + key + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

ParsedFile parse_file(const std::string& path) {
  const std::string text = read_text_file(path);
  ParsedFile f;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::vector<std::string> rows;
  std::vector<int> row_lines;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    if (raw[0] == '#') {
      const std::string body = trim(raw.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos)
        throw ParseError(path + ":" + std::to_string(line_no) + ": header line without '='");
      f.header.emplace_back(trim(body.substr(0, eq)), body.substr(eq + 1));
      continue;
    }
    rows.push_back(raw);
    row_lines.push_back(line_no);
  }

  const int dim = static_cast<int>(parse_int(require(f.header, "dim", path), "dim"));
  if (dim != 1 && dim != 2) throw ParseError(path + ": dim must be 1 or 2");
  Grid& g = f.grid;
  g.dim = dim;
  g.n = {static_cast<int>(parse_int(require(f.header, "n1", path), "n1")),
         static_cast<int>(parse_int(require(f.header, "n2", path), "n2"))};
  g.dx = {parse_double(require(f.header, "dx1", path), "dx1"),
          parse_double(require(f.header, "dx2", path), "dx2")};
  g.extent = {parse_double(require(f.header, "extent1", path), "extent1"),
              parse_double(require(f.header, "extent2", path), "extent2")};
  if (g.n[0] < 1 || g.n[1] < 1) throw ParseError(path + ": cell counts must be >= 1");
  for (const char* key : kParamKeys)
    set_param(f.params, key, parse_double(require(f.header, key, path), key));

  MacroState state(g, parse_double(require(f.header, "time", path), "time"));
  f.snapshot.step = static_cast<int>(parse_int(require(f.header, "step", path), "step"));

  const std::string columns = dim == 1 ? kColumns1d : kColumns2d;
  std::size_t first = 0;
  if (!rows.empty() && rows[0] == columns) first = 1;
  const std::size_t expected = g.cells();
  if (rows.size() - first != expected)
    throw ParseError(path + ": expected " + std::to_string(expected) + " data rows, found " +
                     std::to_string(rows.size() - first));
  const std::size_t width = dim == 1 ? 5 : 8;
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto cells = split_csv(rows[r]);
    const std::string where = path + ":" + std::to_string(row_lines[r]);
    if (cells.size() != width)
      throw ParseError(where + ": expected " + std::to_string(width) + " columns");
    const int i = static_cast<int>(parse_int(cells[0], where + " i"));
    const int j = dim == 2 ? static_cast<int>(parse_int(cells[1], where + " j")) : 0;
    if (i < 0 || i >= g.n[0] || j < 0 || j >= g.n[1])
      throw ParseError(where + ": cell index out of range");
    const std::size_t k = g.index(i, j);
    const std::size_t base = dim == 1 ? 2 : 4;
    state.rho[k] = parse_double(cells[base], where + " rho");
    state.u[0][k] = parse_double(cells[base + 1], where + " u1");
    if (dim == 2) state.u[1][k] = parse_double(cells[base + 2], where + " u2");
    state.l[k] = parse_double(cells[base + dim + 1], where + " l");
  }
  f.snapshot.state = std::move(state);
  return f;
}

}  // namespace

std::string format_snapshot(const SnapshotSeries& series, std::size_t index) {
  const Snapshot& snap = series.snapshots.at(index);
  const Grid& g = series.grid;
  std::ostringstream out;
  out << "# dim=" << g.dim << '\n'
      << "# n1=" << g.n[0] << '\n'
      << "# n2=" << g.n[1] << '\n'
      << "# dx1=" << format_double17(g.dx[0]) << '\n'
      << "# dx2=" << format_double17(g.dx[1]) << '\n'
      << "# extent1=" << format_double17(g.extent[0]) << '\n'
      << "# extent2=" << format_double17(g.extent[1]) << '\n'
      << "# time=" << format_double17(snap.state.t) << '\n'
      << "# step=" << snap.step << '\n';
  for (const char* key : kParamKeys)
    out << "# " << key << '=' << format_double17(get_param(series.params, key)) << '\n';
  for (const auto& [k, v] : series.metadata) {
    if (is_reserved(k)) continue;
    out << "# " << k << '=' << v << '\n';
  }
  out << (g.dim == 1 ? kColumns1d : kColumns2d) << '\n';
  const MacroState& s = snap.state;
  for (int j = 0; j < g.n[1]; ++j) {
    for (int i = 0; i < g.n[0]; ++i) {
      const std::size_t k = g.index(i, j);
      out << i << ',';
      if (g.dim == 2) out << j << ',';
      out << format_double17(g.x1(i)) << ',';
      if (g.dim == 2) out << format_double17(g.x2(j)) << ',';
      out << format_double17(s.rho[k]) << ',' << format_double17(s.u[0][k]) << ',';
      if (g.dim == 2) out << format_double17(s.u[1][k]) << ',';
      out << format_double17(s.l[k]) << '\n';
    }
  }
  return out.str();
}

void write_snapshot(const SnapshotSeries& series, const std::string& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error("cannot create directory '" + directory + "': " + ec.message());
  for (const auto& entry : fs::directory_iterator(directory)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("snap_", 0) == 0 && entry.path().extension() == ".csv") fs::remove(entry.path());
  }
  for (std::size_t k = 0; k < series.snapshots.size(); ++k) {
    const fs::path path = fs::path(directory) / ("snap_" + std::to_string(series.snapshots[k].step) + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << format_snapshot(series, k);
    if (!out) throw Error("write failed for '" + path.string() + "'");
  }
}

SnapshotSeries read_snapshot(const std::string& path) {
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("snap_", 0) == 0 && entry.path().extension() == ".csv")
        files.push_back(entry.path().string());
    }
    if (files.empty()) throw ParseError("no snap_*.csv files in '" + path + "'");
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw Error("no such file or directory: '" + path + "'");
  }

  std::vector<ParsedFile> parsed;
  parsed.reserve(files.size());
  for (const auto& f : files) parsed.push_back(parse_file(f));
  std::sort(parsed.begin(), parsed.end(),
            [](const ParsedFile& a, const ParsedFile& b) { return a.snapshot.step < b.snapshot.step; });

  SnapshotSeries series;
  series.grid = parsed.front().grid;
  series.params = parsed.front().params;
  for (const auto& [k, v] : parsed.front().header)
    if (!is_reserved(k)) series.metadata.emplace_back(k, v);
  for (auto& p : parsed) {
    if (!(p.grid == series.grid)) throw ParseError("snapshots in '" + path + "' use different grids");
    series.snapshots.push_back(std::move(p.snapshot));
  }
  return series;
}

}  // namespace swarm
