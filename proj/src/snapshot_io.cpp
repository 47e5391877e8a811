#include "netcpd/snapshot_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace netcpd {
namespace {

bool content_line(const std::string& line) {
  for (char c : line) {
    if (c == '#') return false;
    if (!std::isspace(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

int to_int(const std::string& tok, int line_no) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": expected integer, got '" +
                             tok + "'");
  }
  return v;
}

std::vector<AdjacencySnapshot> read_dense(std::istream& in) {
  std::string line;
  int line_no = 0;
  int n = -1;
  int horizon = -1;
  std::vector<AdjacencySnapshot> out;
  Matrix current;
  int row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!content_line(line)) continue;
    const auto toks = tokens(line);
    if (n < 0) {
      if (toks.size() != 2) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": expected header 'n T'");
      }
      n = to_int(toks[0], line_no);
      horizon = to_int(toks[1], line_no);
      if (n < 1 || horizon < 0) throw std::runtime_error("invalid header dimensions");
      out.reserve(static_cast<std::size_t>(horizon));
      current = Matrix::Zero(n, n);
      continue;
    }
    if (static_cast<int>(out.size()) >= horizon) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": more blocks than header T");
    }
    if (static_cast<int>(toks.size()) != n) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(n) + " entries");
    }
    for (int j = 0; j < n; ++j) {
      const int v = to_int(toks[static_cast<std::size_t>(j)], line_no);
      if (v != 0 && v != 1) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": entry is not 0/1");
      }
      current(row, j) = v;
    }
    if (++row == n) {
      out.push_back(make_snapshot(current, static_cast<int>(out.size()) + 1));
      row = 0;
    }
  }
  if (n < 0) throw std::runtime_error("snapshot file: missing header");
  if (row != 0 || static_cast<int>(out.size()) != horizon) {
    throw std::runtime_error("snapshot file: expected " + std::to_string(horizon) +
                             " complete blocks, found " + std::to_string(out.size()));
  }
  return out;
}

std::vector<AdjacencySnapshot> read_edges(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::optional<std::pair<int, int>> header;
  std::vector<std::tuple<int, int, int>> edges;
  int max_node = 0;
  int max_t = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!content_line(line)) continue;
    const auto toks = tokens(line);
    if (first && toks.size() == 2) {
      header = {to_int(toks[0], line_no), to_int(toks[1], line_no)};
      first = false;
      continue;
    }
    first = false;
    if (toks.size() != 3) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 't i j'");
    }
    const int t = to_int(toks[0], line_no);
    const int i = to_int(toks[1], line_no);
    const int j = to_int(toks[2], line_no);
    if (t < 1 || i < 1 || j < 1) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": indices are 1-based");
    }
    if (i == j) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": self-loops are not allowed");
    }
    edges.emplace_back(t, i, j);
    max_node = std::max({max_node, i, j});
    max_t = std::max(max_t, t);
  }
  const int n = header ? header->first : max_node;
  const int horizon = header ? header->second : max_t;
  if (max_node > n || max_t > horizon) {
    throw std::runtime_error("edge list: index exceeds header dimensions");
  }
  if (n < 1) throw std::runtime_error("edge list: no nodes");
  std::vector<AdjacencySnapshot> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) out.push_back({t, Matrix::Zero(n, n)});
  for (const auto& [t, i, j] : edges) {
    Matrix& m = out[static_cast<std::size_t>(t - 1)].entries;
    m(i - 1, j - 1) = 1.0;
    m(j - 1, i - 1) = 1.0;
  }
  return out;
}

}  // namespace

std::vector<AdjacencySnapshot> read_snapshots(std::istream& in, SnapshotFormat format) {
  return format == SnapshotFormat::dense ? read_dense(in) : read_edges(in);
}

std::vector<AdjacencySnapshot> read_snapshot_file(const std::string& path,
                                                  SnapshotFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_snapshots(in, format);
}

void write_snapshots(std::ostream& out, const std::vector<AdjacencySnapshot>& snapshots) {
  const int n = snapshots.empty() ? 0 : snapshots.front().n();
  out << n << ' ' << snapshots.size() << '\n';
  std::string row;
  for (const auto& s : snapshots) {
    if (s.n() != n) throw std::invalid_argument("write_snapshots: mixed dimensions");
    for (int i = 0; i < n; ++i) {
      row.clear();
      for (int j = 0; j < n; ++j) {
        if (j) row.push_back(' ');
        row.push_back(s.entries(i, j) != 0.0 ? '1' : '0');
      }
      row.push_back('\n');
      out << row;
    }
  }
}

void write_snapshot_file(const std::string& path,
                         const std::vector<AdjacencySnapshot>& snapshots) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_snapshots(out, snapshots);
}

}  // namespace netcpd
