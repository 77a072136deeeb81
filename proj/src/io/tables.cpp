#include "gpvortex/io/tables.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gpvortex/errors.hpp"

namespace gpv::io {

namespace {

std::string fmt_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string fmt_machine(double v) { return fmt_g(v, 17); }
std::string fmt_human(double v) { return fmt_g(v, 6); }

void write_csv(std::ostream& os, const Table& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << quote(cells[k]);
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

void write_csv(const std::string& path, const Table& t) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ParameterError("cannot write " + path);
  write_csv(os, t);
}

Table parse_csv(std::istream& is) {
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    // a quoted cell may span lines; an odd quote count means the record continues
    for (std::string more; std::count(line.begin(), line.end(), '"') % 2 == 1 && std::getline(is, more);)
      line += '\n' + more;
    auto cells = split_line(line);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) throw ParameterError("CSV row width differs from the header");
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

Table read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("missing input artifact: " + path);
  return parse_csv(is);
}

void print_table(std::ostream& os, const Table& t) {
  std::vector<std::size_t> w(t.header.size(), 0);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = t.header[k].size();
  for (const auto& r : t.rows)
    for (std::size_t k = 0; k < r.size() && k < w.size(); ++k) w[k] = std::max(w[k], r[k].size());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) os << "  ";
      os << cells[k] << std::string(w[k] - cells[k].size(), ' ');
    }
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

void print_markdown(std::ostream& os, const Table& t) {
  os << '|';
  for (const auto& h : t.header) os << ' ' << h << " |";
  os << "\n|";
  for (std::size_t k = 0; k < t.header.size(); ++k) os << "---|";
  os << '\n';
  for (const auto& r : t.rows) {
    os << '|';
    for (const auto& c : r) os << ' ' << c << " |";
    os << '\n';
  }
}

}  // namespace gpv::io
