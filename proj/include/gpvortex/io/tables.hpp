#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gpv::io {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// 17 significant digits, round-trippable.
std::string fmt_machine(double v);
// 6 significant digits for terminal tables.
std::string fmt_human(double v);

void write_csv(const std::string& path, const Table& t);
void write_csv(std::ostream& os, const Table& t);
Table read_csv(const std::string& path);
Table parse_csv(std::istream& is);

// Column-aligned text rendering.
void print_table(std::ostream& os, const Table& t);
// GitHub-flavoured markdown rendering.
void print_markdown(std::ostream& os, const Table& t);

}  // namespace gpv::io
