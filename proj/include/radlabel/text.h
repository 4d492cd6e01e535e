#ifndef RADLABEL_TEXT_H_
#define RADLABEL_TEXT_H_

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace radlabel {

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);

struct Token {
  std::string text;  // lowercased
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Maximal runs of ASCII letters and digits, lowercased. Everything else is a
// separator, so "gravity-dependent" yields two tokens.
std::vector<Token> word_tokens(std::string_view text);

// Reads RFC-4180 CSV: quoted fields may hold commas, quotes ("") and line
// breaks. Each record also reports the 1-based line it started on.
struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};
std::vector<CsvRecord> read_csv(std::istream &in);

// Quotes a field only when it needs it.
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream &out, const std::vector<std::string> &fields);

// Fixed six-decimal rendering used by every CSV writer.
std::string format_fixed(double value);

}  // namespace radlabel

#endif  // RADLABEL_TEXT_H_
