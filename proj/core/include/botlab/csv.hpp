#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace botlab::csv {

// Shortest-safe round-trip text: 17 significant digits, '.' decimal point
// regardless of the global locale.
std::string format(double value);

std::vector<std::string> split(std::string_view line, char sep = ',');

double parse_double(std::string_view text);

// Reads one line without the trailing '\r'. Returns false at end of input.
bool read_line(std::istream& in, std::string& line);

}  // namespace botlab::csv
