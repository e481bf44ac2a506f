// CSV output and parsing helpers.  Numbers are written with the shortest
// decimal form that round-trips to the same double, so a file read back in
// reproduces the original bits exactly.
#ifndef CAUSALBENCH_CORE_CSV_HPP
#define CAUSALBENCH_CORE_CSV_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace causalbench {

// Shortest round-trip decimal representation ("NA" never comes from here).
std::string format_double(double value);
std::string format_int(long long value);
std::string format_uint(unsigned long long value);

// Missing values are emitted as the literal token NA.
std::string format_optional(const std::optional<double>& value);

// Strict parsers: the whole token must be consumed.  parse_optional_double
// maps "NA" (and the empty token) to nullopt.
double parse_double(const std::string& token);
long long parse_int(const std::string& token);
std::uint64_t parse_uint(const std::string& token);
std::optional<double> parse_optional_double(const std::string& token);

// Minimal CSV layer: comma separator, no quoting (no field we emit ever
// contains a comma or newline), trailing '\n' per row.
std::string join_row(const std::vector<std::string>& fields);
std::vector<std::string> split_row(const std::string& line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace causalbench

#endif
