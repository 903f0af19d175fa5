#ifndef FORRELAB_IO_HPP
#define FORRELAB_IO_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "forrelab/blockpoly.hpp"
#include "forrelab/estimators.hpp"
#include "forrelab/instances.hpp"

namespace forrelab {

// Value table: {"n": int, "values": [2^n reals]}.
std::string truth_table_to_json(const std::vector<double>& values);
std::vector<double> truth_table_from_json(const std::string& text);

// Function tuple: {"n": int, "k": int, "functions": [[...], ...]} plus an
// optional "label": "uniform" | "forrelated".
std::string tuple_to_json(const instance_tuple& t);
instance_tuple tuple_from_json(const std::string& text);

// Block polynomial: {"k": int, "block_sizes": [...],
//                    "terms": [{"vars": [k ints], "coef": real}, ...]}.
std::string blockpoly_to_json(const block_poly& p);
block_poly blockpoly_from_json(const std::string& text);

// Multilinear polynomial: {"n_vars": int,
//                          "terms": [{"vars": [...], "coef": real}, ...]}.
// Loading folds repeated variables in a term (x*x = 1 over +-1 inputs) and
// merges duplicate keys, so hand-written quadratics with diagonal entries
// load cleanly.
std::string multilinear_to_json(const multilinear_poly& p);
multilinear_poly multilinear_from_json(const std::string& text);

// Whole-file helpers; both throw io_error on filesystem failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Shortest representation that round-trips through a double.
std::string format_double(double v);

// RFC-4180-style assembly: fields containing commas, quotes or newlines are
// quoted, quotes doubled.  Every row must match the header width.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

// FNV-1a over the raw bytes; content_hash renders it as 16 hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string content_hash(std::string_view bytes);

}  // namespace forrelab

#endif  // FORRELAB_IO_HPP
