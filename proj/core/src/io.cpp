#include "forrelab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>

#include "forrelab/errors.hpp"
#include "forrelab/hadamard.hpp"
#include "json.hpp"

namespace forrelab {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw io_error(std::string("invalid JSON for ") + what);
  }
  return j;
}

std::vector<double> as_real_vector(const json& j, const char* what) {
  if (!j.is_array()) throw io_error(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw io_error(std::string(what) + " must contain numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> as_int_vector(const json& j, const char* what) {
  if (!j.is_array()) throw io_error(std::string(what) + " must be an array");
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw io_error(std::string(what) + " must contain integers only");
    out.push_back(v.get<int>());
  }
  return out;
}

const json& require(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw io_error(std::string(what) + " is missing the \"" + key + "\" field");
  }
  return *it;
}

}  // namespace

std::string truth_table_to_json(const std::vector<double>& values) {
  json j;
  j["n"] = checked_log2(values.size());
  j["values"] = values;
  return j.dump();
}

std::vector<double> truth_table_from_json(const std::string& text) {
  const json j = parse_json(text, "a value table");
  const auto& jn = require(j, "n", "a value table");
  if (!jn.is_number_integer()) throw io_error("\"n\" must be an integer");
  const int n = jn.get<int>();
  auto values = as_real_vector(require(j, "values", "a value table"), "\"values\"");
  if (n < 0 || n > 30 || values.size() != (std::size_t{1} << n)) {
    throw shape_error("value table length does not equal 2^n");
  }
  return values;
}

std::string tuple_to_json(const instance_tuple& t) {
  validate_tuple(t);
  json j;
  j["n"] = t.n;
  j["k"] = t.k();
  j["functions"] = t.functions;
  if (t.label) j["label"] = to_string(*t.label);
  return j.dump();
}

instance_tuple tuple_from_json(const std::string& text) {
  const json j = parse_json(text, "a function tuple");
  instance_tuple t;
  const auto& jn = require(j, "n", "a function tuple");
  if (!jn.is_number_integer()) throw io_error("\"n\" must be an integer");
  t.n = jn.get<int>();
  const auto& jf = require(j, "functions", "a function tuple");
  if (!jf.is_array()) throw io_error("\"functions\" must be an array");
  for (const auto& f : jf) {
    t.functions.push_back(as_real_vector(f, "each function"));
  }
  if (auto it = j.find("k"); it != j.end()) {
    if (!it->is_number_integer() || it->get<int>() != t.k()) {
      throw shape_error("\"k\" disagrees with the number of functions");
    }
  }
  if (auto it = j.find("label"); it != j.end()) {
    if (!it->is_string()) throw io_error("\"label\" must be a string");
    t.label = measure_from_string(it->get<std::string>());
  }
  validate_tuple(t);
  return t;
}

std::string blockpoly_to_json(const block_poly& p) {
  validate_blockpoly(p);
  json terms = json::array();
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    json term;
    term["vars"] = std::vector<int>(p.term(i), p.term(i) + p.k);
    term["coef"] = p.term_coefs[i];
    terms.push_back(std::move(term));
  }
  json j;
  j["k"] = p.k;
  j["block_sizes"] = p.block_sizes;
  j["terms"] = std::move(terms);
  return j.dump();
}

block_poly blockpoly_from_json(const std::string& text) {
  const json j = parse_json(text, "a block polynomial");
  block_poly p;
  const auto& jk = require(j, "k", "a block polynomial");
  if (!jk.is_number_integer()) throw io_error("\"k\" must be an integer");
  p.k = jk.get<int>();
  p.block_sizes = as_int_vector(require(j, "block_sizes", "a block polynomial"), "\"block_sizes\"");
  const auto& jt = require(j, "terms", "a block polynomial");
  if (!jt.is_array()) throw io_error("\"terms\" must be an array");
  for (const auto& term : jt) {
    if (!term.is_object()) throw io_error("each term must be an object");
    const auto vars = as_int_vector(require(term, "vars", "each term"), "\"vars\"");
    const auto& jc = require(term, "coef", "each term");
    if (!jc.is_number()) throw io_error("\"coef\" must be a number");
    p.add_term(vars, jc.get<double>());
  }
  validate_blockpoly(p);
  return p;
}

std::string multilinear_to_json(const multilinear_poly& p) {
  validate_multilinear(p);
  json terms = json::array();
  for (const auto& [vars, coef] : p.terms) {
    json term;
    term["vars"] = vars;
    term["coef"] = coef;
    terms.push_back(std::move(term));
  }
  json j;
  j["n_vars"] = p.n_vars;
  j["terms"] = std::move(terms);
  return j.dump();
}

multilinear_poly multilinear_from_json(const std::string& text) {
  const json j = parse_json(text, "a multilinear polynomial");
  multilinear_poly p;
  const auto& jn = require(j, "n_vars", "a multilinear polynomial");
  if (!jn.is_number_integer()) throw io_error("\"n_vars\" must be an integer");
  p.n_vars = jn.get<int>();
  const auto& jt = require(j, "terms", "a multilinear polynomial");
  if (!jt.is_array()) throw io_error("\"terms\" must be an array");
  std::map<std::vector<int>, double> merged;
  for (const auto& term : jt) {
    if (!term.is_object()) throw io_error("each term must be an object");
    auto vars = as_int_vector(require(term, "vars", "each term"), "\"vars\"");
    const auto& jc = require(term, "coef", "each term");
    if (!jc.is_number()) throw io_error("\"coef\" must be a number");
    // Fold repeated variables: over +-1 inputs x*x = 1, so pairs drop out.
    std::sort(vars.begin(), vars.end());
    std::vector<int> key;
    for (std::size_t i = 0; i < vars.size();) {
      if (i + 1 < vars.size() && vars[i + 1] == vars[i]) {
        i += 2;
      } else {
        key.push_back(vars[i]);
        i += 1;
      }
    }
    merged[key] += jc.get<double>();
  }
  for (auto& [key, coef] : merged) {
    if (coef != 0.0) p.terms.emplace_back(key, coef);
  }
  validate_multilinear(p);
  return p;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("read failure on " + path);
  return std::move(buf).str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw io_error("write failure on " + path);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    quoted += c;
    if (c == '"') quoted += '"';
  }
  quoted += '"';
  return quoted;
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i != 0) out += ',';
    out += csv_field(row[i]);
  }
  out += '\n';
}

}  // namespace

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  if (header.empty()) throw value_error("CSV header must be nonempty");
  std::string out;
  append_row(out, header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw shape_error("CSV row width does not match the header");
    }
    append_row(out, row);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string content_hash(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  const std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) {
    out[static_cast<std::size_t>(15 - i)] = digits[(h >> (4 * i)) & 0xf];
  }
  return out;
}

}  // namespace forrelab
