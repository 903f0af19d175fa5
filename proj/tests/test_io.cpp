#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "forrelab/errors.hpp"
#include "forrelab/estimators.hpp"
#include "forrelab/io.hpp"
#include "test_util.hpp"

using namespace forrelab;

TEST_CASE("truth table JSON round-trip") {
  auto rng = make_rng(11);
  const auto f = testutil::random_boolean_table(16, rng);
  const auto text = truth_table_to_json(f);
  CHECK(truth_table_from_json(text) == f);

  const auto g = truth_table_from_json(R"({"n": 1, "values": [1.0, -1.0]})");
  CHECK(g == std::vector<double>{1.0, -1.0});

  CHECK_THROWS_AS(truth_table_from_json("not json"), io_error);
  CHECK_THROWS_AS(truth_table_from_json(R"({"values": [1, -1]})"), io_error);
  CHECK_THROWS_AS(truth_table_from_json(R"({"n": 2, "values": [1, -1]})"), shape_error);
  CHECK_THROWS_AS(truth_table_from_json(R"({"n": 1, "values": [1, "x"]})"), io_error);
}

TEST_CASE("tuple JSON round-trip preserves label and rejects mismatches") {
  auto rng = make_rng(12);
  auto t = testutil::random_boolean_tuple(3, 2, rng);
  t.label = measure_kind::forrelated;
  const auto back = tuple_from_json(tuple_to_json(t));
  CHECK(back.n == t.n);
  CHECK(back.functions == t.functions);
  REQUIRE(back.label.has_value());
  CHECK(*back.label == measure_kind::forrelated);

  auto unl = tuple_from_json(R"({"n": 0, "functions": [[1.0], [-1.0]]})");
  CHECK(unl.k() == 2);
  CHECK_FALSE(unl.label.has_value());

  CHECK_THROWS_AS(tuple_from_json(R"({"n": 1, "k": 3, "functions": [[1, 1]]})"), shape_error);
  CHECK_THROWS_AS(tuple_from_json(R"({"n": 1, "functions": [[1, 1]], "label": "odd"})"), value_error);
  CHECK_THROWS_AS(tuple_from_json(R"({"n": 2, "functions": [[1, 1]]})"), shape_error);
}

TEST_CASE("block polynomial JSON round-trip") {
  auto rng = make_rng(13);
  const auto p = testutil::random_bounded_blockpoly({2, 3, 2}, 4, rng);
  const auto q = blockpoly_from_json(blockpoly_to_json(p));
  CHECK(q.k == p.k);
  CHECK(q.block_sizes == p.block_sizes);
  REQUIRE(q.term_count() == p.term_count());
  CHECK(q.term_vars == p.term_vars);
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    CHECK(q.term_coefs[i] == p.term_coefs[i]);
  }

  CHECK_THROWS_AS(blockpoly_from_json(R"({"k": 2, "block_sizes": [1, 1]})"), io_error);
  CHECK_THROWS_AS(
      blockpoly_from_json(
          R"({"k": 2, "block_sizes": [1, 1], "terms": [{"vars": [0, 0, 0], "coef": 1}]})"),
      shape_error);
}

TEST_CASE("multilinear JSON round-trip folds diagonals and merges keys") {
  multilinear_poly p;
  p.n_vars = 3;
  p.terms = {{{}, 0.25}, {{0}, -0.5}, {{0, 2}, 0.125}};
  const auto q = multilinear_from_json(multilinear_to_json(p));
  CHECK(q.n_vars == p.n_vars);
  CHECK(q.terms == p.terms);

  // x1*x1 folds to the constant; the two [0,2] terms merge; [2,0] sorts.
  const auto folded = multilinear_from_json(
      R"({"n_vars": 3, "terms": [
            {"vars": [1, 1], "coef": 0.5},
            {"vars": [2, 0], "coef": 0.25},
            {"vars": [0, 2], "coef": 0.25},
            {"vars": [0, 1, 1], "coef": -1.0}
          ]})");
  REQUIRE(folded.terms.size() == 3);
  CHECK(folded.terms[0].first.empty());
  CHECK(folded.terms[0].second == 0.5);
  CHECK(folded.terms[1].first == std::vector<int>{0});
  CHECK(folded.terms[1].second == -1.0);
  CHECK(folded.terms[2].first == std::vector<int>{0, 2});
  CHECK(folded.terms[2].second == 0.5);

  CHECK_THROWS_AS(multilinear_from_json(R"({"n_vars": 1, "terms": [{"vars": [1], "coef": 1}]})"),
                  value_error);
}

TEST_CASE("file helpers and error paths") {
  const std::string path = "io_test_scratch.json";
  write_text_file(path, "line one\nline two\n");
  CHECK(read_text_file(path) == "line one\nline two\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file("definitely/missing/file.json"), io_error);
  CHECK_THROWS_AS(write_text_file("definitely/missing/file.json", "x"), io_error);
}

TEST_CASE("format_double round-trips exactly") {
  auto rng = make_rng(14);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double v = dist(rng);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-1.0) == "-1");
}

TEST_CASE("CSV assembly quotes and validates") {
  const auto csv = to_csv({"a", "b"}, {{"1", "plain"}, {"2", "with,comma"}, {"3", "say \"hi\""}});
  CHECK(csv ==
        "a,b\n"
        "1,plain\n"
        "2,\"with,comma\"\n"
        "3,\"say \"\"hi\"\"\"\n");
  CHECK_THROWS_AS(to_csv({"a", "b"}, {{"only one"}}), shape_error);
  CHECK_THROWS_AS(to_csv({}, {}), value_error);
}

TEST_CASE("content hash is stable and sensitive") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(content_hash("") == "cbf29ce484222325");
  CHECK(content_hash("abc") != content_hash("abd"));
  CHECK(content_hash("abc").size() == 16);
}
