#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "phishguard/csv.hpp"
#include "phishguard/data.hpp"
#include "phishguard/error.hpp"
#include "phishguard/rng.hpp"
#include "phishguard/synthetic.hpp"
#include "support.hpp"

using namespace phishguard;

TEST_CASE("csv parsing handles quotes, CRLF and blank lines") {
  const auto rows = parse_csv("a,\"b,c\",\"say \"\"hi\"\"\"\r\n\r\n1,2,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == CsvRow{"a", "b,c", "say \"hi\""});
  CHECK(rows[1] == CsvRow{"1", "2", "3"});
  CHECK_THROWS_AS(parse_csv("a,\"open\n"), ConfigError);
  CHECK(parse_csv("x;y\n", ';')[0] == CsvRow{"x", "y"});
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("plain") == "plain");
}

TEST_CASE("parse_dataset maps labels and drops columns") {
  DatasetSchema s;
  s.label_column = std::string("status");
  s.positive_raw_value = "phishing";
  s.negative_raw_value = "legitimate";
  s.drop_columns = {"url"};
  const std::string csv =
      "url,f1,f2,status\n"
      "http://a,1,2,phishing\n"
      "http://b,3,4,legitimate\n"
      "http://c,5,6,legitimate\n"
      "http://d,7,8,phishing\n";
  const Dataset ds = parse_dataset(csv, s, "mem");
  CHECK(ds.n() == 4);
  CHECK(ds.d() == 2);
  CHECK(ds.feature_names() == std::vector<std::string>{"f1", "f2"});
  CHECK(ds.labels() == Labels{1, 0, 0, 1});
  CHECK(ds.features()(3, 1) == 8.0);
}

TEST_CASE("parse_dataset compares numeric labels by value") {
  DatasetSchema s;
  s.label_column = std::string("Result");
  s.positive_raw_value = "-1";
  const Dataset ds = parse_dataset("a,Result\n1,-1\n2,1\n3,-1.0\n4,1\n", s, "mem");
  CHECK(ds.labels() == Labels{1, 0, 1, 0});
}

TEST_CASE("parse_dataset error messages name the row and column") {
  DatasetSchema s;
  s.label_column = std::string("y");
  try {
    parse_dataset("a,b,y\n1,2,1\n3,,0\n5,6,1\n7,8,0\n", s, "mem");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("missing value") != std::string::npos);
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(parse_dataset("a,y\n1,1\nx,0\n2,1\n3,0\n", s, "mem"), doctest::Contains("non-numeric"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_dataset("a,y\n1,1\n2,0\n3,2\n4,0\n", s, "mem"), doctest::Contains("more than two"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_dataset("a,y\n1,0\n2,0\n3,0\n4,0\n", s, "mem"), doctest::Contains("never appears"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_dataset("a,y\n1,1\n2,0\n", s, "mem"), doctest::Contains("at least 4 rows"), ConfigError);
  CHECK_THROWS_AS(parse_dataset("a,y\n1,1\n2,0,3\n3,1\n4,0\n", s, "mem"), ConfigError);
}

TEST_CASE("parse_dataset reads ARFF") {
  DatasetSchema s = dataset_preset("dataset2").schema;
  const std::string arff =
      "@relation phishing\n"
      "@attribute having_IP_Address { -1,1 }\n"
      "@attribute URL_Length { 1,0,-1 }\n"
      "@attribute Result { -1,1 }\n"
      "@data\n"
      "-1,1,-1\n"
      "1,0,1\n"
      "1,-1,-1\n"
      "-1,1,1\n";
  const Dataset ds = parse_dataset(arff, s, "uci.arff");
  CHECK(ds.d() == 2);
  CHECK(ds.feature_names()[1] == "URL_Length");
  CHECK(ds.labels() == Labels{1, 0, 1, 0});
}

TEST_CASE("dataset presets carry the known row, feature and class counts") {
  CHECK(dataset_preset("dataset1").expected_rows == 10000);
  CHECK(dataset_preset("dataset1").expected_features == 48);
  CHECK(dataset_preset("dataset2").expected_rows == 11055);
  CHECK(dataset_preset("dataset2").expected_features == 30);
  CHECK(dataset_preset("dataset3").expected_rows == 11430);
  CHECK(dataset_preset("dataset3").expected_features == 87);
  CHECK(dataset_preset("dataset4").expected_rows == 96018);
  CHECK(dataset_preset("dataset4").expected_features == 12);
  CHECK_THROWS_AS(dataset_preset("dataset9"), ConfigError);
}

TEST_CASE("Dataset validates its invariants") {
  CHECK_THROWS_AS(Dataset(Matrix{{1.0}, {2.0}}, Labels{1, 1}, {"a"}, "x"), InvalidArgument);
  CHECK_THROWS_AS(Dataset(Matrix{{1.0}, {2.0}}, Labels{1, 2}, {"a"}, "x"), InvalidArgument);
  CHECK_THROWS_AS(Dataset(Matrix{{1.0}, {NAN}}, Labels{1, 0}, {"a"}, "x"), InvalidArgument);
  CHECK_THROWS_AS(Dataset(Matrix{{1.0, 2.0}, {3.0, 4.0}}, Labels{1, 0}, {"a", "a"}, "x"), InvalidArgument);
  CHECK_NOTHROW(Dataset(Matrix{{1.0}, {2.0}}, Labels{1, 0}, {"a"}, "x"));
}

TEST_CASE("stratified_split preserves class proportions and partitions rows") {
  const Dataset ds = make_blobs(1000, 3, 2.0, 5);
  const SplitResult s = stratified_split(ds, 0.2, 11);
  CHECK(s.test.n() == 200);
  CHECK(s.test.count(1) == 100);
  std::set<std::size_t> all(s.train_indices.begin(), s.train_indices.end());
  for (std::size_t i : s.test_indices) CHECK(all.insert(i).second);
  CHECK(all.size() == 1000);
  CHECK(std::is_sorted(s.test_indices.begin(), s.test_indices.end()));
  CHECK(stratified_split(ds, 0.2, 11).test_indices == s.test_indices);
  CHECK(stratified_split(ds, 0.2, 12).test_indices != s.test_indices);

  // Rounding per class: 7 phishing * 0.3 = 2.1 -> 2, 13 legitimate * 0.3 = 3.9 -> 4.
  Matrix X(20, 1);
  Labels y(20, 0);
  for (std::size_t i = 0; i < 20; ++i) X(i, 0) = static_cast<double>(i);
  for (std::size_t i = 0; i < 7; ++i) y[i] = 1;
  const SplitResult r = stratified_split(Dataset(X, y, {"a"}, "x"), 0.3, 1);
  CHECK(r.test.count(1) == 2);
  CHECK(r.test.count(0) == 4);
  CHECK_THROWS_AS(stratified_split(ds, 1.0, 1), InvalidArgument);
}

TEST_CASE("scaler uses population statistics and keeps constant columns") {
  const Matrix X{{1.0, 5.0}, {3.0, 5.0}};
  const Scaler s = fit_scaler(X);
  CHECK(s.means == std::vector<double>{2.0, 5.0});
  CHECK(s.stds == std::vector<double>{1.0, 1.0});
  const Matrix Z = apply_scaler(s, X);
  CHECK(Z == Matrix{{-1.0, 0.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(apply_scaler(s, Matrix{{1.0}}), InvalidArgument);
}

TEST_CASE("stratified_kfold balances classes across folds") {
  const Labels y = pgtest::random_labels(103, 3, 0.3);
  const FoldAssignment f = stratified_kfold(y, 5, 9);
  const auto n1 = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  std::size_t total = 0;
  std::size_t min_size = y.size(), max_size = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    const auto te = f.test_indices(k);
    const auto tr = f.train_indices(k);
    CHECK(te.size() + tr.size() == y.size());
    std::size_t pos = 0;
    for (std::size_t i : te) pos += y[i] == 1 ? 1 : 0;
    CHECK(pos >= n1 / 5);
    CHECK(pos <= n1 / 5 + 1);
    total += te.size();
    min_size = std::min(min_size, te.size());
    max_size = std::max(max_size, te.size());
  }
  CHECK(total == y.size());
  CHECK(max_size - min_size <= 1);
  CHECK(stratified_kfold(y, 5, 9) == f);
  CHECK_THROWS_AS(stratified_kfold(Labels{0, 1, 0, 1}, 3, 1), InvalidArgument);
}

TEST_CASE("synthetic generators are seeded and shaped") {
  const Dataset b = make_blobs(200, 4, 4.0, 7);
  CHECK(b.n() == 200);
  CHECK(b.d() == 4);
  CHECK(b.count(1) == 100);
  CHECK(make_blobs(200, 4, 4.0, 7) == b);
  const Dataset x = make_noisy_xor(400, 3, 0.0, 7);
  for (std::size_t i = 0; i < x.n(); ++i) {
    const bool expect = (x.features()(i, 0) > 0) != (x.features()(i, 1) > 0);
    CHECK(x.labels()[i] == (expect ? 1 : 0));
  }
}

TEST_CASE("derived seeds differ by stage and index") {
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
  Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7);
  }
}

TEST_CASE("split arithmetic on a 6/4 dataset and round-trip reconstruction") {
  Matrix X(10, 1);
  for (std::size_t i = 0; i < 10; ++i) X(i, 0) = static_cast<double>(i);
  const Dataset ds(X, Labels{1, 0, 1, 0, 0, 1, 0, 0, 1, 0}, {"a"}, "x");
  const SplitResult s = stratified_split(ds, 0.5, 3);
  CHECK(s.test.count(0) == 3);
  CHECK(s.test.count(1) == 2);
  Matrix back(10, 1);
  Labels y(10);
  for (std::size_t r = 0; r < s.train_indices.size(); ++r) {
    back(s.train_indices[r], 0) = s.train.features()(r, 0);
    y[s.train_indices[r]] = s.train.labels()[r];
  }
  for (std::size_t r = 0; r < s.test_indices.size(); ++r) {
    back(s.test_indices[r], 0) = s.test.features()(r, 0);
    y[s.test_indices[r]] = s.test.labels()[r];
  }
  CHECK(back == ds.features());
  CHECK(y == ds.labels());
}

TEST_CASE("scaler standardizes its own fit matrix and does not refit on new data") {
  const Matrix X = pgtest::random_matrix(300, 4, 21, 3.0);
  const Scaler s = fit_scaler(X);
  const Matrix Z = apply_scaler(s, X);
  for (std::size_t j = 0; j < 4; ++j) {
    double m = 0.0, v = 0.0;
    for (std::size_t i = 0; i < 300; ++i) m += Z(i, j);
    m /= 300;
    for (std::size_t i = 0; i < 300; ++i) v += (Z(i, j) - m) * (Z(i, j) - m);
    CHECK(std::abs(m) < 1e-9);
    CHECK(std::abs(std::sqrt(v / 300) - 1.0) < 1e-6);
  }
  CHECK(apply_scaler(Scaler{{0.0}, {1.0}}, Matrix{{7.0}}) == Matrix{{7.0}});
  CHECK(apply_scaler(Scaler{{2.0}, {2.0}}, Matrix{{4.0}}) == Matrix{{1.0}});
  const Matrix other = pgtest::random_matrix(50, 4, 22, 3.0);
  double shifted = 0.0;
  for (std::size_t i = 0; i < 50; ++i) shifted += apply_scaler(s, other)(i, 0) + 1.0;
  CHECK(std::abs(shifted / 50 - 1.0) > 1e-6);
  const Scaler c = fit_scaler(Matrix{{5.0}, {5.0}, {5.0}});
  CHECK(c.means[0] == 5.0);
  CHECK(c.stds[0] == 1.0);
}

TEST_CASE("kfold exact divisibility and large fold sizes") {
  const Labels y{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const FoldAssignment f = stratified_kfold(y, 5, 2);
  for (std::size_t k = 0; k < 5; ++k) {
    const auto te = f.test_indices(k);
    REQUIRE(te.size() == 2);
    CHECK(y[te[0]] + y[te[1]] == 1);
  }
  const Labels big = pgtest::random_labels(11055, 4, 0.443);
  const FoldAssignment g = stratified_kfold(big, 5, 1);
  std::vector<std::size_t> sizes(5, 0);
  for (std::size_t v : g.fold_of) ++sizes[v];
  CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
}
