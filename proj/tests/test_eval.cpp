#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "gatenet/histogram.hpp"
#include "gatenet/metrics.hpp"
#include "gatenet/netlist_io.hpp"
#include "gatenet/pca.hpp"
#include "gatenet/report.hpp"
#include "gatenet/rng.hpp"

using namespace gatenet;

namespace {

std::filesystem::path temp_path(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char ch : s)
    if (ch != ' ') out += ch;
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("compute_metrics hand values") {
  // 9 true positives, 1 false positive, 1 false negative, 4 true negatives.
  std::vector<int> pred, truth;
  for (int i = 0; i < 9; ++i) { pred.push_back(1); truth.push_back(1); }
  pred.push_back(1); truth.push_back(0);
  pred.push_back(0); truth.push_back(1);
  for (int i = 0; i < 4; ++i) { pred.push_back(0); truth.push_back(0); }

  EvalReport r = compute_metrics(pred, truth, "hand");
  CHECK(r.tp == 9);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.tn == 4);
  CHECK(r.precision == 0.9);
  CHECK(r.recall == 0.9);
  CHECK(r.f1 == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.tag == "hand");
}

TEST_CASE("compute_metrics zero denominators give zero") {
  // Never predicts positive: precision has an empty denominator.
  EvalReport a = compute_metrics({0, 0, 0}, {1, 0, 1});
  CHECK(a.precision == 0.0);
  CHECK(a.recall == 0.0);
  CHECK(a.f1 == 0.0);
  // No positives in the truth: recall has an empty denominator.
  EvalReport b = compute_metrics({1, 0, 1}, {0, 0, 0});
  CHECK(b.recall == 0.0);
  CHECK(b.precision == 0.0);
  CHECK(b.f1 == 0.0);
  // All negative everywhere still yields a usable report.
  EvalReport c = compute_metrics({0, 0}, {0, 0});
  CHECK(c.tn == 2);
  CHECK(c.f1 == 0.0);
}

TEST_CASE("compute_metrics agrees with the symmetric f1 form") {
  Rng rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    size_t n = 1 + rng.uniform(200);
    std::vector<int> pred(n), truth(n);
    for (size_t i = 0; i < n; ++i) {
      pred[i] = (int)rng.bit();
      truth[i] = rng.bernoulli(0.3) ? 1 : 0;
    }
    EvalReport r = compute_metrics(pred, truth);
    CHECK(r.tp + r.fp + r.fn + r.tn == (int64_t)n);
    double denom = (double)(2 * r.tp + r.fp + r.fn);
    double f1_direct = denom > 0 ? 2.0 * (double)r.tp / denom : 0.0;
    CHECK(r.f1 == doctest::Approx(f1_direct).epsilon(1e-12));
  }
}

TEST_CASE("compute_metrics validates its inputs") {
  CHECK_THROWS_AS(compute_metrics({1, 0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics({2}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics({1}, {-1}), std::invalid_argument);
}

TEST_CASE("pca recovers an axis-aligned spread exactly") {
  Matrix x = Matrix::from_rows({{3, 0}, {1, 0}, {-1, 0}, {-3, 0}});
  Pca2d p = pca_2d(x);
  CHECK(p.mean == std::vector<double>{0.0, 0.0});
  CHECK(p.eigenvalues[0] == 20.0 / 3.0);
  CHECK(p.eigenvalues[1] == 0.0);
  // Sign convention: first nonzero coordinate of each direction positive.
  CHECK(p.components == Matrix::from_rows({{1, 0}, {0, 1}}));
  CHECK(p.projected == Matrix::from_rows({{3, 0}, {1, 0}, {-1, 0}, {-3, 0}}));
}

TEST_CASE("pca projection preserves distances for planar data") {
  // 3-d points confined to a 2-d plane: the top-2 projection is a rigid map.
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<std::pair<double, double>> ab = {
      {4, 1}, {-4, 2}, {1, -3}, {-1, 0}, {0, 1}, {2.5, -1.5}};
  Matrix x((int)ab.size(), 3);
  for (size_t i = 0; i < ab.size(); ++i) {
    x.at((int)i, 0) = ab[i].first * s;
    x.at((int)i, 1) = ab[i].first * s;
    x.at((int)i, 2) = ab[i].second;
  }
  Pca2d p = pca_2d(x);
  CHECK(p.eigenvalues[0] >= p.eigenvalues[1]);
  CHECK(p.eigenvalues[1] > 0.0);
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = i + 1; j < x.rows(); ++j) {
      double orig = 0, proj = 0;
      for (int k = 0; k < 3; ++k) {
        double d = x.at(i, k) - x.at(j, k);
        orig += d * d;
      }
      for (int k = 0; k < 2; ++k) {
        double d = p.projected.at(i, k) - p.projected.at(j, k);
        proj += d * d;
      }
      CHECK(std::sqrt(proj) == doctest::Approx(std::sqrt(orig)).epsilon(1e-9));
    }
  }
}

TEST_CASE("pca directions are orthonormal and deterministic") {
  Rng rng(9);
  Matrix x(12, 5);
  for (size_t i = 0; i < x.size(); ++i)
    x.data()[i] = rng.uniform_real(-2.0, 2.0);

  Pca2d p = pca_2d(x);
  CHECK(p.eigenvalues[0] >= p.eigenvalues[1]);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double dot = 0;
      for (int i = 0; i < 5; ++i)
        dot += p.components.at(i, a) * p.components.at(i, b);
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-9));
    }
  }
  // Projection is exactly the centered data against the two directions.
  for (int i = 0; i < x.rows(); ++i) {
    for (int k = 0; k < 2; ++k) {
      double want = 0;
      for (int j = 0; j < 5; ++j)
        want += (x.at(i, j) - p.mean[(size_t)j]) * p.components.at(j, k);
      CHECK(p.projected.at(i, k) == doctest::Approx(want).epsilon(1e-12));
    }
  }

  Pca2d q = pca_2d(x);
  CHECK(q.components == p.components);
  CHECK(q.projected == p.projected);
  CHECK(q.eigenvalues == p.eigenvalues);
}

TEST_CASE("pca is invariant to row order") {
  Rng rng(14);
  Matrix x(9, 4);
  for (size_t i = 0; i < x.size(); ++i)
    x.data()[i] = rng.uniform_real(-1.0, 1.0);
  std::vector<int> perm = {4, 0, 8, 2, 6, 1, 7, 3, 5};
  Matrix shuffled(9, 4);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 4; ++j)
      shuffled.at(i, j) = x.at(perm[(size_t)i], j);

  Pca2d a = pca_2d(x);
  Pca2d b = pca_2d(shuffled);
  for (int j = 0; j < 4; ++j) {
    CHECK(b.mean[(size_t)j] == doctest::Approx(a.mean[(size_t)j]).epsilon(1e-12));
    for (int k = 0; k < 2; ++k)
      CHECK(b.components.at(j, k) ==
            doctest::Approx(a.components.at(j, k)).epsilon(1e-9));
  }
  for (int i = 0; i < 9; ++i)
    for (int k = 0; k < 2; ++k)
      CHECK(b.projected.at(i, k) ==
            doctest::Approx(a.projected.at(perm[(size_t)i], k)).epsilon(1e-9));
}

TEST_CASE("pca rejects degenerate inputs") {
  CHECK_THROWS_AS(pca_2d(Matrix(1, 3)), std::invalid_argument);
  CHECK_THROWS_AS(pca_2d(Matrix(3, 1)), std::invalid_argument);
  // Identical rows: zero covariance has no principal direction.
  Matrix flat = Matrix::from_rows({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  CHECK_THROWS_AS(pca_2d(flat), std::domain_error);
}

TEST_CASE("pca csv layout") {
  auto path = temp_path("gatenet_pca_test.csv");
  write_pca_csv(path, {{"a", 0, 1.5, -2.25, 0}, {"b", 1, 0.5, 0.125, 150}});
  CHECK(read_file(path) ==
        "id,label,pc1,pc2,epoch\n"
        "a,0,1.500000000,-2.250000000,0\n"
        "b,1,0.500000000,0.125000000,150\n");
  std::filesystem::remove(path);
}

TEST_CASE("histogram bins values per label over a shared range") {
  std::vector<double> values;
  std::vector<int> labels;
  for (int v = 0; v <= 10; ++v) {
    values.push_back((double)v);
    labels.push_back(v % 2);
  }
  LabelHistogram h = histogram_by_label(values, labels, 5);
  CHECK(h.lo == 0.0);
  CHECK(h.width == 2.0);
  CHECK(h.bins == 5);
  // Even values 0..10 are label 0; the top edge 10 closes the last bin.
  CHECK(h.count0 == std::vector<int64_t>{1, 1, 1, 1, 2});
  CHECK(h.count1 == std::vector<int64_t>{1, 1, 1, 1, 1});
  CHECK(h.total0 == 6);
  CHECK(h.total1 == 5);
}

TEST_CASE("histogram handles a degenerate single-point range") {
  LabelHistogram h = histogram_by_label({7.0, 7.0, 7.0}, {0, 1, 0}, 4);
  CHECK(h.lo == 7.0);
  CHECK(h.width == 1.0);
  CHECK(h.count0 == std::vector<int64_t>{2, 0, 0, 0});
  CHECK(h.count1 == std::vector<int64_t>{1, 0, 0, 0});
}

TEST_CASE("histogram totals account for every sample") {
  Rng rng(5);
  std::vector<double> values;
  std::vector<int> labels;
  for (int i = 0; i < 500; ++i) {
    values.push_back(rng.uniform_real(-3.0, 9.0));
    labels.push_back((int)rng.bit());
  }
  LabelHistogram h = histogram_by_label(values, labels);
  CHECK(h.bins == 50);
  int64_t c0 = 0, c1 = 0, want0 = 0;
  for (int64_t v : h.count0) c0 += v;
  for (int64_t v : h.count1) c1 += v;
  for (int l : labels) want0 += l == 0;
  CHECK(c0 == h.total0);
  CHECK(c1 == h.total1);
  CHECK(c0 == want0);
  CHECK(c0 + c1 == 500);
  double ov = overlap_coefficient(h);
  CHECK(ov >= 0.0);
  CHECK(ov <= 1.0 + 1e-12);
}

TEST_CASE("histogram validates its inputs") {
  CHECK_THROWS_AS(histogram_by_label({}, {}, 5), std::invalid_argument);
  CHECK_THROWS_AS(histogram_by_label({1.0}, {0, 1}, 5), std::invalid_argument);
  CHECK_THROWS_AS(histogram_by_label({1.0}, {0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(histogram_by_label({1.0, 2.0}, {0, 2}, 5),
                  std::invalid_argument);
}

TEST_CASE("overlap coefficient hand values") {
  LabelHistogram h;
  h.bins = 2;
  h.count0 = {3, 1};
  h.count1 = {1, 3};
  h.total0 = 4;
  h.total1 = 4;
  CHECK(overlap_coefficient(h) == 0.5);

  h.count1 = {3, 1};
  CHECK(overlap_coefficient(h) == 1.0);

  h.count0 = {4, 0};
  h.count1 = {0, 4};
  CHECK(overlap_coefficient(h) == 0.0);

  h.total1 = 0;
  h.count1 = {0, 0};
  CHECK_THROWS_AS(overlap_coefficient(h), std::invalid_argument);
}

TEST_CASE("histogram csv omits empty bins") {
  LabelHistogram h;
  h.lo = 0.0;
  h.width = 2.0;
  h.bins = 3;
  h.count0 = {1, 0, 2};
  h.count1 = {0, 4, 0};
  h.total0 = 3;
  h.total1 = 4;
  auto path = temp_path("gatenet_hist_test.csv");
  write_histogram_csv(path, h);
  CHECK(read_file(path) ==
        "label,bin_low,bin_high,count\n"
        "0,0.000000000,2.000000000,1\n"
        "0,4.000000000,6.000000000,2\n"
        "1,2.000000000,4.000000000,4\n");
  std::filesystem::remove(path);
}

namespace {

MetricsRow make_row(const std::string& expt, const std::string& model,
                    double precision, double recall, double f1, int64_t tp,
                    int64_t fp, int64_t fn, int64_t tn) {
  MetricsRow r;
  r.experiment = expt;
  r.model = model;
  r.report.precision = precision;
  r.report.recall = recall;
  r.report.f1 = f1;
  r.report.tp = tp;
  r.report.fp = fp;
  r.report.fn = fn;
  r.report.tn = tn;
  r.report.tag = expt + "/" + model;
  return r;
}

}  // namespace

TEST_CASE("metrics csv round trips") {
  std::vector<MetricsRow> rows = {
      make_row("desk", "gatenet", 1.0, 0.9, 0.947368, 9, 0, 1, 40),
      make_row("desk", "nocont", 0.75, 0.5, 0.6, 6, 2, 6, 36),
      make_row("extrap", "hoque", 0.0, 0.0, 0.0, 0, 0, 12, 38),
  };
  std::string text = metrics_csv(rows);
  CHECK(lines_of(text)[0] == "experiment,model,precision,recall,f1,tp,fp,fn,tn");
  CHECK(lines_of(text)[1] == "desk,gatenet,1.000000,0.900000,0.947368,9,0,1,40");
  CHECK(parse_metrics_csv(text) == rows);

  auto path = temp_path("gatenet_metrics_test.csv");
  write_metrics_csv(path, rows);
  CHECK(read_metrics_csv(path) == rows);
  std::filesystem::remove(path);
}

TEST_CASE("metrics csv rejects malformed input") {
  CHECK_THROWS_AS(parse_metrics_csv("bogus\n"), IoError);
  std::string hdr = "experiment,model,precision,recall,f1,tp,fp,fn,tn\n";
  CHECK_THROWS_AS(parse_metrics_csv(hdr + "desk,gatenet,1.0\n"), IoError);
  CHECK_THROWS_AS(
      parse_metrics_csv(hdr + "desk,gatenet,x,0.9,0.9,9,1,1,4\n"), IoError);
  CHECK_THROWS_AS(read_metrics_csv(temp_path("gatenet_missing_metrics.csv")),
                  IoError);
}

TEST_CASE("report text compares every model against gatenet") {
  std::vector<MetricsRow> rows = {
      make_row("desk", "gatenet", 1.0, 0.9802, 0.99, 0, 0, 0, 0),
      make_row("desk", "nocont", 0.8, 0.9, 0.81, 0, 0, 0, 0),
      make_row("desk", "kurihara", 0.0, 0.0, 0.0, 0, 0, 0, 0),
      make_row("desk", "hoque", 1.0, 1.0, 1.0, 0, 0, 0, 0),
      make_row("lonely", "nocont", 0.5, 0.5, 0.5, 0, 0, 0, 0),
  };
  std::string text = report_text(rows);
  auto lines = lines_of(text);
  REQUIRE(lines.size() == 7);
  CHECK(strip_spaces(lines[0]) == "Expt.Type|Model|Precision|Recall|F1|vsgatenet");
  for (char ch : lines[1]) CHECK((ch == '-' || ch == '+'));
  // The reference model compares to nothing.
  CHECK(strip_spaces(lines[2]) == "desk|gatenet|1.0000|0.9802|0.9900|-");
  // 0.99 against 0.81 is a 22.22 percent f1 lift.
  CHECK(strip_spaces(lines[3]) == "desk|nocont|0.8000|0.9000|0.8100|+22.22%");
  // A zero-f1 row cannot be a denominator.
  CHECK(strip_spaces(lines[4]) == "desk|kurihara|0.0000|0.0000|0.0000|-");
  // A model above the reference shows a negative lift.
  CHECK(strip_spaces(lines[5]) == "desk|hoque|1.0000|1.0000|1.0000|-1.00%");
  // No gatenet row in this experiment, so no comparison.
  CHECK(strip_spaces(lines[6]) == "lonely|nocont|0.5000|0.5000|0.5000|-");
}
