#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "json.hpp"
#include "phishguard/error.hpp"
#include "phishguard/learners.hpp"
#include "phishguard/parallel.hpp"
#include "phishguard/svm.hpp"
#include "phishguard/synthetic.hpp"
#include "phishguard/trees.hpp"
#include "support.hpp"

using namespace phishguard;

namespace {

const Matrix kXorX{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
const Labels kXorY{0, 0, 1, 1};

ModelSpec spec(Algorithm a, Hyperparameters h = {}, std::uint64_t seed = 1) { return ModelSpec(a, std::move(h), seed); }

double train_accuracy(const ModelSpec& s, const Matrix& X, const Labels& y) {
  return pgtest::accuracy(y, train(s, X, y).predict(X));
}

/// 1-D separable task: negatives at x < 0, positives at x >= 0.
void separable_1d(Matrix& X, Labels& y) {
  X = Matrix(20, 1);
  y.assign(20, 0);
  for (std::size_t i = 0; i < 20; ++i) {
    X(i, 0) = static_cast<double>(i) - 9.5 + (i >= 10 ? 1.0 : 0.0);
    y[i] = i >= 10 ? 1 : 0;
  }
}

double log_loss(const std::vector<double>& p, const Labels& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s -= y[i] == 1 ? std::log(p[i]) : std::log(1 - p[i]);
  return s / static_cast<double>(y.size());
}

const std::vector<double>& loss_trace(const TrainedModel& m) {
  if (const auto* b = m.as<BoostedTreesModel>()) return b->loss_trace();
  return m.as<ObliviousBoostModel>()->loss_trace();
}

}  // namespace

TEST_CASE("hyperparameter validation") {
  CHECK_THROWS_AS(ModelSpec(Algorithm::svm, {{"C", -1.0}}), ConfigError);
  CHECK_THROWS_AS(ModelSpec(Algorithm::svm, {{"kernel", std::string("poly")}}), ConfigError);
  CHECK_THROWS_AS(ModelSpec(Algorithm::random_forest, {{"nonsense", 1.0}}), ConfigError);
  CHECK_THROWS_AS(ModelSpec(Algorithm::adaboost, {{"n_estimators", std::int64_t{0}}}), ConfigError);
  const ModelSpec s(Algorithm::gradient_boosting, {{"learning_rate", 0.3}});
  CHECK(s.get_int("n_rounds") == 100);
  CHECK(s.canonical() == "gradient_boosting{learning_rate=0.3,max_depth=3,min_samples_leaf=1,n_rounds=100}");
  CHECK(parse_algorithm("xgb_style") == Algorithm::xgb_style);
  CHECK(display_name(Algorithm::catboost_style) == "CB");
}

TEST_CASE("decision tree: stump threshold, purity and XOR depth") {
  Matrix X;
  Labels y;
  separable_1d(X, y);
  const TrainedModel stump = train(spec(Algorithm::decision_tree, {{"max_depth", std::int64_t{1}}}), X, y);
  const Tree& t = stump.as<DecisionTreeModel>()->tree();
  REQUIRE(t.nodes[0].feature == 0);
  CHECK(t.nodes[0].threshold > -0.5);
  CHECK(t.nodes[0].threshold <= 0.5);
  CHECK(pgtest::accuracy(y, stump.predict(X)) == 1.0);

  std::vector<double> imp;
  const Tree pure = fit_cart(X, Labels(20, 1), {}, 0, 1, 0.0, imp);
  CHECK(pure.nodes.size() == 1);
  CHECK(pure.nodes[0].value == 1.0);

  CHECK(train_accuracy(spec(Algorithm::decision_tree, {{"max_depth", std::int64_t{2}}}), kXorX, kXorY) == 1.0);
  CHECK(train_accuracy(spec(Algorithm::decision_tree, {{"max_depth", std::int64_t{1}}}), kXorX, kXorY) == 0.5);
}

TEST_CASE("forest with one full-feature tree and no bootstrap equals a tree") {
  const Dataset ds = make_noisy_xor(300, 4, 0.1, 3);
  const TrainedModel f = train(spec(Algorithm::random_forest, {{"n_trees", std::int64_t{1}},
                                                               {"bootstrap", std::int64_t{0}},
                                                               {"max_features", std::string("all")},
                                                               {"max_depth", std::int64_t{5}}}),
                               ds.features(), ds.labels());
  const TrainedModel t =
      train(spec(Algorithm::decision_tree, {{"max_depth", std::int64_t{5}}}), ds.features(), ds.labels());
  CHECK(f.score(ds.features()) == t.score(ds.features()));
}

TEST_CASE("forest importances are normalized and training is thread-count independent") {
  const Dataset ds = make_blobs(400, 5, 3.0, 8);
  const ModelSpec s = spec(Algorithm::random_forest, {{"n_trees", std::int64_t{20}}}, 5);
  set_thread_count(1);
  const TrainedModel a = train(s, ds.features(), ds.labels());
  set_thread_count(4);
  const TrainedModel b = train(s, ds.features(), ds.labels());
  set_thread_count(1);
  CHECK(a.score(ds.features()) == b.score(ds.features()));
  const auto imp = a.importances();
  REQUIRE(imp);
  CHECK(std::abs(std::accumulate(imp->begin(), imp->end(), 0.0) - 1.0) < 1e-9);
  CHECK((*imp)[0] + (*imp)[1] > (*imp)[2] + (*imp)[3] + (*imp)[4]);
}

TEST_CASE("gradient boosting: single stump fit, zero learning rate, loss trace") {
  Matrix X;
  Labels y;
  separable_1d(X, y);
  const ModelSpec one = spec(Algorithm::gradient_boosting, {{"n_rounds", std::int64_t{1}},
                                                            {"learning_rate", 1.0},
                                                            {"max_depth", std::int64_t{1}}});
  CHECK(train_accuracy(one, X, y) == 1.0);

  Labels skew = y;
  skew[0] = 1;
  const TrainedModel zero = train(spec(Algorithm::gradient_boosting, {{"learning_rate", 0.0}}), X, skew);
  for (double p : zero.score(X)) CHECK(p == doctest::Approx(11.0 / 20.0).epsilon(1e-12));

  const Dataset ds = make_noisy_xor(400, 3, 0.1, 2);
  const TrainedModel m = train(spec(Algorithm::gradient_boosting, {{"n_rounds", std::int64_t{50}}}), ds.features(),
                               ds.labels());
  const auto& trace = loss_trace(m);
  REQUIRE(trace.size() == 51);
  for (std::size_t r = 1; r < trace.size(); ++r) CHECK(trace[r] <= trace[r - 1] + 1e-12);
  CHECK(std::abs(trace.back() - log_loss(m.score(ds.features()), ds.labels())) < 1e-9);
}

TEST_CASE("xgb_style regularization limits") {
  const Dataset ds = make_blobs(200, 3, 3.0, 4);
  const TrainedModel inf_lambda = train(spec(Algorithm::xgb_style, {{"lambda", 1e15}}), ds.features(), ds.labels());
  for (double p : inf_lambda.score(ds.features())) CHECK(p == doctest::Approx(0.5).epsilon(1e-9));

  const TrainedModel pruned = train(spec(Algorithm::xgb_style, {{"gamma", 1e9}}), ds.features(), ds.labels());
  const auto s = pruned.score(ds.features());
  CHECK(std::all_of(s.begin(), s.end(), [&](double v) { return v == s.front(); }));
  CHECK_FALSE(pruned.importances().has_value());

  const TrainedModel m = train(spec(Algorithm::xgb_style, {{"n_rounds", std::int64_t{40}}}), ds.features(), ds.labels());
  const auto& trace = loss_trace(m);
  for (std::size_t r = 1; r < trace.size(); ++r) CHECK(trace[r] <= trace[r - 1] + 1e-12);
}

TEST_CASE("xgb_style with no regularization picks the first-order stump split") {
  // Four points: x = 0, 1, 2, 3 with labels 0, 0, 1, 1. Base rate 0.5, so
  // g = p - y = +-1/2 and h = 1/4 for every row. The gain is largest for the
  // balanced split x < 1.5, the same split a Gini stump chooses.
  const Matrix X{{0}, {1}, {2}, {3}};
  const Labels y{0, 0, 1, 1};
  const TrainedModel x = train(spec(Algorithm::xgb_style, {{"n_rounds", std::int64_t{1}},
                                                           {"lambda", 0.0},
                                                           {"max_depth", std::int64_t{1}},
                                                           {"min_child_weight", 0.0}}),
                               X, y);
  const TrainedModel t = train(spec(Algorithm::decision_tree, {{"max_depth", std::int64_t{1}}}), X, y);
  const Tree& xt = x.as<BoostedTreesModel>()->trees().at(0);
  const Tree& tt = t.as<DecisionTreeModel>()->tree();
  CHECK(xt.nodes[0].feature == tt.nodes[0].feature);
  CHECK(xt.nodes[0].threshold == tt.nodes[0].threshold);
  CHECK(xt.nodes[0].threshold == 1.5);
}

TEST_CASE("catboost_style: depth-1 equivalence, XOR, loss trace") {
  const Dataset ds = make_blobs(300, 3, 2.0, 6);
  const TrainedModel cb = train(spec(Algorithm::catboost_style, {{"depth", std::int64_t{1}}, {"n_rounds", std::int64_t{10}}}),
                                ds.features(), ds.labels());
  const TrainedModel gb = train(spec(Algorithm::gradient_boosting, {{"max_depth", std::int64_t{1}}, {"n_rounds", std::int64_t{10}}}),
                                ds.features(), ds.labels());
  const auto a = cb.score(ds.features());
  const auto b = gb.score(ds.features());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);

  CHECK(train_accuracy(spec(Algorithm::catboost_style, {{"depth", std::int64_t{2}}, {"learning_rate", 0.3}}), kXorX,
                       kXorY) == 1.0);

  const Dataset xr = make_noisy_xor(400, 3, 0.1, 2);
  const TrainedModel m = train(spec(Algorithm::catboost_style, {{"n_rounds", std::int64_t{40}}}), xr.features(), xr.labels());
  const auto& trace = loss_trace(m);
  for (std::size_t r = 1; r < trace.size(); ++r) CHECK(trace[r] <= trace[r - 1] + 1e-12);
}

TEST_CASE("adaboost alpha, early stop and reweighting") {
  CHECK(std::abs(adaboost_alpha(0.1, 1.0) - 0.5 * std::log(9.0)) < 1e-12);
  CHECK(std::abs(adaboost_alpha(0.1, 0.5) - 0.25 * std::log(9.0)) < 1e-12);

  Matrix X;
  Labels y;
  separable_1d(X, y);
  const TrainedModel sep = train(spec(Algorithm::adaboost), X, y);
  const auto* sm = sep.as<AdaBoostModel>();
  CHECK(sm->learners().size() == 1);
  CHECK(sm->stop_reason() == AdaBoostModel::Stop::perfect_learner);
  CHECK(pgtest::accuracy(y, sep.predict(X)) == 1.0);

  // Replay the weight updates from the stored learners: the recorded error of
  // each round must equal the weighted error under the replayed weights, and
  // misclassified rows must gain weight relative to correct ones.
  const Dataset ds = make_noisy_xor(300, 2, 0.05, 9);
  const TrainedModel m = train(spec(Algorithm::adaboost, {{"n_estimators", std::int64_t{20}}, {"weak_depth", std::int64_t{2}}}),
                               ds.features(), ds.labels());
  const auto* am = m.as<AdaBoostModel>();
  const std::size_t n = ds.n();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  for (std::size_t t = 0; t < am->learners().size(); ++t) {
    double err = 0.0;
    std::vector<bool> wrong(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int h = am->learners()[t].evaluate(ds.features().row(i)) >= 0.5 ? 1 : 0;
      wrong[i] = h != ds.labels()[i];
      if (wrong[i]) err += w[i];
    }
    CHECK(am->errors()[t] < 0.5);
    CHECK(std::abs(am->errors()[t] - err) < 1e-9);
    const double alpha = am->alphas()[t];
    CHECK(std::abs(alpha - adaboost_alpha(err, 1.0)) < 1e-9);
    double before_ratio = 0.0, after_ratio = 0.0;
    std::size_t iw = n, ic = n;
    for (std::size_t i = 0; i < n && (iw == n || ic == n); ++i) (wrong[i] ? iw : ic) = i;
    if (iw < n && ic < n) before_ratio = w[iw] / w[ic];
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(wrong[i] ? alpha : -alpha);
      z += w[i];
    }
    for (double& v : w) v /= z;
    if (iw < n && ic < n) {
      after_ratio = w[iw] / w[ic];
      CHECK(after_ratio > before_ratio);
    }
  }
}

TEST_CASE("linear SVM dual solution satisfies the margin conditions") {
  const Dataset ds = make_blobs(400, 2, 6.0, 42);
  std::vector<double> ypm(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) ypm[i] = ds.labels()[i] == 1 ? 1.0 : -1.0;
  const double C = 1.0;
  const SvmDualSolution s = solve_linear_dcd(ds.features(), ypm, C, 1e-4, 1000, 3);
  CHECK(s.converged);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    double f = s.bias;
    for (std::size_t j = 0; j < 2; ++j) f += s.weights[j] * ds.features()(i, j);
    CHECK(s.alpha[i] >= 0.0);
    CHECK(s.alpha[i] <= C);
    if (s.alpha[i] < C) CHECK(ypm[i] * f >= 1 - 1e-3);
  }
  const auto split = stratified_split(ds, 0.25, 1);
  const TrainedModel m = train(spec(Algorithm::svm, {{"kernel", std::string("linear")}}), split.train.features(),
                               split.train.labels());
  CHECK(pgtest::accuracy(split.test.labels(), m.predict(split.test.features())) >= 0.99);
  CHECK(m.importances().has_value());
}

TEST_CASE("rbf SMO solution satisfies KKT within tolerance") {
  const Dataset ds = make_noisy_xor(200, 2, 0.1, 5);
  std::vector<double> ypm(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) ypm[i] = ds.labels()[i] == 1 ? 1.0 : -1.0;
  const double C = 2.0, gamma = 2.0, tol = 1e-3;
  const SvmDualSolution s = solve_rbf_smo(ds.features(), ypm, C, gamma, tol, 100000);
  CHECK(s.converged);
  double balance = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) balance += s.alpha[i] * ypm[i];
  CHECK(std::abs(balance) < 1e-9);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    double f = s.bias;
    for (std::size_t j = 0; j < ds.n(); ++j) {
      f += s.alpha[j] * ypm[j] * rbf_kernel(ds.features().row(i), ds.features().row(j), gamma);
    }
    const double margin = ypm[i] * f;
    CHECK(s.alpha[i] >= 0.0);
    CHECK(s.alpha[i] <= C);
    if (s.alpha[i] == 0.0) CHECK(margin >= 1 - tol);
    if (s.alpha[i] == C) CHECK(margin <= 1 + tol);
    if (s.alpha[i] > 0.0 && s.alpha[i] < C) CHECK(std::abs(margin - 1) <= tol);
  }
}

TEST_CASE("SVM on the four-point XOR set") {
  CHECK(train_accuracy(spec(Algorithm::svm, {{"kernel", std::string("linear")}}), kXorX, kXorY) == 0.5);
  CHECK(train_accuracy(spec(Algorithm::svm, {{"kernel", std::string("rbf")}, {"gamma", 1.0}, {"C", 10.0}}), kXorX,
                       kXorY) == 1.0);
  CHECK_FALSE(train(spec(Algorithm::svm), kXorX, kXorY).importances().has_value());
}

TEST_CASE("duplicating the training set with C halved keeps the linear boundary") {
  const Matrix X{{0.0, 1.0}, {1.0, 2.0}, {2.0, 0.5}, {-1.0, 1.5}, {0.5, -0.5},
                 {3.0, 3.0}, {4.0, 2.5}, {3.5, 4.0}, {2.5, 1.0}, {1.5, 2.5}};
  const Labels y{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  Matrix X2 = X;
  Labels y2 = y;
  for (std::size_t i = 0; i < 10; ++i) {
    X2.append_row(X.row(i));
    y2.push_back(y[i]);
  }
  const auto base = Hyperparameters{{"kernel", std::string("linear")}, {"tol", 1e-6}, {"max_passes", std::int64_t{5000}}};
  Hyperparameters h1 = base, h2 = base;
  h1["C"] = 1.0;
  h2["C"] = 0.5;
  const TrainedModel ma = train(spec(Algorithm::svm, h1), X, y);
  const TrainedModel mb = train(spec(Algorithm::svm, h2), X2, y2);
  const auto* a = ma.as<SvmModel>();
  const auto* b = mb.as<SvmModel>();
  REQUIRE(a);
  REQUIRE(b);
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(a->weights()[j] - b->weights()[j]) < 1e-3);
  const Matrix probe = pgtest::random_matrix(200, 2, 3, 2.0);
  const auto da = a->decision_function(probe);
  const auto db = b->decision_function(probe);
  for (std::size_t i = 0; i < da.size(); ++i) {
    if (std::abs(da[i]) > 1e-2) CHECK((da[i] > 0) == (db[i] > 0));
  }
}

TEST_CASE("Platt scaling is monotone and calibrated on separable decisions") {
  const std::vector<double> f{-3, -2, -1, -0.5, 0.5, 1, 2, 3};
  const Labels y{0, 0, 0, 0, 1, 1, 1, 1};
  const PlattScaling p = fit_platt(f, y);
  CHECK(p.a < 0);
  for (std::size_t i = 1; i < f.size(); ++i) CHECK(p.probability(f[i]) > p.probability(f[i - 1]));
  CHECK(p.probability(3) > 0.5);
  CHECK(p.probability(-3) < 0.5);
}

TEST_CASE("all six learners clear the blobs floor and scores stay in [0, 1]") {
  const Dataset ds = make_blobs(2000, 2, 6.0, 42);
  const auto split = stratified_split(ds, 0.2, 42);
  for (Algorithm a : kPipelineAlgorithms) {
    const TrainedModel m = train(ModelSpec(a, {}, 42), split.train.features(), split.train.labels());
    const auto s = m.score(split.test.features());
    CHECK(std::all_of(s.begin(), s.end(), [](double v) { return v >= 0.0 && v <= 1.0; }));
    const Labels pred = m.predict(split.test.features());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(pred[i] == (s[i] >= 0.5 ? 1 : 0));
    CHECK_MESSAGE(pgtest::accuracy(split.test.labels(), pred) >= 0.90, algorithm_name(a));
  }
}

TEST_CASE("models round-trip through JSON with bitwise-equal scores") {
  const Dataset ds = make_noisy_xor(300, 3, 0.1, 7);
  const Matrix probe = pgtest::random_matrix(100, 3, 8);
  std::vector<ModelSpec> specs;
  for (Algorithm a : kPipelineAlgorithms) specs.emplace_back(a, Hyperparameters{}, 3);
  specs.emplace_back(Algorithm::decision_tree, Hyperparameters{}, 3);
  specs.emplace_back(Algorithm::svm, Hyperparameters{{"kernel", std::string("linear")}}, 3);
  for (const auto& s : specs) {
    const TrainedModel m = train(s, ds.features(), ds.labels());
    const std::string text = m.to_json().dump();
    const TrainedModel back = TrainedModel::from_json(nlohmann::json::parse(text));
    CHECK(back.spec() == m.spec());
    CHECK(back.input_dim() == 3);
    CHECK_MESSAGE(back.score(probe) == m.score(probe), s.canonical());
  }
  nlohmann::json bad = train(specs[0], ds.features(), ds.labels()).to_json();
  bad["format_version"] = 99;
  CHECK_THROWS_AS(TrainedModel::from_json(bad), IoError);
}

TEST_CASE("prediction rejects a dimension mismatch") {
  const TrainedModel m = train(spec(Algorithm::decision_tree), kXorX, kXorY);
  CHECK_THROWS_AS(m.predict(Matrix(3, 5)), InvalidArgument);
}
