// accentlab/regress.hpp

// Copyright 2026  Accentlab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ACCENTLAB_REGRESS_HPP_
#define ACCENTLAB_REGRESS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "accentlab/error.hpp"
#include "accentlab/matrix.hpp"

namespace accentlab {

// Pearson correlation with population statistics. A constant vector has no
// defined correlation; it reports 0 and raises the degenerate flag instead
// of propagating NaN.
inline double pearson(std::span<const double> x, std::span<const double> y,
                      bool* degenerate = nullptr) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidInput("pearson: need two equal-length vectors of size >= 2");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  if (degenerate) *degenerate = false;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Univariate linear regression test: per feature j,
// F_j = r_j^2 / (1 - r_j^2) * (n - 2) with r_j the Pearson correlation of
// column j with the labels. Constant columns score 0; |r| = 1 maps to the
// largest finite double.
inline std::vector<double> f_regression_scores(const Matrix& X, std::span<const double> y) {
  if (X.rows() != static_cast<int>(y.size()))
    throw InvalidInput("f_regression_scores: row count != label count");
  if (X.rows() < 3) throw InvalidInput("f_regression_scores: need at least 3 rows");
  {
    bool degenerate_y = true;
    for (int i = 1; i < X.rows(); ++i)
      if (y[i] != y[0]) degenerate_y = false;
    if (degenerate_y) throw DegenerateLabels("f_regression_scores: constant labels");
  }
  std::vector<double> scores(X.cols(), 0.0);
  std::vector<double> column(X.rows());
  for (int j = 0; j < X.cols(); ++j) {
    for (int i = 0; i < X.rows(); ++i) column[i] = X(i, j);
    bool degenerate = false;
    double r = pearson(column, y, &degenerate);
    if (degenerate) {
      scores[j] = 0.0;
      continue;
    }
    double r2 = std::min(r * r, 1.0);
    scores[j] = r2 >= 1.0 - 1e-12 ? std::numeric_limits<double>::max()
                                  : r2 / (1.0 - r2) * (X.rows() - 2);
  }
  return scores;
}

// Ridge regression on top-k selected features, standardized with training
// statistics, intercept unpenalized.
struct RidgeModel {
  int source_dim = 0;
  std::vector<int> selected;      // feature indices, in selection-rank order
  std::vector<double> mean;       // per selected feature, from training data
  std::vector<double> std;        // floored population std, from training data
  std::vector<double> weights;
  double intercept = 0.0;
  double lambda = 0.0;
};

namespace detail {

// Gaussian elimination with partial pivoting for the small symmetric systems
// ridge produces. Throws SingularSystem when a pivot collapses, which with
// lambda > 0 cannot happen.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a,
                                        std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[i][j]));
  const double tol = 1e-12 * std::max(scale, 1.0);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(a[i][col]) > std::abs(a[pivot][col])) pivot = i;
    if (std::abs(a[pivot][col]) <= tol)
      throw SingularSystem("solve_linear: singular system (collinear features with lambda = 0?)");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int i = col + 1; i < n; ++i) {
      double factor = a[i][col] / a[col][col];
      for (int j = col; j < n; ++j) a[i][j] -= factor * a[col][j];
      b[i] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double acc = b[i];
    for (int j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return x;
}

// Selection ranking: descending F score, ties to the lower feature index.
// With fewer than 3 rows the F test is undefined and the first k features
// are taken in index order.
inline std::vector<int> select_top_k(const Matrix& X, std::span<const double> y, int k) {
  std::vector<int> order(X.cols());
  std::iota(order.begin(), order.end(), 0);
  if (X.rows() >= 3) {
    std::vector<double> scores = f_regression_scores(X, y);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
  }
  order.resize(k);
  return order;
}

}  // namespace detail

inline RidgeModel ridge_fit(const Matrix& X, std::span<const double> y, double lambda, int k) {
  if (X.rows() != static_cast<int>(y.size()) || X.rows() < 2)
    throw InvalidInput("ridge_fit: need n >= 2 rows with matching labels");
  if (k < 1 || k > X.cols())
    throw InvalidConfig("ridge_fit: k must be in [1, " + std::to_string(X.cols()) + "]");
  if (lambda < 0.0) throw InvalidConfig("ridge_fit: lambda must be >= 0");

  RidgeModel model;
  model.source_dim = X.cols();
  model.lambda = lambda;
  model.selected = detail::select_top_k(X, y, k);

  const int n = X.rows();
  const double std_floor = 1e-12;
  model.mean.resize(k);
  model.std.resize(k);
  Matrix Z(n, k);
  for (int j = 0; j < k; ++j) {
    int src = model.selected[j];
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += X(i, src);
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += (X(i, src) - mean) * (X(i, src) - mean);
    var /= n;
    model.mean[j] = mean;
    model.std[j] = std::max(std::sqrt(var), std_floor);
    for (int i = 0; i < n; ++i) Z(i, j) = (X(i, src) - mean) / model.std[j];
  }

  model.intercept = std::accumulate(y.begin(), y.end(), 0.0) / n;

  // (Z^T Z + lambda I) w = Z^T (y - y_bar)
  std::vector<std::vector<double>> gram(k, std::vector<double>(k, 0.0));
  std::vector<double> rhs(k, 0.0);
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += Z(i, a) * Z(i, b);
      gram[a][b] = acc;
      gram[b][a] = acc;
    }
    gram[a][a] += lambda;
    for (int i = 0; i < n; ++i) rhs[a] += Z(i, a) * (y[i] - model.intercept);
  }
  model.weights = detail::solve_linear(std::move(gram), std::move(rhs));
  return model;
}

inline double ridge_predict(const RidgeModel& m, std::span<const double> x, bool clamp = false) {
  if (static_cast<int>(x.size()) != m.source_dim)
    throw InvalidInput("ridge_predict: feature dim " + std::to_string(x.size()) +
                       " != model dim " + std::to_string(m.source_dim));
  double acc = m.intercept;
  for (size_t j = 0; j < m.selected.size(); ++j)
    acc += m.weights[j] * (x[m.selected[j]] - m.mean[j]) / m.std[j];
  if (clamp) acc = std::clamp(acc, 1.0, 4.0);
  return acc;
}

// PCC and MAE between prediction and reference. A constant vector on either
// side makes the PCC 0 with the degenerate flag raised.
inline std::pair<double, double> compute_metrics(std::span<const double> y_true,
                                                 std::span<const double> y_pred,
                                                 bool* degenerate = nullptr) {
  if (y_true.size() != y_pred.size())
    throw InvalidInput("compute_metrics: length mismatch");
  if (y_true.size() < 2) throw InvalidInput("compute_metrics: need at least 2 pairs");
  double pcc = pearson(y_true, y_pred, degenerate);
  double mae = 0.0;
  for (size_t i = 0; i < y_true.size(); ++i) mae += std::abs(y_true[i] - y_pred[i]);
  mae /= static_cast<double>(y_true.size());
  return {pcc, mae};
}

struct DatasetRow {
  std::string speaker;
  std::vector<double> features;
  double label = 0.0;
};
using Dataset = std::vector<DatasetRow>;

struct FoldChoice {
  double lambda = 0.0;
  int k = 0;
};

struct EvalReport {
  std::vector<std::string> speakers;
  std::vector<double> y_true;
  std::vector<double> y_pred;
  std::vector<FoldChoice> fold_choices;  // hyperparameters chosen per outer fold
  double pcc = 0.0;
  double mae = 0.0;
  bool degenerate_pcc = false;
};

namespace detail {

// Mean squared leave-one-out error of one (lambda, k) candidate on a
// training fold; infinity when any inner fit is unusable.
inline double inner_loo_mse(const Dataset& fold, double lambda, int k) {
  const int n = static_cast<int>(fold.size());
  const int dim = static_cast<int>(fold.front().features.size());
  double sse = 0.0;
  for (int leave = 0; leave < n; ++leave) {
    Matrix X(n - 1, dim);
    std::vector<double> y;
    y.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
      if (i == leave) continue;
      for (int j = 0; j < dim; ++j) X(static_cast<int>(y.size()), j) = fold[i].features[j];
      y.push_back(fold[i].label);
    }
    try {
      RidgeModel m = ridge_fit(X, y, lambda, k);
      double pred = ridge_predict(m, fold[leave].features);
      sse += (pred - fold[leave].label) * (pred - fold[leave].label);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return sse / n;
}

}  // namespace detail

// Leave-one-speaker-out evaluation: each speaker is predicted by a model
// fitted to all others, with (lambda, k) chosen per outer fold by an inner
// leave-one-out grid search (ties go to the smallest lambda, then the
// smallest k). The held-out row is never touched during fitting.
inline EvalReport loso_evaluate(const Dataset& data, std::span<const double> lambda_grid,
                                std::span<const int> k_grid, bool clamp = false) {
  if (data.size() < 3) throw InvalidInput("loso_evaluate: need at least 3 speakers");
  if (lambda_grid.empty() || k_grid.empty())
    throw InvalidConfig("loso_evaluate: empty hyperparameter grid");
  const int dim = static_cast<int>(data.front().features.size());
  for (const DatasetRow& row : data) {
    if (static_cast<int>(row.features.size()) != dim)
      throw InvalidInput("loso_evaluate: inconsistent feature dimensions");
    if (!std::isfinite(row.label)) throw InvalidInput("loso_evaluate: non-finite label");
  }

  std::vector<double> lambdas(lambda_grid.begin(), lambda_grid.end());
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  std::vector<int> ks;
  for (int k : k_grid) ks.push_back(std::clamp(k, 1, dim));
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  EvalReport report;
  for (size_t held = 0; held < data.size(); ++held) {
    Dataset fold;
    fold.reserve(data.size() - 1);
    for (size_t i = 0; i < data.size(); ++i)
      if (i != held) fold.push_back(data[i]);

    bool constant_labels = true;
    for (const DatasetRow& row : fold)
      if (row.label != fold.front().label) constant_labels = false;
    if (constant_labels)
      throw DegenerateLabels("loso_evaluate: constant labels in the fold holding out '" +
                             data[held].speaker + "'");

    FoldChoice choice{lambdas.front(), ks.front()};
    if (fold.size() >= 3 && (lambdas.size() > 1 || ks.size() > 1)) {
      double best_mse = std::numeric_limits<double>::infinity();
      for (double lambda : lambdas) {
        for (int k : ks) {
          double mse = detail::inner_loo_mse(fold, lambda, k);
          if (mse < best_mse) {
            best_mse = mse;
            choice = {lambda, k};
          }
        }
      }
      if (!std::isfinite(best_mse))
        throw SingularSystem("loso_evaluate: no usable hyperparameter candidate for fold '" +
                             data[held].speaker + "'");
    }

    Matrix X(static_cast<int>(fold.size()), dim);
    std::vector<double> y;
    y.reserve(fold.size());
    for (const DatasetRow& row : fold) {
      for (int j = 0; j < dim; ++j) X(static_cast<int>(y.size()), j) = row.features[j];
      y.push_back(row.label);
    }
    RidgeModel m = ridge_fit(X, y, choice.lambda, choice.k);

    report.speakers.push_back(data[held].speaker);
    report.y_true.push_back(data[held].label);
    report.y_pred.push_back(ridge_predict(m, data[held].features, clamp));
    report.fold_choices.push_back(choice);
  }

  auto [pcc, mae] = compute_metrics(report.y_true, report.y_pred, &report.degenerate_pcc);
  report.pcc = pcc;
  report.mae = mae;
  return report;
}

}  // namespace accentlab

#endif  // ACCENTLAB_REGRESS_HPP_
