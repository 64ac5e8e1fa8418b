// SPDX-License-Identifier: Apache-2.0
#include "geoscatt/evalhead/cv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "geoscatt/common/error.hpp"
#include "geoscatt/common/parallel.hpp"
#include "geoscatt/common/rng.hpp"

namespace geoscatt {

namespace {

constexpr const char *kHeader = "fold,n,tp,tn,fp,fn,acc,se,sp,f1,mcc,auc,undefined\n";

std::string num(double v) {
  if (std::isnan(v)) {
    return "";
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string report_row(const std::string &name, const MetricsReport &r) {
  return name + ',' + std::to_string(r.size()) + ',' + std::to_string(r.tp) + ',' +
         std::to_string(r.tn) + ',' + std::to_string(r.fp) + ',' + std::to_string(r.fn) +
         ',' + num(r.acc) + ',' + num(r.se) + ',' + num(r.sp) + ',' + num(r.f1) + ',' +
         num(r.mcc) + ',' + num(r.auc) + ',' + std::to_string(r.undefined) + '\n';
}

std::string summary_row(const std::string &name, const MetricSummary &s) {
  return name + ",,,,,," + num(s.acc) + ',' + num(s.se) + ',' + num(s.sp) + ',' +
         num(s.f1) + ',' + num(s.mcc) + ',' + num(s.auc) + ",\n";
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
}

// Mean and sample std of one field over the folds, skipping NaN.
template <class Get>
std::pair<double, double> mean_std(const std::vector<MetricsReport> &folds, Get get) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto &r: folds) {
    if (!std::isnan(get(r))) {
      sum += get(r);
      ++count;
    }
  }
  if (count == 0) {
    return { NAN, NAN };
  }
  const double mean = sum / static_cast<double>(count);
  if (count == 1) {
    return { mean, NAN };
  }
  double ss = 0.0;
  for (const auto &r: folds) {
    if (!std::isnan(get(r))) {
      ss += (get(r) - mean) * (get(r) - mean);
    }
  }
  return { mean, std::sqrt(ss / static_cast<double>(count - 1)) };
}

std::string fixed(double v) {
  if (std::isnan(v)) {
    return "     -";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%6.4f", v);
  return buf;
}

}  // namespace

std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t k,
                                          std::uint64_t seed) {
  const std::size_t n = y.size();
  if (k < 2) {
    throw Error(ErrorCode::kConfigError, "k must be at least 2");
  }
  if (k > n) {
    throw Error(ErrorCode::kDegenerateSplit,
                std::to_string(k) + " folds for " + std::to_string(n) + " samples");
  }
  std::vector<std::size_t> members[2];
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != 0 && y[i] != 1) {
      throw Error(ErrorCode::kFormatError, "label is not 0 or 1", i);
    }
    members[y[i]].push_back(i);
  }
  const std::size_t need = k == n ? 2 : k;
  for (int cls = 0; cls <= 1; ++cls) {
    if (members[cls].size() < need) {
      throw Error(ErrorCode::kDegenerateSplit,
                  "class " + std::to_string(cls) + " has " +
                      std::to_string(members[cls].size()) + " samples for " +
                      std::to_string(k) + " folds");
    }
  }
  Rng rng(seed);
  std::vector<std::size_t> fold(n);
  std::size_t pos = 0;
  for (auto &m: members) {
    rng.shuffle(std::span<std::size_t>(m));
    for (std::size_t i: m) {
      fold[i] = pos++ % k;
    }
  }
  return fold;
}

CvReport kfold_cv(const Matrix &X, std::span<const int> y, std::size_t k,
                  std::uint64_t seed, const HeadConfig &cfg, unsigned threads) {
  if (X.rows() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(X.rows()) + " rows but " + std::to_string(y.size()) +
                    " labels");
  }
  CvReport report;
  report.fold_of = stratified_folds(y, k, seed);
  report.folds.resize(k);
  report.oof_scores.assign(y.size(), 0.0);
  parallel_for(k, threads, [&](std::size_t f) {
    std::vector<std::size_t> train, test;
    std::vector<int> y_train, y_test;
    for (std::size_t i = 0; i < y.size(); ++i) {
      (report.fold_of[i] == f ? test : train).push_back(i);
      (report.fold_of[i] == f ? y_test : y_train).push_back(y[i]);
    }
    const LogRegModel model =
        fit_logreg(select_rows(X, train), y_train, cfg.l2, cfg.solver);
    const std::vector<double> p = predict_proba(model, select_rows(X, test));
    report.folds[f] = metrics(y_test, p, cfg.threshold);
    for (std::size_t t = 0; t < test.size(); ++t) {
      report.oof_scores[test[t]] = p[t];
    }
  });
  report.pooled = metrics(y, report.oof_scores, cfg.threshold);

  auto fill = [&](double MetricSummary::*field, auto get) {
    const auto [m, s] = mean_std(report.folds, get);
    report.mean.*field = m;
    report.stddev.*field = s;
  };
  fill(&MetricSummary::acc, [](const MetricsReport &r) { return r.acc; });
  fill(&MetricSummary::se, [](const MetricsReport &r) { return r.se; });
  fill(&MetricSummary::sp, [](const MetricsReport &r) { return r.sp; });
  fill(&MetricSummary::f1, [](const MetricsReport &r) { return r.f1; });
  fill(&MetricSummary::mcc, [](const MetricsReport &r) { return r.mcc; });
  fill(&MetricSummary::auc, [](const MetricsReport &r) { return r.auc; });
  return report;
}

void write_cv_csv(const std::filesystem::path &path, const CvReport &report) {
  std::string text = kHeader;
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    text += report_row(std::to_string(f), report.folds[f]);
  }
  text += summary_row("mean", report.mean);
  text += summary_row("std", report.stddev);
  text += report_row("pooled", report.pooled);
  write_text(path, text);
}

void print_cv_table(std::ostream &out, const CvReport &report) {
  out << "fold      n     ACC     SE      SP      F1      MCC     AUC\n";
  auto line = [&](const std::string &name, const std::string &n, double acc, double se,
                  double sp, double f1, double mcc, double auc) {
    char head[32];
    std::snprintf(head, sizeof(head), "%-7s %5s", name.c_str(), n.c_str());
    out << head << "  " << fixed(acc) << "  " << fixed(se) << "  " << fixed(sp) << "  "
        << fixed(f1) << "  " << fixed(mcc) << "  " << fixed(auc) << '\n';
  };
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const auto &r = report.folds[f];
    line(std::to_string(f), std::to_string(r.size()), r.acc, r.se, r.sp, r.f1, r.mcc,
         r.auc);
  }
  const auto &m = report.mean;
  const auto &s = report.stddev;
  const auto &p = report.pooled;
  line("mean", "", m.acc, m.se, m.sp, m.f1, m.mcc, m.auc);
  line("std", "", s.acc, s.se, s.sp, s.f1, s.mcc, s.auc);
  line("pooled", std::to_string(p.size()), p.acc, p.se, p.sp, p.f1, p.mcc, p.auc);
}

void write_metrics_csv(const std::filesystem::path &path, const std::string &name,
                       const MetricsReport &report) {
  write_text(path, std::string(kHeader) + report_row(name, report));
}

void print_metrics_table(std::ostream &out, const MetricsReport &r) {
  out << "TP " << r.tp << "  TN " << r.tn << "  FP " << r.fp << "  FN " << r.fn << '\n'
      << "ACC " << fixed(r.acc) << "  SE " << fixed(r.se) << "  SP " << fixed(r.sp)
      << "  F1 " << fixed(r.f1) << "  MCC " << fixed(r.mcc) << "  AUC " << fixed(r.auc)
      << '\n';
}

}  // namespace geoscatt
