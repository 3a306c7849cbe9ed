// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ptr/error.hpp"
#include "ptr/evalkit.hpp"

namespace ptr::evalkit {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

ClassCounts& counts_for(std::vector<ClassCounts>& all, const std::string& label) {
  for (auto& c : all) {
    if (c.label == label) return c;
  }
  all.push_back(ClassCounts{label});
  return all.back();
}

}  // namespace

double ClassCounts::precision() const { return ratio(tp, tp + fp); }
double ClassCounts::recall() const { return ratio(tp, tp + fn); }
double ClassCounts::f1() const { return harmonic(precision(), recall()); }

EvalReport micro_f1(const std::vector<std::string>& preds, const std::vector<std::string>& golds,
                    const std::optional<std::string>& negative_class) {
  if (preds.size() != golds.size()) {
    throw ShapeError("micro_f1: " + std::to_string(preds.size()) + " predictions for " +
                     std::to_string(golds.size()) + " gold labels");
  }
  if (golds.empty()) throw ShapeError("micro_f1: empty input");
  EvalReport r;
  r.n_instances = golds.size();
  r.negative_class = negative_class;
  for (const auto& g : golds) counts_for(r.per_class, g);
  for (const auto& p : preds) counts_for(r.per_class, p);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const std::string& g = golds[i];
    const std::string& p = preds[i];
    ++counts_for(r.per_class, g).support;
    if (p == g) {
      ++counts_for(r.per_class, g).tp;
      ++correct;
    } else {
      ++counts_for(r.per_class, p).fp;
      ++counts_for(r.per_class, g).fn;
    }
    const bool gold_neg = negative_class && g == *negative_class;
    const bool pred_neg = negative_class && p == *negative_class;
    if (!pred_neg && p == g) ++r.tp;
    if (!pred_neg && p != g) ++r.fp;
    if (!gold_neg && p != g) ++r.fn;
  }
  r.micro_precision = ratio(r.tp, r.tp + r.fp);
  r.micro_recall = ratio(r.tp, r.tp + r.fn);
  r.micro_f1 = harmonic(r.micro_precision, r.micro_recall);
  r.micro_f1_all = ratio(correct, golds.size());
  return r;
}

nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json doc;
  doc["n_instances"] = r.n_instances;
  doc["negative_class"] = r.negative_class ? nlohmann::ordered_json(*r.negative_class) : nullptr;
  doc["micro_precision"] = r.micro_precision;
  doc["micro_recall"] = r.micro_recall;
  doc["micro_f1"] = r.micro_f1;
  doc["tp"] = r.tp;
  doc["fp"] = r.fp;
  doc["fn"] = r.fn;
  doc["micro_f1_all"] = r.micro_f1_all;
  auto classes = nlohmann::ordered_json::array();
  for (const auto& c : r.per_class) {
    classes.push_back({{"label", c.label}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"support", c.support},
                       {"precision", c.precision()}, {"recall", c.recall()}, {"f1", c.f1()}});
  }
  doc["per_class"] = classes;
  return doc;
}

std::string percent(double value) {
  if (!std::isfinite(value)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * value);
  return buf;
}

std::string report_csv(const EvalReport& r) {
  std::string out = "class,P,R,F1,TP,FP,FN\n";
  auto row = [&](const std::string& name, double p, double rec, double f, std::size_t tp, std::size_t fp,
                 std::size_t fn) {
    out += name + "," + percent(p) + "," + percent(rec) + "," + percent(f) + "," + std::to_string(tp) + "," +
           std::to_string(fp) + "," + std::to_string(fn) + "\n";
  };
  for (const auto& c : r.per_class) row(c.label, c.precision(), c.recall(), c.f1(), c.tp, c.fp, c.fn);
  row("micro", r.micro_precision, r.micro_recall, r.micro_f1, r.tp, r.fp, r.fn);
  std::size_t correct = 0;
  for (const auto& c : r.per_class) correct += c.tp;
  const std::size_t wrong = r.n_instances - correct;
  row("micro_all", r.micro_f1_all, r.micro_f1_all, r.micro_f1_all, correct, wrong, wrong);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw DataError("cannot write " + path.string());
}

}  // namespace ptr::evalkit
