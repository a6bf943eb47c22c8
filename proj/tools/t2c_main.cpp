// t2c - subsequence time series clustering and window-size detection CLI
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "t2c/t2c.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::uint64_t mem_cap = 2ULL * 1024 * 1024 * 1024;
  int threads = 0;  // 0 -> hardware concurrency
  std::string method = "fast";

  int resolved_threads() const {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }

  t2c::ProfileOptions profile_options() const {
    t2c::ProfileOptions o;
    o.method = method == "naive" ? t2c::ProfileMethod::naive : t2c::ProfileMethod::fast;
    o.mem_cap_bytes = mem_cap;
    o.threads = resolved_threads();
    return o;
  }
};

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

json config_json(const GlobalOpts& g) {
  return json{{"seed", g.seed},
              {"mem_cap_bytes", g.mem_cap},
              {"threads", g.resolved_threads()},
              {"method", g.method}};
}

t2c::TimeSeries decimate(const t2c::TimeSeries& ts, std::size_t stride) {
  if (stride <= 1) return ts;
  std::vector<double> out;
  out.reserve(ts.size() / stride + 1);
  for (std::size_t i = 0; i < ts.size(); i += stride) out.push_back(ts.values[i]);
  return t2c::TimeSeries(std::move(out), ts.name);
}

void write_labels_csv(const std::string& path, std::size_t n, std::size_t big_n,
                      const std::vector<int>& subseq_labels,
                      const t2c::ExpandedLabels& expanded) {
  t2c::CsvWriter w(path);
  w.row({"index", "subseq_label", "timepoint_label", "confidence"});
  for (std::size_t i = 0; i < n; ++i) {
    w.row({std::to_string(i),
           i < big_n ? std::to_string(subseq_labels[i]) : std::string{},
           std::to_string(expanded.labels[i]), t2c::format_double(expanded.confidence[i])});
  }
}

std::vector<int> require_labels(const t2c::IngestResult& in, const char* who) {
  if (!in.labels) {
    throw std::invalid_argument(std::string(who) +
                                ": a --label-col with ground truth is required");
  }
  return *in.labels;
}

int run_cluster(const GlobalOpts& g, const std::string& input,
                const std::string& value_col, const std::string& label_col,
                std::size_t m, std::size_t ks, std::size_t k, std::size_t stride,
                const std::string& out_dir, bool want_pca) {
  const auto ingested = t2c::ingest_csv(input, value_col, label_col);
  const auto ts = decimate(ingested.series, stride);

  t2c::KMeansConfig cfg;
  cfg.k = k;
  cfg.seed = g.seed;
  cfg.threads = g.resolved_threads();
  t2c::PipelineOptions opts;
  opts.profile = g.profile_options();

  const auto result = t2c::time2cluster_full(ts, m, ks, cfg, opts);
  const auto expanded = t2c::expand_labels(result.clusters.labels,
                                           result.clusters.confidence, ts.size(), m);

  fs::create_directories(out_dir);
  const std::string labels_path = (fs::path(out_dir) / "labels.csv").string();
  write_labels_csv(labels_path, ts.size(), result.augmented.size(),
                   result.clusters.labels, expanded);

  json report;
  report["config"] = config_json(g);
  report["config"]["input"] = input;
  report["config"]["value_col"] = value_col;
  report["config"]["label_col"] = label_col;
  report["config"]["m"] = m;
  report["config"]["ks"] = ks;
  report["config"]["K"] = k;
  report["config"]["stride"] = stride;
  report["n"] = ts.size();
  report["num_subsequences"] = result.augmented.size();
  report["inertia"] = result.clusters.inertia;
  report["iterations_run"] = result.clusters.iterations_run;
  report["empty_cluster_reseeds"] = result.clusters.empty_cluster_reseeds;
  report["final_empty_clusters"] = result.clusters.final_empty_clusters;
  report["timings_s"] = json{{"correlation_matrix", result.timings.matrix_s},
                             {"augment", result.timings.augment_s},
                             {"kmeans", result.timings.kmeans_s},
                             {"confidence", result.timings.confidence_s}};
  report["outputs"] = json::array({"labels.csv"});

  if (want_pca) {
    const auto proj = t2c::project_2d(result.augmented);
    const std::string pca_path = (fs::path(out_dir) / "pca.csv").string();
    t2c::CsvWriter w(pca_path);
    w.row({"index", "pc1", "pc2"});
    for (std::size_t i = 0; i < proj.coords.size(); ++i) {
      w.row({std::to_string(i), t2c::format_double(proj.coords[i][0]),
             t2c::format_double(proj.coords[i][1])});
    }
    report["outputs"].push_back("pca.csv");
    report["pca_explained_variance"] =
        json::array({proj.explained_variance[0], proj.explained_variance[1]});
  }

  if (ingested.labels && stride <= 1) {
    const auto truth = t2c::LabelVector::from_raw(*ingested.labels);
    const auto pred = t2c::LabelVector::from_raw(expanded.labels);
    const auto rep = t2c::evaluate_labels(truth, pred);
    report["metrics"] = json{{"macro_f1", rep.macro_f1},
                             {"ari", rep.ari},
                             {"purity", rep.purity}};
  }

  write_json((fs::path(out_dir) / "report.json").string(), report);
  return 0;
}

int run_window(const GlobalOpts& g, const std::string& input,
               const std::string& value_col, std::size_t s, std::size_t e,
               bool variable, std::size_t batch, const std::string& out_dir) {
  const auto ingested = t2c::ingest_csv(input, value_col);
  fs::create_directories(out_dir);
  json out;
  out["config"] = config_json(g);
  out["config"]["input"] = input;
  out["config"]["s"] = s;

  if (variable) {
    const auto meta = t2c::variable_window(ingested.series, batch, s);
    out["config"]["batch"] = batch;
    out["batches"] = json::array();
    for (const auto& b : meta.batches) {
      json jb{{"begin", b.begin}, {"end", b.end}, {"ok", b.estimate.has_value()}};
      if (b.estimate) {
        jb["window"] = b.estimate->window;
        jb["confidence"] = b.estimate->confidence;
      } else {
        jb["note"] = b.note;
      }
      out["batches"].push_back(jb);
    }
    t2c::CsvWriter w((fs::path(out_dir) / "windowmeta.csv").string());
    w.row({"index", "window"});
    for (std::size_t i = 0; i < meta.per_point_window.size(); ++i) {
      w.row({std::to_string(i), t2c::format_double(meta.per_point_window[i])});
    }
    write_json((fs::path(out_dir) / "window.json").string(), out);
    return 0;
  }

  auto write_curve = [&](const t2c::MovingDistCurve& curve) {
    t2c::CsvWriter w((fs::path(out_dir) / "movingdist.csv").string());
    w.row({"w", "moving_dist", "is_local_min"});
    std::size_t mi = 0;
    for (std::size_t i = 0; i < curve.w_values.size(); ++i) {
      const bool is_min = mi < curve.local_minima.size() && curve.local_minima[mi] == i;
      if (is_min) ++mi;
      w.row({std::to_string(curve.w_values[i]), t2c::format_double(curve.scores[i]),
             is_min ? "1" : "0"});
    }
  };

  try {
    const auto est = t2c::multi_window_finder(ingested.series, s, e);
    out["window"] = est.window;
    out["confidence"] = est.confidence;
    out["residuals"] = est.residuals;
    json minima = json::array();
    for (std::size_t idx : est.curve.local_minima) {
      minima.push_back(est.curve.w_values[idx]);
    }
    out["minima_w"] = minima;
    write_curve(est.curve);
    write_json((fs::path(out_dir) / "window.json").string(), out);
    return 0;
  } catch (const t2c::no_periodicity_error& ex) {
    out["error"] = ex.what();
    write_curve(ex.curve);
    write_json((fs::path(out_dir) / "window.json").string(), out);
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}

int run_eval(const std::string& pred_path, const std::string& pred_col,
             const std::string& truth_path, const std::string& truth_value_col,
             const std::string& truth_label_col, const std::string& out_path) {
  const auto pred_in = t2c::ingest_csv(pred_path, pred_col);
  std::vector<int> pred_labels(pred_in.series.size());
  for (std::size_t i = 0; i < pred_labels.size(); ++i) {
    pred_labels[i] = static_cast<int>(pred_in.series.values[i]);
  }
  const auto truth_in = t2c::ingest_csv(truth_path, truth_value_col, truth_label_col);
  const auto truth_labels = require_labels(truth_in, "eval");
  if (truth_labels.size() != pred_labels.size()) {
    throw std::invalid_argument(
        "eval: prediction and truth lengths differ (" +
        std::to_string(pred_labels.size()) + " vs " + std::to_string(truth_labels.size()) + ")");
  }
  const auto rep = t2c::evaluate_labels(t2c::LabelVector::from_raw(truth_labels),
                                        t2c::LabelVector::from_raw(pred_labels));
  json out{{"macro_f1", rep.macro_f1},
           {"ari", rep.ari},
           {"purity", rep.purity},
           {"per_class_f1", rep.per_class_f1}};
  out["matching"] = json::array();
  for (const auto& [cls, clu] : rep.matching) {
    out["matching"].push_back(json::array({cls, clu}));
  }
  out["n"] = pred_labels.size();
  write_json(out_path, out);
  return 0;
}

int run_elbow(const GlobalOpts& g, const std::string& input,
              const std::string& value_col, std::size_t m, std::size_t ks,
              std::size_t k_min, std::size_t k_max, const std::string& out_dir) {
  const auto ingested = t2c::ingest_csv(input, value_col);
  if (k_min < 1 || k_max < k_min) {
    throw std::invalid_argument("elbow: need 1 <= k-min <= k-max");
  }
  t2c::KMeansConfig cfg;
  cfg.seed = g.seed;
  cfg.threads = g.resolved_threads();
  t2c::PipelineOptions opts;
  opts.profile = g.profile_options();
  std::vector<std::size_t> krange;
  for (std::size_t k = k_min; k <= k_max; ++k) krange.push_back(k);
  const auto curve = t2c::elbow_sweep(ingested.series, m, ks, krange, cfg, opts);
  fs::create_directories(out_dir);
  t2c::CsvWriter w((fs::path(out_dir) / "elbow.csv").string());
  w.row({"K", "inertia"});
  for (std::size_t i = 0; i < curve.ks_tested.size(); ++i) {
    w.row({std::to_string(curve.ks_tested[i]), t2c::format_double(curve.inertias[i])});
  }
  for (const auto& d : curve.diagnostics) std::cerr << "note: " << d << "\n";
  return 0;
}

int run_sensitivity(const GlobalOpts& g, const std::string& input,
                    const std::string& value_col, const std::string& label_col,
                    const std::vector<std::size_t>& m_values, const std::string& ks_rule,
                    std::size_t k, const std::string& out_dir) {
  const auto ingested = t2c::ingest_csv(input, value_col, label_col);
  const auto truth = t2c::LabelVector::from_raw(require_labels(ingested, "sensitivity"));
  std::function<std::size_t(std::size_t)> rule;
  if (ks_rule == "m") {
    rule = [](std::size_t m) { return m; };
  } else if (ks_rule.rfind("fixed:", 0) == 0) {
    const std::size_t fixed = std::stoul(ks_rule.substr(6));
    rule = [fixed](std::size_t) { return fixed; };
  } else {
    throw std::invalid_argument("sensitivity: --ks-rule must be 'm' or 'fixed:<N>'");
  }
  t2c::KMeansConfig cfg;
  cfg.threads = g.resolved_threads();
  t2c::PipelineOptions opts;
  opts.profile = g.profile_options();
  const auto rows =
      t2c::sensitivity_sweep(ingested.series, truth, m_values, rule, k, g.seed, cfg, opts);
  fs::create_directories(out_dir);
  t2c::CsvWriter w((fs::path(out_dir) / "sensitivity.csv").string());
  w.row({"m", "macro_f1"});
  for (const auto& r : rows) {
    w.row({std::to_string(r.m), t2c::format_double(r.macro_f1)});
  }
  return 0;
}

int run_robustness(const GlobalOpts& g, const std::string& input,
                   const std::string& value_col, const std::string& label_col,
                   std::size_t m, std::size_t ks, std::size_t k,
                   const std::vector<double>& fractions, std::size_t repeats,
                   const std::string& out_dir) {
  const auto ingested = t2c::ingest_csv(input, value_col, label_col);
  const auto truth = t2c::LabelVector::from_raw(require_labels(ingested, "robustness"));
  t2c::KMeansConfig cfg;
  cfg.threads = g.resolved_threads();
  t2c::PipelineOptions opts;
  opts.profile = g.profile_options();
  const auto rows = t2c::robustness_sweep(ingested.series, truth, m, ks, k, fractions,
                                          repeats, g.seed, cfg, opts);
  fs::create_directories(out_dir);
  t2c::CsvWriter w((fs::path(out_dir) / "robustness.csv").string());
  w.row({"fraction", "mean_macro_f1", "std_macro_f1"});
  for (const auto& r : rows) {
    w.row({t2c::format_double(r.fraction), t2c::format_double(r.mean_f1),
           t2c::format_double(r.std_f1)});
  }
  return 0;
}

int run_synth(const GlobalOpts& g, const std::string& name, const std::string& out,
              const std::string& params_out) {
  const auto sc = t2c::scenario(name, g.seed);
  t2c::CsvWriter w(out);
  w.row({"t", "value", "label"});
  for (std::size_t t = 0; t < sc.series.size(); ++t) {
    w.row({std::to_string(t), t2c::format_double(sc.series.values[t]),
           std::to_string(sc.truth.labels[t])});
  }
  json params{{"name", sc.name}, {"seed", g.seed},      {"n", sc.series.size()},
              {"m", sc.m},       {"ks", sc.ks},         {"K", sc.k}};
  if (!params_out.empty()) {
    write_json(params_out, params);
  } else if (out != "-") {
    std::cout << params.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subsequence time series clustering (pooled correlation pipeline), "
               "window-size detection, and evaluation harnesses"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "RNG seed; equal seeds give byte-identical outputs");
  app.add_option("--mem-cap", g.mem_cap, "memory cap in bytes for the N x N matrix");
  app.add_option("--threads", g.threads, "worker threads (0 = auto); results do not depend on it");
  app.add_option("--method", g.method, "distance profile path: fast|naive")
      ->check(CLI::IsMember({"fast", "naive"}));

  // cluster
  auto* cluster = app.add_subcommand("cluster", "run the full pipeline, write labels.csv + report.json");
  std::string input, value_col = "value", label_col;
  std::size_t m = 0, ks = 0, K = 2, stride = 1;
  std::string out_dir = ".";
  bool want_pca = false;
  cluster->add_option("--input", input, "CSV input path ('-' for stdin)")->required();
  cluster->add_option("--value-col", value_col, "value column name or 0-based index");
  cluster->add_option("--label-col", label_col, "optional ground-truth label column");
  cluster->add_option("-m,--window", m, "subsequence length")->required();
  cluster->add_option("--ks", ks, "BAG kernel size")->required();
  cluster->add_option("-K,--clusters", K, "number of clusters");
  cluster->add_option("--stride", stride, "decimate the input, keeping every stride-th point");
  cluster->add_option("--out-dir", out_dir, "output directory");
  cluster->add_flag("--pca", want_pca, "also write a 2-D PCA projection (pca.csv)");

  // window
  auto* window = app.add_subcommand("window", "window-size detection, write window.json + movingdist.csv");
  std::string w_input, w_value_col = "value", w_out_dir = ".";
  std::size_t w_s = 10, w_e = 0, w_batch = 5000;
  bool w_variable = false;
  window->add_option("--input", w_input, "CSV input path")->required();
  window->add_option("--value-col", w_value_col, "value column name or 0-based index");
  window->add_option("--s", w_s, "smallest window to test");
  window->add_option("--e", w_e, "initial largest window (0 = min(1000, n/2))");
  window->add_flag("--variable", w_variable, "per-batch variable window sizes");
  window->add_option("--batch", w_batch, "batch length for --variable");
  window->add_option("--out-dir", w_out_dir, "output directory");

  // eval
  auto* eval = app.add_subcommand("eval", "metrics between labels.csv and ground truth");
  std::string e_pred, e_pred_col = "timepoint_label", e_truth, e_truth_value = "value",
              e_truth_label = "label", e_out = "metrics.json";
  eval->add_option("--pred", e_pred, "labels.csv from the cluster subcommand")->required();
  eval->add_option("--pred-col", e_pred_col, "prediction column");
  eval->add_option("--truth", e_truth, "CSV with ground-truth labels")->required();
  eval->add_option("--truth-value-col", e_truth_value, "any numeric column of the truth file");
  eval->add_option("--truth-label-col", e_truth_label, "label column of the truth file");
  eval->add_option("--out", e_out, "metrics JSON path");

  // elbow
  auto* elbow = app.add_subcommand("elbow", "inertia-vs-K sweep, write elbow.csv");
  std::string el_input, el_value_col = "value", el_out_dir = ".";
  std::size_t el_m = 0, el_ks = 0, el_kmin = 1, el_kmax = 6;
  elbow->add_option("--input", el_input, "CSV input path")->required();
  elbow->add_option("--value-col", el_value_col, "value column");
  elbow->add_option("-m,--window", el_m, "subsequence length")->required();
  elbow->add_option("--ks", el_ks, "BAG kernel size")->required();
  elbow->add_option("--k-min", el_kmin, "first K");
  elbow->add_option("--k-max", el_kmax, "last K");
  elbow->add_option("--out-dir", el_out_dir, "output directory");

  // sensitivity
  auto* sens = app.add_subcommand("sensitivity", "Macro-F1 across window lengths");
  std::string s_input, s_value_col = "value", s_label_col = "label", s_out_dir = ".",
              s_ks_rule = "m";
  std::vector<std::size_t> s_m_values;
  std::size_t s_K = 2;
  sens->add_option("--input", s_input, "CSV input with ground-truth labels")->required();
  sens->add_option("--value-col", s_value_col, "value column");
  sens->add_option("--label-col", s_label_col, "label column");
  sens->add_option("--m-values", s_m_values, "window lengths to test")->required()->delimiter(',');
  sens->add_option("--ks-rule", s_ks_rule, "'m' (ks = m) or 'fixed:<N>'");
  sens->add_option("-K,--clusters", s_K, "number of clusters");
  sens->add_option("--out-dir", s_out_dir, "output directory");

  // robustness
  auto* rob = app.add_subcommand("robustness", "Macro-F1 under spike injection");
  std::string r_input, r_value_col = "value", r_label_col = "label", r_out_dir = ".";
  std::size_t r_m = 0, r_ks = 0, r_K = 2, r_repeats = 50;
  std::vector<double> r_fractions;
  rob->add_option("--input", r_input, "CSV input with ground-truth labels")->required();
  rob->add_option("--value-col", r_value_col, "value column");
  rob->add_option("--label-col", r_label_col, "label column");
  rob->add_option("-m,--window", r_m, "subsequence length")->required();
  rob->add_option("--ks", r_ks, "BAG kernel size")->required();
  rob->add_option("-K,--clusters", r_K, "number of clusters");
  rob->add_option("--fractions", r_fractions, "spike fractions, e.g. 0,0.005,0.01")
      ->required()
      ->delimiter(',');
  rob->add_option("--repeats", r_repeats, "independent injections per fraction");
  rob->add_option("--out-dir", r_out_dir, "output directory");

  // synth
  auto* synth = app.add_subcommand("synth", "emit a named scenario as CSV");
  std::string sy_name, sy_out = "-", sy_params;
  synth->add_option("--name", sy_name, "walkrun|walkrunplay|stairs|tilt|noisetail")->required();
  synth->add_option("--out", sy_out, "CSV output path ('-' for stdout)");
  synth->add_option("--params-out", sy_params, "write recommended m/ks/K as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cluster->parsed()) {
      return run_cluster(g, input, value_col, label_col, m, ks, K, stride, out_dir, want_pca);
    }
    if (window->parsed()) {
      return run_window(g, w_input, w_value_col, w_s, w_e, w_variable, w_batch, w_out_dir);
    }
    if (eval->parsed()) {
      return run_eval(e_pred, e_pred_col, e_truth, e_truth_value, e_truth_label, e_out);
    }
    if (elbow->parsed()) {
      return run_elbow(g, el_input, el_value_col, el_m, el_ks, el_kmin, el_kmax, el_out_dir);
    }
    if (sens->parsed()) {
      return run_sensitivity(g, s_input, s_value_col, s_label_col, s_m_values, s_ks_rule,
                             s_K, s_out_dir);
    }
    if (rob->parsed()) {
      return run_robustness(g, r_input, r_value_col, r_label_col, r_m, r_ks, r_K,
                            r_fractions, r_repeats, r_out_dir);
    }
    if (synth->parsed()) {
      return run_synth(g, sy_name, sy_out, sy_params);
    }
  } catch (const t2c::resource_error& ex) {
    std::cerr << "resource error: " << ex.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
