// Command-line front end: synthesize benchmark datasets, sweep a dataset for
// its confounding index, run the restricted-permutation baseline, and check
// series for delta-monotonicity. Every run directory is reproducible
// byte-for-byte from the command line (or config file) that produced it.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "confound/confound.hpp"

namespace fs = std::filesystem;
using confound::Error;
using nlohmann::json;

namespace {

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& tok : confound::detail::split_csv_line(text)) {
    double v;
    if (!confound::detail::parse_double(tok, v))
      throw Error(std::string(what) + ": '" + tok + "' is not a number");
    out.push_back(v);
  }
  return out;
}

// Config-file support: a flat JSON object whose keys are the long option
// names. Values apply only where the command line stayed silent.
class ConfigMerge {
 public:
  template <typename T>
  void bind(CLI::Option* opt, T& var) {
    entries_.push_back({opt, [&var](const json& v) { var = v.get<T>(); }});
  }

  void apply(const std::string& path) const {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(path + ": " + e.what());
    }
    if (!cfg.is_object()) throw Error(path + ": config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      bool known = false;
      for (const auto& e : entries_) {
        const auto& names = e.opt->get_lnames();
        if (std::find(names.begin(), names.end(), key) == names.end()) continue;
        known = true;
        if (e.opt->count() == 0) e.set(value);
        break;
      }
      if (!known) throw Error(path + ": unknown config key '" + key + "'");
    }
  }

 private:
  struct Entry {
    CLI::Option* opt;
    std::function<void(const json&)> set;
  };
  std::vector<Entry> entries_;
};

void ensure_dir(const std::string& out) { fs::create_directories(out); }

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string out, config;
  std::uint64_t seed = 0;
  double ky = 0.0, kc = 0.0;
  std::string pattern = "abcd";
  std::string effects;  // comma list overriding ky/kc
  std::size_t cell_n = 100;
  std::string counts;  // comma list of 4 cell sizes
  std::size_t features = 100;
};

int run_simulate(const SimulateArgs& a) {
  std::array<double, 4> effects{a.ky, a.ky, a.kc, a.kc};
  if (!a.effects.empty()) {
    const auto v = parse_double_list(a.effects, "--effects");
    if (v.size() != 4) throw Error("--effects needs exactly 4 values");
    std::copy(v.begin(), v.end(), effects.begin());
  }
  std::array<std::size_t, 4> counts{a.cell_n, a.cell_n, a.cell_n, a.cell_n};
  if (!a.counts.empty()) {
    const auto v = parse_double_list(a.counts, "--counts");
    if (v.size() != 4) throw Error("--counts needs exactly 4 values");
    for (int i = 0; i < 4; ++i) {
      if (v[i] < 0 || v[i] != std::floor(v[i]))
        throw Error("--counts entries must be non-negative integers");
      counts[i] = static_cast<std::size_t>(v[i]);
    }
  }

  const confound::SimConfig cfg =
      confound::preset_pattern(a.pattern, effects, a.seed, a.features);
  const confound::Dataset ds = confound::generate(cfg, counts);

  ensure_dir(a.out);
  confound::write_csv(ds, a.out + "/data.csv");
  json rc;
  rc["kind"] = "simulate";
  rc["seed"] = a.seed;
  rc["features"] = a.features;
  rc["pattern"] = a.pattern;
  rc["effects"] = effects;
  rc["counts"] = counts;
  confound::write_json(rc, a.out + "/resolved-config.json");
  std::cout << "wrote " << ds.samples.size() << " samples to " << a.out << "/data.csv\n";
  return 0;
}

// --- classifier options (shared by ci and rp) -------------------------------

struct ClfArgs {
  double l2 = confound::LogisticRegressionConfig{}.l2;
  double learn_rate = confound::LogisticRegressionConfig{}.learn_rate;
  std::size_t max_iters = confound::LogisticRegressionConfig{}.max_iters;
  double grad_tol = confound::LogisticRegressionConfig{}.grad_tol;
};

confound::LogisticRegression make_classifier(const ClfArgs& a) {
  confound::LogisticRegressionConfig cfg;
  cfg.l2 = a.l2;
  cfg.learn_rate = a.learn_rate;
  cfg.max_iters = a.max_iters;
  cfg.grad_tol = a.grad_tol;
  return confound::LogisticRegression(cfg);
}

void record_classifier(json& rc, const ClfArgs& a) {
  rc["l2"] = a.l2;
  rc["learn-rate"] = a.learn_rate;
  rc["max-iters"] = a.max_iters;
  rc["grad-tol"] = a.grad_tol;
}

template <typename Args, typename App>
void bind_classifier(App* cmd, ConfigMerge& merge, Args& a) {
  merge.bind(cmd->add_option("--l2", a.clf.l2, "ridge penalty on the logistic weights"),
             a.clf.l2);
  merge.bind(cmd->add_option("--learn-rate", a.clf.learn_rate, "initial gradient step size"),
             a.clf.learn_rate);
  merge.bind(cmd->add_option("--max-iters", a.clf.max_iters, "gradient descent iteration cap"),
             a.clf.max_iters);
  merge.bind(cmd->add_option("--grad-tol", a.clf.grad_tol,
                             "stop when the gradient max-norm falls below this"),
             a.clf.grad_tol);
}

// --- ci ---------------------------------------------------------------------

struct CiArgs {
  std::string data, out, config;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::size_t n = 0;
  double step = 0.1;
  std::size_t step_samples = 0;
  std::size_t repeats = 10;
  double heldout = 0.2;
  std::size_t balance_n = 0;
  double delta = 0.0;
  double delta_floor = 0.01;
  std::string label_col = "label";
  std::string conf_col = "confounder";
  std::string neg_label, pos_label, alpha, beta;
  double bin_width = 0.0, bin_start = 0.0, bin_distance = 0.0;
  ClfArgs clf;
};

confound::Dataset load_ci_data(const CiArgs& a) {
  confound::CsvSchema schema;
  schema.label_column = a.label_col;
  schema.confounder_column = a.conf_col;
  if (!a.neg_label.empty() || !a.pos_label.empty()) {
    if (a.neg_label.empty() || a.pos_label.empty())
      throw Error("--neg-label and --pos-label must be given together");
    schema.label_mapping = std::make_pair(a.neg_label, a.pos_label);
  }
  if (!a.alpha.empty() || !a.beta.empty()) {
    if (a.alpha.empty() || a.beta.empty())
      throw Error("--alpha and --beta must be given together");
    schema.confounder_mapping = std::make_pair(a.alpha, a.beta);
  }
  confound::Dataset ds = confound::load_csv(a.data, schema);
  if (a.bin_width > 0.0) {
    confound::BinSpec spec;
    spec.bin_width = a.bin_width;
    spec.start = a.bin_start;
    spec.distance = a.bin_distance;
    ds = confound::bin_continuous(ds, a.conf_col, spec);
  }
  return ds;
}

int run_ci(const CiArgs& a) {
  const confound::Dataset ds = load_ci_data(a);

  confound::SweepConfig cfg;
  cfg.n_per_cell = a.n;
  cfg.step = a.step;
  cfg.step_samples = a.step_samples;
  cfg.repeats = a.repeats;
  cfg.heldout_fraction = a.heldout;
  cfg.balance_n = a.balance_n;
  cfg.delta = a.delta;
  cfg.delta_floor = a.delta_floor;
  cfg.seed = a.seed;
  cfg.threads = a.jobs;

  const confound::CiResult r = confound::compute_ci(ds, cfg, make_classifier(a.clf));

  ensure_dir(a.out);
  json rc;
  rc["kind"] = "ci";
  rc["data"] = a.data;
  rc["seed"] = a.seed;
  rc["n"] = a.n;
  rc["step"] = a.step;
  rc["step-samples"] = a.step_samples;
  rc["repeats"] = a.repeats;
  rc["heldout"] = a.heldout;
  rc["balance-n"] = a.balance_n;
  rc["delta"] = a.delta;
  rc["delta-floor"] = a.delta_floor;
  rc["label-col"] = a.label_col;
  rc["conf-col"] = a.conf_col;
  record_classifier(rc, a.clf);
  if (a.bin_width > 0.0)
    rc["binning"] = {{"width", a.bin_width}, {"start", a.bin_start},
                     {"distance", a.bin_distance}};
  confound::write_json(rc, a.out + "/resolved-config.json");
  confound::write_json(confound::to_json(r), a.out + "/report.json");
  confound::write_curve_csv(r.phi, a.out + "/curves_phi.csv");
  confound::write_curve_csv(r.phi_star, a.out + "/curves_phi_star.csv");

  auto describe = [](const confound::CurveResult& c) {
    std::printf("%-9s = %+.4f +/- %.4f  (pro %s, cons %s)\n",
                confound::orientation_name(c.orientation), c.integrals.phi,
                c.integrals.phi_std_error, c.pro_monotone ? "monotone" : "not monotone",
                c.cons_monotone ? "monotone" : "not monotone");
  };
  describe(r.phi);
  describe(r.phi_star);
  std::printf("scenario  = %s\n", confound::scenario_name(r.scenario));
  if (!r.defined) {
    std::printf("ci        = undefined\n%s\n", r.diagnostic.c_str());
    return 2;
  }
  std::printf("ci        = %.4f\n", r.ci);
  return 0;
}

// --- rp-sweep ---------------------------------------------------------------

struct RpArgs {
  std::string out, config, data;
  std::string p_list = "0.5,0.7,0.9,0.95";
  std::size_t n_per_class = 200;
  std::size_t perms = 100;
  double ky = 0.0, kc = 5.0;
  std::size_t features = 100;
  double heldout = 0.2;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  ClfArgs clf;
};

int run_rp(const RpArgs& a) {
  ensure_dir(a.out);
  const confound::LogisticRegression clf = make_classifier(a.clf);

  confound::PermutationConfig pcfg;
  pcfg.n_perms = a.perms;
  pcfg.heldout_fraction = a.heldout;
  pcfg.threads = a.jobs;

  if (!a.data.empty()) {
    confound::CsvSchema schema;
    schema.label_column = "label";
    schema.confounder_column = "confounder";
    const confound::Dataset ds = confound::load_csv(a.data, schema);
    pcfg.seed = a.seed;
    const auto r = confound::restricted_permutation_test(ds, pcfg, clf);
    json rep = confound::to_json(r);
    record_classifier(rep, a.clf);
    confound::write_json(rep, a.out + "/report.json");
    std::printf("mean_auc = %.4f  p_value = %.4g\n", r.mean_auc, r.p_value);
    return 0;
  }

  const auto ps = parse_double_list(a.p_list, "--p");
  if (ps.empty()) throw Error("--p needs at least one value");

  json runs = json::array();
  std::ofstream csv(a.out + "/rp_sweep.csv");
  if (!csv) throw Error("cannot write " + a.out + "/rp_sweep.csv");
  csv << "bias_p,rp_mean_auc,p_value\n";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const confound::SimConfig scfg =
        confound::preset_disjoint(a.ky, a.kc, confound::rng::derive(a.seed, 20, i),
                                  a.features);
    const confound::Dataset ds =
        confound::generate(scfg, confound::confounded_counts(a.n_per_class, ps[i]));
    pcfg.seed = confound::rng::derive(a.seed, 21, i);
    const auto r = confound::restricted_permutation_test(ds, pcfg, clf);

    json row = confound::to_json(r);
    row.erase("kind");
    row["bias_p"] = ps[i];
    runs.push_back(row);
    csv << confound::detail::g17(ps[i]) << ',' << confound::detail::g17(r.mean_auc) << ','
        << confound::detail::g17(r.p_value) << '\n';
    std::printf("p=%.2f  mean_auc=%.4f  p_value=%.4g\n", ps[i], r.mean_auc, r.p_value);
  }
  if (!csv) throw Error("write failed: " + a.out + "/rp_sweep.csv");
  csv.close();

  json report;
  report["kind"] = "rp_sweep";
  report["n_per_class"] = a.n_per_class;
  report["effects"] = {a.ky, a.ky, a.kc, a.kc};
  record_classifier(report, a.clf);
  report["runs"] = runs;
  confound::write_json(report, a.out + "/report.json");
  return 0;
}

// --- monotonicity -----------------------------------------------------------

struct MonoArgs {
  std::string values, column, out;
  double delta = 0.01;
};

int run_mono(const MonoArgs& a) {
  std::ifstream in(a.values);
  if (!in) throw Error("cannot open " + a.values);
  std::string line;
  if (!std::getline(in, line)) throw Error(a.values + ": empty file");
  const auto header = confound::detail::split_csv_line(line);
  std::size_t col = 0;
  if (!a.column.empty()) {
    col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == a.column) col = i;
    if (col == header.size())
      throw Error(a.values + ": no column named '" + a.column + "'");
  }
  std::vector<double> series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = confound::detail::split_csv_line(line);
    if (col >= fields.size())
      throw Error(a.values + ": line " + std::to_string(line_no) + " has no column " +
                  std::to_string(col));
    double v;
    if (!confound::detail::parse_double(fields[col], v))
      throw Error(a.values + ": '" + fields[col] + "' at line " + std::to_string(line_no) +
                  " is not a number");
    series.push_back(v);
  }

  const auto pairs = confound::find_delta_pairs(series, a.delta);
  const bool inc = confound::is_delta_monotone(series, a.delta, confound::Trend::increasing);
  const bool dec = confound::is_delta_monotone(series, a.delta, confound::Trend::decreasing);

  for (const auto& p : pairs)
    std::printf("pair (%zu, %zu): %s\n", p.i, p.j, confound::trend_name(p.trend));
  std::printf("%zu values, %zu delta-pairs at delta=%g: %s\n", series.size(), pairs.size(),
              a.delta,
              inc && dec ? "monotone (vacuously)"
                         : (inc ? "monotone increasing"
                                : (dec ? "monotone decreasing" : "not monotone")));

  if (!a.out.empty()) {
    ensure_dir(a.out);
    json report;
    report["delta"] = a.delta;
    report["n"] = series.size();
    report["pairs"] = json::array();
    for (const auto& p : pairs) report["pairs"].push_back(confound::to_json(p));
    report["monotone_increasing"] = inc;
    report["monotone_decreasing"] = dec;
    confound::write_json(report, a.out + "/report.json");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confounding-index toolkit: quantify how much a binary variable "
               "confounds a binary classification task"};
  app.require_subcommand(1);

  SimulateArgs sim;
  ConfigMerge sim_cfg;
  auto* c_sim = app.add_subcommand("simulate", "generate a synthetic benchmark dataset");
  sim_cfg.bind(c_sim->add_option("--seed", sim.seed, "root seed"), sim.seed);
  sim_cfg.bind(c_sim->add_option("--ky", sim.ky, "label effect size"), sim.ky);
  sim_cfg.bind(c_sim->add_option("--kc", sim.kc, "confounder effect size"), sim.kc);
  sim_cfg.bind(c_sim->add_option("--pattern", sim.pattern,
                                 "index-set overlap pattern (4 letters)"),
               sim.pattern);
  sim_cfg.bind(c_sim->add_option("--effects", sim.effects,
                                 "per-set effects k+,k-,ka,kb (overrides --ky/--kc)"),
               sim.effects);
  sim_cfg.bind(c_sim->add_option("--cell-n", sim.cell_n, "samples per cell"), sim.cell_n);
  sim_cfg.bind(c_sim->add_option("--counts", sim.counts,
                                 "cell sizes n+a,n+b,n-a,n-b (overrides --cell-n)"),
               sim.counts);
  sim_cfg.bind(c_sim->add_option("--features", sim.features, "feature count"), sim.features);
  c_sim->add_option("--out", sim.out, "output directory")->required();
  c_sim->add_option("--config", sim.config, "JSON config file");

  CiArgs ci;
  ConfigMerge ci_cfg;
  auto* c_ci = app.add_subcommand("ci", "compute the confounding index of a dataset");
  c_ci->add_option("--data", ci.data, "input CSV")->required();
  c_ci->add_option("--out", ci.out, "output directory")->required();
  c_ci->add_option("--config", ci.config, "JSON config file");
  ci_cfg.bind(c_ci->add_option("--seed", ci.seed, "root seed"), ci.seed);
  ci_cfg.bind(c_ci->add_option("--jobs", ci.jobs, "worker threads (0 = all cores)"), ci.jobs);
  ci_cfg.bind(c_ci->add_option("--n", ci.n, "training samples per cell at b=0 (0 = auto)"),
              ci.n);
  ci_cfg.bind(c_ci->add_option("--step", ci.step, "bias step as a fraction"), ci.step);
  ci_cfg.bind(c_ci->add_option("--step-samples", ci.step_samples,
                               "bias step in samples (overrides --step)"),
              ci.step_samples);
  ci_cfg.bind(c_ci->add_option("--repeats", ci.repeats, "draws per bias value"), ci.repeats);
  ci_cfg.bind(c_ci->add_option("--heldout", ci.heldout, "held-out fraction per cell"),
              ci.heldout);
  ci_cfg.bind(c_ci->add_option("--balance-n", ci.balance_n,
                               "validation samples per cell (0 = auto)"),
              ci.balance_n);
  ci_cfg.bind(c_ci->add_option("--delta", ci.delta,
                               "monotonicity tolerance (0 = from curve noise)"),
              ci.delta);
  ci_cfg.bind(c_ci->add_option("--delta-floor", ci.delta_floor,
                               "smallest automatic tolerance"),
              ci.delta_floor);
  ci_cfg.bind(c_ci->add_option("--label-col", ci.label_col, "label column name"),
              ci.label_col);
  ci_cfg.bind(c_ci->add_option("--conf-col", ci.conf_col, "confounder column name"),
              ci.conf_col);
  ci_cfg.bind(c_ci->add_option("--neg-label", ci.neg_label, "negative label value"),
              ci.neg_label);
  ci_cfg.bind(c_ci->add_option("--pos-label", ci.pos_label, "positive label value"),
              ci.pos_label);
  ci_cfg.bind(c_ci->add_option("--alpha", ci.alpha, "confounder level mapped to alpha"),
              ci.alpha);
  ci_cfg.bind(c_ci->add_option("--beta", ci.beta, "confounder level mapped to beta"),
              ci.beta);
  auto* bw = c_ci->add_option("--bin-width", ci.bin_width, "bin width for a continuous confounder");
  auto* bs = c_ci->add_option("--bin-start", ci.bin_start, "first bin's lower edge");
  auto* bd = c_ci->add_option("--bin-distance", ci.bin_distance, "distance between bin starts");
  bw->needs(bs)->needs(bd);
  bs->needs(bw);
  bd->needs(bw);
  ci_cfg.bind(bw, ci.bin_width);
  ci_cfg.bind(bs, ci.bin_start);
  ci_cfg.bind(bd, ci.bin_distance);
  bind_classifier(c_ci, ci_cfg, ci);

  RpArgs rp;
  ConfigMerge rp_cfg;
  auto* c_rp = app.add_subcommand(
      "rp-sweep", "restricted-permutation baseline over association strengths");
  c_rp->add_option("--out", rp.out, "output directory")->required();
  c_rp->add_option("--config", rp.config, "JSON config file");
  c_rp->add_option("--data", rp.data, "run one test on this CSV instead of sweeping");
  rp_cfg.bind(c_rp->add_option("--p", rp.p_list, "association strengths to sweep"),
              rp.p_list);
  rp_cfg.bind(c_rp->add_option("--n-per-class", rp.n_per_class, "samples per class"),
              rp.n_per_class);
  rp_cfg.bind(c_rp->add_option("--perms", rp.perms, "permutations per run"), rp.perms);
  rp_cfg.bind(c_rp->add_option("--ky", rp.ky, "label effect size"), rp.ky);
  rp_cfg.bind(c_rp->add_option("--kc", rp.kc, "confounder effect size"), rp.kc);
  rp_cfg.bind(c_rp->add_option("--features", rp.features, "feature count"), rp.features);
  rp_cfg.bind(c_rp->add_option("--heldout", rp.heldout, "held-out fraction per cell"),
              rp.heldout);
  rp_cfg.bind(c_rp->add_option("--seed", rp.seed, "root seed"), rp.seed);
  rp_cfg.bind(c_rp->add_option("--jobs", rp.jobs, "worker threads (0 = all cores)"), rp.jobs);
  bind_classifier(c_rp, rp_cfg, rp);

  MonoArgs mono;
  auto* c_mono = app.add_subcommand("monotonicity", "find the delta-pairs of a series");
  c_mono->add_option("--values", mono.values, "CSV file with the series")->required();
  c_mono->add_option("--column", mono.column, "column name (default: first column)");
  c_mono->add_option("--delta", mono.delta, "pair threshold");
  c_mono->add_option("--out", mono.out, "directory for report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_sim->parsed()) {
      if (!sim.config.empty()) sim_cfg.apply(sim.config);
      return run_simulate(sim);
    }
    if (c_ci->parsed()) {
      if (!ci.config.empty()) ci_cfg.apply(ci.config);
      return run_ci(ci);
    }
    if (c_rp->parsed()) {
      if (!rp.config.empty()) rp_cfg.apply(rp.config);
      return run_rp(rp);
    }
    return run_mono(mono);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
