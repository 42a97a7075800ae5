#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "confound/error.hpp"
#include "confound/rng.hpp"

namespace confound {

// One row of a classification problem: L features, a binary label and the
// raw value of the candidate confounding variable. The id is assigned at
// load/generation time and is the identity used by all disjointness checks.
struct LabeledSample {
  std::int64_t id = -1;
  std::vector<double> features;
  int label = 0;  // +1 or -1
  std::string confounder;
};

// Immutable after construction; safe to share across worker threads.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<LabeledSample> samples;

  std::string label_column = "label";
  std::string confounder_column = "confounder";
  std::string neg_label_value = "-1";
  std::string pos_label_value = "1";

  // When set, pins which confounder value plays alpha and which beta.
  // Left unset by load_csv (resolved lexicographically at partition time);
  // set explicitly by bin_continuous and by an explicit schema mapping.
  std::optional<std::pair<std::string, std::string>> confounder_levels;

  std::vector<std::string> ignored_columns;

  std::size_t n_features() const { return feature_names.size(); }

  std::vector<std::string> distinct_confounder_values() const {
    std::set<std::string> vals;
    for (const auto& s : samples) vals.insert(s.confounder);
    return {vals.begin(), vals.end()};
  }
};

struct CsvSchema {
  std::string label_column;
  std::string confounder_column;
  // Optional explicit (negative value, positive value) label mapping.
  std::optional<std::pair<std::string, std::string>> label_mapping;
  // Optional explicit (alpha, beta) confounder mapping.
  std::optional<std::pair<std::string, std::string>> confounder_mapping;
};

enum class Cell : int { pos_alpha = 0, pos_beta = 1, neg_alpha = 2, neg_beta = 3 };

inline constexpr std::array<Cell, 4> kAllCells = {Cell::pos_alpha, Cell::pos_beta,
                                                  Cell::neg_alpha, Cell::neg_beta};

constexpr int cell_index(Cell c) { return static_cast<int>(c); }
constexpr int cell_label(Cell c) { return cell_index(c) < 2 ? +1 : -1; }
constexpr bool cell_is_beta(Cell c) { return cell_index(c) % 2 == 1; }

constexpr Cell cell_of(int label, bool is_beta) {
  return static_cast<Cell>((label > 0 ? 0 : 2) + (is_beta ? 1 : 0));
}

// The four (label, confounder) sample pools plus matching held-out pools.
// Pools hold pointers into the source Dataset, which must outlive the
// partition. The eight pools are pairwise disjoint and jointly cover the
// source dataset.
struct CellPartition {
  std::array<std::vector<const LabeledSample*>, 4> train;
  std::array<std::vector<const LabeledSample*>, 4> heldout;
  std::array<std::size_t, 4> cell_counts{};  // train + heldout per cell
  std::string alpha;
  std::string beta;

  std::string cell_name(Cell c) const {
    std::string s = cell_label(c) > 0 ? "(+1," : "(-1,";
    s += cell_is_beta(c) ? beta : alpha;
    s += ")";
    return s;
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

// Full-string double parse; NaN/inf parse successfully but are not finite.
inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

inline std::string format_g(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

}  // namespace detail

// Loads a CSV with a header row. Feature columns are every numeric column not
// named as label/confounder; a column is treated as numeric if its value in
// the first data row parses as a double. Non-numeric extra columns are
// ignored and recorded.
inline Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  const auto header = detail::split_csv_line(line);

  int label_col = -1, conf_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == schema.label_column) label_col = static_cast<int>(i);
    if (header[i] == schema.confounder_column) conf_col = static_cast<int>(i);
  }
  if (label_col < 0) throw Error(path + ": missing label column '" + schema.label_column + "'");
  if (conf_col < 0)
    throw Error(path + ": missing confounder column '" + schema.confounder_column + "'");

  Dataset ds;
  ds.label_column = schema.label_column;
  ds.confounder_column = schema.confounder_column;

  std::vector<int> feature_cols;
  std::vector<std::array<std::string, 2>> raw_rows;  // (label value, confounder value)
  std::vector<std::vector<double>> feats;

  std::size_t line_no = 1;
  bool classified = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw Error(path + ": malformed row at line " + std::to_string(line_no) + " (" +
                  std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(header.size()) + ")");
    if (!classified) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (static_cast<int>(i) == label_col || static_cast<int>(i) == conf_col) continue;
        double v;
        if (detail::parse_double(fields[i], v)) {
          feature_cols.push_back(static_cast<int>(i));
          ds.feature_names.push_back(header[i]);
        } else {
          ds.ignored_columns.push_back(header[i]);
        }
      }
      classified = true;
    }
    std::vector<double> row(feature_cols.size());
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      double v;
      if (!detail::parse_double(fields[feature_cols[k]], v))
        throw Error(path + ": non-numeric feature '" + fields[feature_cols[k]] + "' in column '" +
                    header[feature_cols[k]] + "' at line " + std::to_string(line_no));
      if (!std::isfinite(v))
        throw Error(path + ": non-finite feature value in column '" + header[feature_cols[k]] +
                    "' at line " + std::to_string(line_no));
      row[k] = v;
    }
    feats.push_back(std::move(row));
    raw_rows.push_back({fields[label_col], fields[conf_col]});
  }
  if (raw_rows.empty()) throw Error(path + ": no data rows");

  std::set<std::string> label_vals;
  for (const auto& r : raw_rows) label_vals.insert(r[0]);
  if (label_vals.size() > 2) {
    std::string got;
    for (const auto& v : label_vals) got += (got.empty() ? "" : ", ") + v;
    throw Error(path + ": more than two label values: {" + got + "}");
  }
  if (label_vals.size() < 2) throw Error(path + ": label column has a single value");

  if (schema.label_mapping) {
    ds.neg_label_value = schema.label_mapping->first;
    ds.pos_label_value = schema.label_mapping->second;
    for (const auto& v : label_vals)
      if (v != ds.neg_label_value && v != ds.pos_label_value)
        throw Error(path + ": label value '" + v + "' not covered by the explicit mapping");
  } else {
    auto it = label_vals.begin();
    ds.neg_label_value = *it++;
    ds.pos_label_value = *it;
  }

  if (schema.confounder_mapping) ds.confounder_levels = schema.confounder_mapping;

  ds.samples.reserve(raw_rows.size());
  for (std::size_t i = 0; i < raw_rows.size(); ++i) {
    LabeledSample s;
    s.id = static_cast<std::int64_t>(i);
    s.features = std::move(feats[i]);
    s.label = (raw_rows[i][0] == ds.pos_label_value) ? +1 : -1;
    s.confounder = raw_rows[i][1];
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

inline void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write CSV file: " + path);
  out << ds.label_column << ',' << ds.confounder_column;
  for (const auto& n : ds.feature_names) out << ',' << n;
  out << '\n';
  char buf[64];
  for (const auto& s : ds.samples) {
    out << (s.label > 0 ? ds.pos_label_value : ds.neg_label_value) << ',' << s.confounder;
    for (double v : s.features) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

// Resolves the (alpha, beta) confounder levels of a dataset: the pinned pair
// when present, otherwise the two observed values in lexicographic order.
inline std::pair<std::string, std::string> resolve_levels(const Dataset& ds) {
  if (ds.confounder_levels) return *ds.confounder_levels;
  auto vals = ds.distinct_confounder_values();
  if (vals.size() != 2)
    throw Error("confounder column '" + ds.confounder_column + "' has " +
                std::to_string(vals.size()) +
                " distinct values; expected exactly 2 (bin continuous variables first)");
  return {vals[0], vals[1]};
}

// Splits every (label, confounder) cell into a training pool and a held-out
// validation pool. Deterministic for a given seed.
inline CellPartition partition_cells(const Dataset& ds, double heldout_fraction,
                                     std::uint64_t seed) {
  if (!(heldout_fraction > 0.0 && heldout_fraction < 1.0))
    throw Error("heldout_fraction must be in (0,1)");
  const auto levels = resolve_levels(ds);

  CellPartition part;
  part.alpha = levels.first;
  part.beta = levels.second;

  std::array<std::vector<const LabeledSample*>, 4> cells;
  for (const auto& s : ds.samples) {
    bool is_beta;
    if (s.confounder == levels.first) {
      is_beta = false;
    } else if (s.confounder == levels.second) {
      is_beta = true;
    } else {
      throw Error("confounder value '" + s.confounder + "' outside declared levels {" +
                  levels.first + ", " + levels.second + "}");
    }
    cells[cell_index(cell_of(s.label, is_beta))].push_back(&s);
  }

  for (Cell c : kAllCells) {
    auto& pool = cells[cell_index(c)];
    const std::size_t n = pool.size();
    part.cell_counts[cell_index(c)] = n;
    if (n < 2)
      throw Error("insufficient data in cell " + part.cell_name(c) + ": " + std::to_string(n) +
                  " samples (need at least 2 for a train/held-out split)");
    std::size_t h = static_cast<std::size_t>(std::floor(n * heldout_fraction + 0.5));
    h = std::clamp<std::size_t>(h, 1, n - 1);
    // Keyed by label sign and the level's own name, not its alpha/beta slot:
    // swapping which level plays alpha must not change the physical split.
    const auto& level = cell_is_beta(c) ? part.beta : part.alpha;
    rng::SplitMix g(rng::derive(seed, 0xCE11u, cell_label(c) > 0 ? 1u : 0u,
                                rng::fnv1a64(level)));
    rng::shuffle(pool, g);
    part.heldout[cell_index(c)].assign(pool.begin(), pool.begin() + h);
    part.train[cell_index(c)].assign(pool.begin() + h, pool.end());
  }
  return part;
}

// Two discretization bins for a continuous candidate confounder: the first
// bin [start, start+bin_width) maps to alpha, the second, shifted by
// `distance`, to beta.
struct BinSpec {
  double bin_width = 0;
  double start = 0;
  double distance = 0;

  std::pair<double, double> alpha_bin() const { return {start, start + bin_width}; }
  std::pair<double, double> beta_bin() const {
    return {start + distance, start + distance + bin_width};
  }
};

inline std::string bin_label(std::pair<double, double> b) {
  return "[" + detail::format_g(b.first) + "," + detail::format_g(b.second) + ")";
}

// Keeps only samples falling in one of the two bins and pins the confounder
// levels to the bin labels. Binning an already-binned dataset with the same
// spec is a no-op.
inline Dataset bin_continuous(const Dataset& ds, const std::string& variable,
                              const BinSpec& spec) {
  if (!(spec.bin_width > 0)) throw Error("bin width must be positive");
  if (spec.distance < spec.bin_width)
    throw Error("bins overlap: distance " + detail::format_g(spec.distance) +
                " < bin width " + detail::format_g(spec.bin_width));
  if (variable != ds.confounder_column)
    throw Error("binning variable '" + variable + "' is not the dataset's confounder column '" +
                ds.confounder_column + "'");

  const auto a = spec.alpha_bin();
  const auto b = spec.beta_bin();
  const std::string la = bin_label(a), lb = bin_label(b);

  if (ds.confounder_levels && ds.confounder_levels->first == la &&
      ds.confounder_levels->second == lb)
    return ds;  // already binned with this spec

  Dataset out;
  out.feature_names = ds.feature_names;
  out.label_column = ds.label_column;
  out.confounder_column = ds.confounder_column;
  out.neg_label_value = ds.neg_label_value;
  out.pos_label_value = ds.pos_label_value;
  out.ignored_columns = ds.ignored_columns;
  out.confounder_levels = std::make_pair(la, lb);

  std::size_t na = 0, nb = 0;
  for (const auto& s : ds.samples) {
    double v;
    if (!detail::parse_double(s.confounder, v))
      throw Error("confounder value '" + s.confounder + "' is not numeric (sample id " +
                  std::to_string(s.id) + ")");
    const bool in_a = v >= a.first && v < a.second;
    const bool in_b = v >= b.first && v < b.second;
    if (!in_a && !in_b) continue;
    LabeledSample kept = s;
    kept.confounder = in_a ? la : lb;
    out.samples.push_back(std::move(kept));
    (in_a ? na : nb)++;
  }
  if (na == 0) throw Error("empty bin " + la + " (0 samples)");
  if (nb == 0) throw Error("empty bin " + lb + " (0 samples)");
  return out;
}

}  // namespace confound
