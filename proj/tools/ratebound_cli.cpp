// ratebound: natural error rate bounds for rating overrides.
//
//   ratebound bound from-ar --ar 0.5
//   ratebound bound from-model --profile profile.csv --curve curve.csv
//   ratebound calibrate --pd 0.05 --ar 0.75 --grades 17 --lambda 0.55 --rho 0.1 --out curve.csv
//   ratebound monitor --records overrides.csv --ar 0.5 --grades 17 --downgrade-only
//   ratebound repro table2
//
// Exit status: 0 success (breaches are findings, not failures), 2 input or
// validation error, 3 infeasible calibration, 4 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ratebound/ratebound.hpp"

namespace {

using nlohmann::ordered_json;
using ratebound::io::fixed6;
using ratebound::io::Format;
using ratebound::io::round6;

constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(ratebound::ErrorKind kind) {
  using ratebound::ErrorKind;
  switch (kind) {
  case ErrorKind::calibration_infeasible: return kExitInfeasible;
  case ErrorKind::numeric:
  case ErrorKind::bracketing: return kExitNumeric;
  default: return kExitInput;
  }
}

std::string scalar_text(const ordered_json &v) {
  if (v.is_null()) return "unavailable";
  if (v.is_number_float()) return fixed6(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto &x : v) out += (out.empty() ? "" : " ") + scalar_text(x);
    return out;
  }
  return v.dump();
}

// Flat key/value document.
void emit_object(std::ostream &out, const ordered_json &obj, Format format) {
  switch (format) {
  case Format::json: out << obj.dump(2) << '\n'; break;
  case Format::csv:
    out << "key,value\n";
    for (const auto &[k, v] : obj.items()) out << k << ',' << scalar_text(v) << '\n';
    break;
  case Format::plain:
    for (const auto &[k, v] : obj.items()) out << k << ": " << scalar_text(v) << '\n';
    break;
  }
}

// Table given as an array of flat objects sharing the same keys.
void emit_table(std::ostream &out, const ordered_json &rows, Format format) {
  if (format == Format::json) {
    out << rows.dump(2) << '\n';
    return;
  }
  const char sep = format == Format::csv ? ',' : ' ';
  bool first = true;
  for (const auto &[k, v] : rows.front().items()) {
    out << (first ? "" : std::string(1, sep)) << k;
    first = false;
  }
  out << '\n';
  for (const auto &row : rows) {
    first = true;
    for (const auto &[k, v] : row.items()) {
      out << (first ? "" : std::string(1, sep)) << scalar_text(v);
      first = false;
    }
    out << '\n';
  }
}

ordered_json model_summary(const ratebound::RatingProfile &profile, const ratebound::PdCurve &curve) {
  const auto cond = ratebound::bayes_invert(profile, curve);
  const auto split = ratebound::optimal_split(cond);
  ordered_json j;
  j["unconditional_pd"] = round6(cond.p());
  j["accuracy_ratio_ex_ante"] = round6(ratebound::accuracy_ratio_ex_ante(profile, curve));
  j["natural_error_rate"] = round6(split.error_rate);
  j["expected_cost"] = round6(split.expected_cost);
  j["ks_statistic"] = round6(ratebound::ks_statistic(cond));
  j["risky_grades"] = split.risky_grades;
  j["safe_grades"] = split.safe_grades();
  if (auto threshold = ratebound::risky_threshold(cond)) {
    j["risky_threshold"] = *threshold;
  } else {
    j["risky_threshold"] = nullptr;
  }
  if (split.is_degenerate()) {
    j["split_degenerate"] = true;
    j["risky_pd"] = nullptr;
    j["safe_pd"] = nullptr;
  } else {
    const auto pds = ratebound::super_grade_pds(profile, curve);
    j["split_degenerate"] = false;
    j["risky_pd"] = round6(pds.risky_pd);
    j["safe_pd"] = round6(pds.safe_pd);
  }
  return j;
}

ordered_json table2_json(const std::vector<ratebound::repro::Table2Row> &rows) {
  ordered_json out = ordered_json::array();
  for (const auto &r : rows) {
    out.push_back({{"ar", round6(r.ar)},
                   {"binormal", round6(r.binormal)},
                   {"discrete_pd_1pct", round6(r.discrete_pd1)},
                   {"discrete_pd_10pct", round6(r.discrete_pd10)}});
  }
  return out;
}

ordered_json repro_json(const std::string &target) {
  namespace rp = ratebound::repro;
  ordered_json out = ordered_json::array();
  if (target == "table2") return table2_json(rp::table2());
  if (target == "fig2") return table2_json(rp::fig2());
  if (target == "table3") {
    for (const auto &r : rp::table3()) {
      out.push_back({{"ar_pct", round6(100.0 * r.ar)},
                     {"binormal_safe_pd_pct", round6(100.0 * r.binormal.safe_pd)},
                     {"binormal_risky_pd_pct", round6(100.0 * r.binormal.risky_pd)},
                     {"discrete_safe_pd_pct", round6(100.0 * r.discrete.safe_pd)},
                     {"discrete_risky_pd_pct", round6(100.0 * r.discrete.risky_pd)}});
    }
    return out;
  }
  if (target == "fig1") {
    for (const auto &r : rp::fig1()) {
      out.push_back({{"grade", r.grade},
                     {"unconditional", round6(r.unconditional)},
                     {"default_ar25", round6(r.default_low_ar)},
                     {"survive_ar25", round6(r.survive_low_ar)},
                     {"default_ar75", round6(r.default_high_ar)},
                     {"survive_ar75", round6(r.survive_high_ar)}});
    }
    return out;
  }
  if (target == "fig3") {
    for (const auto &r : rp::fig3()) {
      out.push_back({{"grade", r.grade}, {"pd_ar25", round6(r.pd_low_ar)}, {"pd_ar75", round6(r.pd_high_ar)}});
    }
    return out;
  }
  throw ratebound::Error(ratebound::ErrorKind::invalid_argument, "unknown repro target '" + target + "'");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Natural error rate bounds for credit rating overrides"};
  app.require_subcommand(1);

  // One slot per subcommand so each keeps its own default.
  std::map<const CLI::App *, std::string> format_names;
  auto add_format = [&](CLI::App *cmd, const std::string &default_format) {
    cmd->add_option("--format", format_names[cmd], "Output format (plain, csv, json)")
        ->check(CLI::IsMember({"plain", "csv", "json"}))
        ->default_val(default_format);
  };

  // bound from-ar / from-model
  auto *bound = app.add_subcommand("bound", "Natural error rate bound");
  bound->require_subcommand(1);
  double ar = 0.0;
  auto *from_ar = bound->add_subcommand("from-ar", "Bound from an accuracy ratio (binormal link)");
  from_ar->add_option("--ar", ar, "Accuracy ratio in (-1, 1)")->required();
  add_format(from_ar, "plain");

  std::string profile_path, curve_path;
  auto *from_model = bound->add_subcommand("from-model", "Bound from a rating profile and PD curve");
  from_model->add_option("--profile", profile_path, "CSV grade,probability")->required();
  from_model->add_option("--curve", curve_path, "CSV grade,pd")->required();
  add_format(from_model, "plain");

  // calibrate
  double cal_pd = 0.0, cal_ar = 0.0, cal_lambda = 0.55, cal_rho = 0.1;
  int cal_grades = 17;
  std::string cal_out;
  auto *calibrate = app.add_subcommand("calibrate", "Fit a logit PD curve to target PD and AR");
  calibrate->add_option("--pd", cal_pd, "Target unconditional PD")->required();
  calibrate->add_option("--ar", cal_ar, "Target accuracy ratio")->required();
  calibrate->add_option("--grades", cal_grades, "Number of grades")->capture_default_str();
  calibrate->add_option("--lambda", cal_lambda, "Correlated binomial lambda")->capture_default_str();
  calibrate->add_option("--rho", cal_rho, "Correlated binomial rho")->capture_default_str();
  calibrate->add_option("--out", cal_out, "Write the PD curve CSV here (default: stdout)");
  add_format(calibrate, "plain");

  // monitor
  std::string records_path;
  std::optional<double> mon_ar;
  std::optional<int> mon_grades, no_override_at_or_above, min_band;
  bool downgrade_only = false;
  ratebound::MonitoringConfig config;
  auto *monitor = app.add_subcommand("monitor", "Assess override records against the natural error rate");
  monitor->add_option("--records", records_path, "Override records CSV")->required();
  auto *opt_profile = monitor->add_option("--profile", profile_path, "CSV grade,probability");
  auto *opt_curve = monitor->add_option("--curve", curve_path, "CSV grade,pd");
  auto *opt_ar = monitor->add_option("--ar", mon_ar, "Derive the bound from this accuracy ratio instead");
  auto *opt_grades = monitor->add_option("--grades", mon_grades, "Number of grades (with --ar)");
  opt_profile->needs(opt_curve);
  opt_curve->needs(opt_profile);
  opt_ar->excludes(opt_profile)->excludes(opt_curve)->needs(opt_grades);
  monitor->add_option("--no-override-at-or-above", no_override_at_or_above, "Policy threshold grade k*");
  monitor->add_option("--min-band", min_band, "Policy minimum |final - proposed|");
  monitor->add_flag("--downgrade-only", downgrade_only, "Policy: only downgrades allowed");
  monitor->add_option("--bound-slack", config.bound_slack, "Breach when rate > bound + slack")->capture_default_str();
  monitor->add_option("--ar-tolerance", config.ar_drop_tolerance, "Tolerated AR drop after overrides")
      ->capture_default_str();
  monitor->add_option("--imbalance-share", config.imbalance_minority_share, "Minority direction share threshold")
      ->capture_default_str();
  monitor->add_option("--imbalance-min-overrides", config.imbalance_min_overrides,
                      "Minimum overrides before imbalance is judged")
      ->capture_default_str();
  add_format(monitor, "plain");

  // repro
  std::string repro_target;
  auto *repro = app.add_subcommand("repro", "Emit table/figure data for the reference discrete model");
  repro->add_option("target", repro_target, "table2 | table3 | fig1 | fig2 | fig3")
      ->required()
      ->check(CLI::IsMember({"table2", "table3", "fig1", "fig2", "fig3"}));
  add_format(repro, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    std::string format_name = "plain";
    for (const auto &[cmd, name] : format_names) {
      if (cmd->parsed()) format_name = name;
    }
    const Format format = ratebound::io::parse_format(format_name);

    if (from_ar->parsed()) {
      const double eps = ratebound::natural_error_rate_from_ar(ar);
      if (format == Format::plain) {
        std::cout << fixed6(eps) << '\n';
      } else {
        emit_object(std::cout, {{"ar", round6(ar)}, {"natural_error_rate", round6(eps)}}, format);
      }
      return 0;
    }

    if (from_model->parsed()) {
      const auto profile = ratebound::io::read_profile_file(profile_path);
      const auto curve = ratebound::io::read_pd_curve_file(curve_path);
      emit_object(std::cout, model_summary(profile, curve), format);
      return 0;
    }

    if (calibrate->parsed()) {
      if (cal_grades < 2) {
        throw ratebound::Error(ratebound::ErrorKind::invalid_argument, "--grades must be at least 2");
      }
      const auto profile =
          ratebound::correlated_binomial_profile(ratebound::CorrelatedBinomialParams(cal_grades - 1, cal_lambda, cal_rho));
      const auto fitted = ratebound::quasi_moment_match(profile, cal_pd, cal_ar);
      const auto curve = ratebound::to_pd_curve(fitted);
      ordered_json summary;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", fitted.intercept);
      summary["intercept"] = buf;
      std::snprintf(buf, sizeof buf, "%.12g", fitted.slope);
      summary["slope"] = buf;
      summary["unconditional_pd"] = round6(ratebound::unconditional_pd(profile, curve));
      summary["accuracy_ratio_ex_ante"] = round6(ratebound::accuracy_ratio_ex_ante(profile, curve));
      if (cal_out.empty()) {
        ratebound::io::write_pd_curve(std::cout, curve);
        emit_object(std::cerr, summary, format);
      } else {
        std::ofstream out(cal_out);
        if (!out) throw ratebound::Error(ratebound::ErrorKind::invalid_argument, "cannot write '" + cal_out + "'");
        ratebound::io::write_pd_curve(out, curve);
        emit_object(std::cout, summary, format);
      }
      return 0;
    }

    if (monitor->parsed()) {
      std::optional<ratebound::RatingProfile> profile;
      std::optional<ratebound::PdCurve> curve;
      if (!mon_ar) {
        if (profile_path.empty()) {
          throw ratebound::Error(ratebound::ErrorKind::invalid_argument,
                                 "monitor needs --profile/--curve or --ar/--grades");
        }
        profile = ratebound::io::read_profile_file(profile_path);
        curve = ratebound::io::read_pd_curve_file(curve_path);
      }
      const int grades = profile ? profile->grades() : *mon_grades;
      const auto read = ratebound::io::read_records_file(records_path, grades);
      for (const auto &issue : read.rejected) {
        std::cerr << "warning: " << records_path << ": line " << issue.line << ": " << issue.message
                  << " (row skipped)\n";
      }
      if (read.records.empty()) {
        throw ratebound::Error(ratebound::ErrorKind::empty_input, "no valid override records in " + records_path);
      }
      ratebound::OverridePolicy policy{no_override_at_or_above, min_band, downgrade_only};
      const auto report =
          profile ? ratebound::assess(read.records, *profile, *curve, policy, config)
                  : ratebound::assess_with_bound(read.records, ratebound::natural_error_rate_from_ar(*mon_ar),
                                                 ratebound::RatingScale(grades), policy, config);
      ratebound::io::write_report(std::cout, report, format);
      return 0;
    }

    if (repro->parsed()) {
      emit_table(std::cout, repro_json(repro_target), format);
      return 0;
    }
  } catch (const ratebound::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  return 0;
}
