// strata-bounds: partial-identification analysis of multiarm trials with a
// truncated-by-death outcome. Subcommands either ingest counts from a file
// or use an embedded dataset, and emit a JSON (default) or CSV report.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "strata_bounds/datasets.hpp"
#include "strata_bounds/errors.hpp"
#include "strata_bounds/io.hpp"
#include "strata_bounds/oracle.hpp"
#include "strata_bounds/polytope.hpp"
#include "strata_bounds/posterior.hpp"
#include "strata_bounds/stepdown.hpp"
#include "strata_bounds/strata.hpp"
#include "strata_bounds/trimming.hpp"

namespace sb = strata_bounds;
using sb::Report;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOptions {
  std::string input_path;
  std::string dataset;
  std::optional<int> n1;
  bool keep_missing = false;
  std::optional<std::int64_t> scale_n;
  std::string format = "json";
};

struct PosteriorCliOptions {
  std::vector<std::string> prior_alpha;
  int draws = 4000;
  std::uint64_t seed = 0;
  std::optional<double> delta0;
  double retention_floor = 0.01;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool dataset_only = false) {
  if (!dataset_only) {
    cmd->add_option("--input", opts.input_path,
                    "Trial counts file (.json or .csv)");
  }
  cmd->add_option("--dataset", opts.dataset,
                  "Embedded dataset: hvtn503-cd4-350, hvtn503-cd4-200, sim");
  cmd->add_option("--n1", opts.n1,
                  "Arm-0 success count for the 'sim' dataset (0..40)");
  cmd->add_flag("--keep-missing-y", opts.keep_missing,
                "Keep survivors with a missing outcome in the survival "
                "denominators instead of dropping them");
  cmd->add_option("--scale-n", opts.scale_n,
                  "Rescale the trial to this many subjects, keeping observed "
                  "frequencies");
  cmd->add_option("--format", opts.format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

void add_posterior(CLI::App* cmd, PosteriorCliOptions& opts) {
  cmd->add_option("--prior-alpha", opts.prior_alpha,
                  "Dirichlet prior triple 'a,b,c'; repeat per arm or give "
                  "once for all arms (default 1,1,1)");
  cmd->add_option("--draws", opts.draws, "Number of posterior draws");
  cmd->add_option("--seed", opts.seed, "Random seed");
  cmd->add_option("--delta0", opts.delta0,
                  "Clinically relevant effect threshold");
  cmd->add_option("--retention-floor", opts.retention_floor,
                  "Minimum tolerated monotone-retention rate");
}

sb::TrialCounts load_counts(const CommonOptions& opts) {
  const bool has_file = !opts.input_path.empty();
  const bool has_dataset = !opts.dataset.empty();
  if (has_file == has_dataset) {
    throw sb::InputError("give exactly one of --input and --dataset");
  }
  sb::TrialCounts counts;
  if (has_file) {
    counts = sb::ingest_file(opts.input_path);
  } else {
    auto embedded = sb::dataset_by_name(opts.dataset, opts.n1);
    if (!embedded) {
      throw sb::InputError("unknown dataset '" + opts.dataset + "'");
    }
    counts = *embedded;
  }
  if (opts.scale_n) counts = sb::scale_counts(counts, *opts.scale_n);
  return counts;
}

sb::PriorSpec parse_prior(const std::vector<std::string>& raw, int num_arms) {
  if (raw.empty()) return sb::PriorSpec::uniform(num_arms);
  std::vector<std::array<double, 3>> triples;
  for (const std::string& spec : raw) {
    std::array<double, 3> triple{};
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t comma = spec.find(',', start);
      const bool last = i == 2;
      if ((comma == std::string::npos) != last) {
        throw sb::InputError("--prior-alpha needs 'a,b,c', got '" + spec + "'");
      }
      const std::string field =
          spec.substr(start, last ? std::string::npos : comma - start);
      try {
        std::size_t used = 0;
        triple[i] = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw sb::InputError("--prior-alpha: bad number '" + field + "'");
      }
      start = comma + 1;
    }
    triples.push_back(triple);
  }
  if (triples.size() == 1) {
    triples.assign(num_arms, triples.front());
  }
  sb::PriorSpec prior;
  prior.alpha = std::move(triples);
  prior.validate(num_arms);
  return prior;
}

Report prior_to_json(const sb::PriorSpec& prior) {
  Report arr = Report::array();
  for (const auto& triple : prior.alpha) {
    arr.push_back({triple[0], triple[1], triple[2]});
  }
  return arr;
}

Report provenance(const CommonOptions& opts, const sb::TrialCounts& counts) {
  Report block;
  block["version"] = kVersion;
  if (!opts.dataset.empty()) {
    block["dataset"] = opts.dataset;
    if (opts.n1) block["n1"] = *opts.n1;
  } else {
    block["input"] = opts.input_path;
  }
  if (opts.scale_n) block["scale_n"] = *opts.scale_n;
  block["drop_missing_y"] = !opts.keep_missing;
  block["input_digest"] = sb::input_digest(counts);
  return block;
}

void emit(const Report& report, const std::string& format) {
  if (format == "csv") {
    std::cout << sb::report_to_csv(report);
  } else {
    std::cout << report.dump(2) << '\n';
  }
}

Report interval_json(const sb::FeasibleInterval& iv) {
  Report block;
  block["empty"] = iv.is_empty;
  if (!iv.is_empty) {
    block["lo"] = iv.lo;
    block["hi"] = iv.hi;
  }
  return block;
}

// --- identify ---------------------------------------------------------

Report run_identify(const CommonOptions& opts) {
  const sb::TrialCounts counts = load_counts(opts);
  const sb::ObservedDistribution obs = sb::summarize(counts, !opts.keep_missing);
  const sb::StrataProfile profile = sb::identify_strata(obs);
  const int m = profile.max_level();

  Report report;
  report["command"] = "identify";
  report["provenance"] = provenance(opts, counts);
  report["counts"] = sb::counts_to_json(counts)["arms"];

  Report observed;
  observed["surv"] = obs.surv;
  Report means = Report::array();
  for (const auto& mean : obs.outcome_mean) {
    if (mean) {
      means.push_back(*mean);
    } else {
      means.push_back(nullptr);
    }
  }
  observed["outcome_mean"] = means;
  bool any_missing = false;
  for (const auto& arm : counts.arms) any_missing |= arm.survived_y_missing > 0;
  if (any_missing) {
    // Survival rates with missing-outcome survivors kept in, so either
    // denominator convention can be read off the same report.
    observed["surv_with_missing"] = sb::summarize(counts, false).surv;
  }
  report["observed"] = observed;

  Report strata = Report::array();
  for (int k = 0; k < profile.num_strata(); ++k) {
    Report entry;
    entry["stratum"] = sb::stratum_label(k, m);
    entry["pi"] = profile.pi[k];
    if (k <= m) {
      Report p_cond = Report::array();
      for (int z = 0; z <= m; ++z) {
        if (k <= z && profile.surv[z] > 0.0) {
          p_cond.push_back(profile.p_cond(k, z));
        } else {
          p_cond.push_back(nullptr);
        }
      }
      entry["p_cond"] = p_cond;
    }
    strata.push_back(entry);
  }
  report["strata"] = strata;

  Report contrasts = Report::array();
  for (const sb::Contrast& c : sb::enumerate_contrasts(profile)) {
    contrasts.push_back({{"stratum", sb::stratum_label(c.stratum, m)},
                         {"z_high", c.z_high},
                         {"z_low", c.z_low}});
  }
  report["contrasts"] = contrasts;
  return report;
}

// --- test-global -------------------------------------------------------

Report run_test_global(const CommonOptions& opts, bool oracle_check) {
  const sb::TrialCounts counts = load_counts(opts);
  const sb::ObservedDistribution obs = sb::summarize(counts, !opts.keep_missing);
  const sb::StrataProfile profile = sb::identify_strata(obs);
  const int m = profile.max_level();
  const sb::StepDownResult result = sb::test_global(obs, profile);

  Report report;
  report["command"] = "test-global";
  report["provenance"] = provenance(opts, counts);
  report["rejected"] = result.rejected;
  if (result.reject_stage) {
    report["reject_stage"] = *result.reject_stage;
  } else {
    report["reject_stage"] = nullptr;
  }
  Report chain = Report::array();
  for (std::size_t k = 0; k < result.identified_mu.size(); ++k) {
    Report entry;
    entry["stratum"] = sb::stratum_label(static_cast<int>(k), m);
    if (result.identified_mu[k]) {
      entry["value"] = result.identified_mu[k]->value;
      entry["within_unit"] = result.identified_mu[k]->within_unit;
    } else {
      entry["value"] = nullptr;
    }
    chain.push_back(entry);
  }
  report["identified_mu"] = chain;
  Report stages = Report::array();
  for (const sb::StageRecord& rec : result.stages) {
    Report stage;
    stage["stage"] = rec.stage;
    stage["stratum"] = sb::stratum_label(rec.stage, m);
    stage["skipped"] = rec.skipped;
    if (rec.identified) stage["identified"] = *rec.identified;
    Report intervals = Report::array();
    for (std::size_t i = 0; i < rec.intervals.size(); ++i) {
      Report iv = interval_json(rec.intervals[i]);
      iv["z"] = rec.stage + static_cast<int>(i);
      intervals.push_back(iv);
    }
    stage["intervals"] = intervals;
    stage["empty_intersection"] = rec.empty_intersection;
    stages.push_back(stage);
  }
  report["stages"] = stages;
  if (oracle_check) {
    const bool lp_compatible = sb::check_h0_compatibility(obs, profile);
    Report oracle;
    oracle["lp_h0_compatible"] = lp_compatible;
    oracle["agrees"] = lp_compatible == !result.rejected;
    if (m <= 3) {
      oracle["grid_h0_compatible"] = sb::oracle::grid_h0_compatible(obs, profile);
    }
    report["oracle_check"] = oracle;
  }
  return report;
}

// --- deltamax ----------------------------------------------------------

Report run_deltamax(const CommonOptions& opts, bool oracle_check,
                    const std::string& dump_lp_path) {
  const sb::TrialCounts counts = load_counts(opts);
  const sb::ObservedDistribution obs = sb::summarize(counts, !opts.keep_missing);
  const sb::StrataProfile profile = sb::identify_strata(obs);
  const sb::DeltaMaxSolution solution = sb::solve_delta_max_slb(obs, profile);

  if (!dump_lp_path.empty()) {
    std::ofstream out(dump_lp_path);
    if (!out) {
      throw sb::InputError("cannot write LP dump to " + dump_lp_path);
    }
    out << solution.model.lp.to_lp_format();
  }

  Report report;
  report["command"] = "deltamax";
  report["provenance"] = provenance(opts, counts);
  report["delta_max_slb"] = solution.delta_max_slb;
  Report witness = Report::array();
  const auto& vars = solution.model.lp.variables();
  for (std::size_t j = 0; j < solution.witness.size(); ++j) {
    witness.push_back({{"variable", vars[j].name}, {"value", solution.witness[j]}});
  }
  report["witness"] = witness;
  report["basis"] = solution.basis;
  if (oracle_check) {
    Report oracle;
    const double grid = sb::oracle::grid_delta_max_slb(obs, profile);
    oracle["grid_delta_max_slb"] = grid;
    oracle["abs_difference"] = std::abs(grid - solution.delta_max_slb);
    report["oracle_check"] = oracle;
  }
  return report;
}

// --- marginal ----------------------------------------------------------

Report run_marginal(const CommonOptions& opts) {
  const sb::TrialCounts counts = load_counts(opts);
  const sb::ObservedDistribution obs = sb::summarize(counts, !opts.keep_missing);
  const sb::StrataProfile profile = sb::identify_strata(obs);
  const int m = profile.max_level();

  Report report;
  report["command"] = "marginal";
  report["provenance"] = provenance(opts, counts);
  Report mu = Report::array();
  for (int k = 0; k < m; ++k) {
    if (profile.is_empty_stratum(k)) continue;
    for (int z = k; z <= m; ++z) {
      const sb::FeasibleInterval iv = sb::marginal_mu_interval(obs, profile, k, z);
      mu.push_back({{"stratum", sb::stratum_label(k, m)},
                    {"z", z},
                    {"lo", iv.lo},
                    {"hi", iv.hi}});
    }
  }
  report["mu_intervals"] = mu;
  Report contrasts = Report::array();
  for (const sb::Contrast& c : sb::enumerate_contrasts(profile)) {
    const sb::FeasibleInterval iv = sb::marginal_contrast_interval(obs, profile, c);
    contrasts.push_back({{"stratum", sb::stratum_label(c.stratum, m)},
                         {"z_high", c.z_high},
                         {"z_low", c.z_low},
                         {"lo", iv.lo},
                         {"hi", iv.hi}});
  }
  report["contrast_intervals"] = contrasts;
  return report;
}

// --- posterior ---------------------------------------------------------

Report posterior_block(const sb::PosteriorSummary& summary, int m) {
  Report block;
  block["n_drawn"] = summary.n_drawn;
  block["n_retained"] = summary.n_retained;
  block["retention"] =
      static_cast<double>(summary.n_retained) / summary.n_drawn;
  block["reject_prob_simultaneous"] = summary.reject_prob_simultaneous;
  block["reject_prob_marginal"] = summary.reject_prob_marginal;
  block["delta_max_slb"] = {{"mean", summary.slb_mean},
                            {"ci_lo", summary.slb_ci.lo},
                            {"ci_hi", summary.slb_ci.hi}};
  block["delta_max_mlb"] = {{"mean", summary.mlb_mean},
                            {"ci_lo", summary.mlb_ci.lo},
                            {"ci_hi", summary.mlb_ci.hi}};
  Report contrasts = Report::array();
  for (const sb::ContrastPosterior& cp : summary.contrasts) {
    contrasts.push_back({{"stratum", sb::stratum_label(cp.contrast.stratum, m)},
                         {"z_high", cp.contrast.z_high},
                         {"z_low", cp.contrast.z_low},
                         {"ci_lo", cp.bound_ci.lo},
                         {"ci_hi", cp.bound_ci.hi},
                         {"mean_lo", cp.mean_lo},
                         {"mean_hi", cp.mean_hi}});
  }
  block["contrasts"] = contrasts;
  if (summary.reject_prob_clinical) {
    block["reject_prob_clinical"] = *summary.reject_prob_clinical;
  }
  return block;
}

Report run_posterior(const CommonOptions& opts, const PosteriorCliOptions& popts) {
  const sb::TrialCounts counts = load_counts(opts);
  if (opts.keep_missing) {
    throw sb::InputError("the posterior path drops missing-outcome survivors; "
                         "--keep-missing-y is not supported here");
  }
  const int num_arms = static_cast<int>(counts.arms.size());
  const sb::PriorSpec prior = parse_prior(popts.prior_alpha, num_arms);
  sb::PosteriorOptions options;
  options.n_draws = popts.draws;
  options.seed = popts.seed;
  options.delta0 = popts.delta0;
  options.retention_floor = popts.retention_floor;
  const sb::PosteriorSummary summary =
      sb::summarize_posterior(counts, prior, options);

  Report report;
  report["command"] = "posterior";
  report["provenance"] = provenance(opts, counts);
  report["provenance"]["seed"] = popts.seed;
  report["provenance"]["draws"] = popts.draws;
  report["provenance"]["prior"] = prior_to_json(prior);
  report["provenance"]["retention_floor"] = popts.retention_floor;
  if (popts.delta0) report["provenance"]["delta0"] = *popts.delta0;
  report["result"] = posterior_block(summary, counts.max_level());
  return report;
}

// --- reproduce ---------------------------------------------------------

Report reproduce_hvtn(const CommonOptions& opts, const PosteriorCliOptions& popts) {
  Report rows = Report::array();
  const std::pair<std::string, sb::TrialCounts> datasets[] = {
      {"cd4_gt_350", sb::hvtn503_cd4_gt_350()},
      {"cd4_gt_200", sb::hvtn503_cd4_gt_200()},
  };
  Report prior_echo;
  for (const auto& [label, base] : datasets) {
    sb::TrialCounts counts = base;
    if (opts.scale_n) counts = sb::scale_counts(counts, *opts.scale_n);
    const sb::PriorSpec prior =
        parse_prior(popts.prior_alpha, static_cast<int>(counts.arms.size()));
    prior_echo = prior_to_json(prior);
    sb::PosteriorOptions options;
    options.n_draws = popts.draws;
    options.seed = popts.seed;
    options.delta0 = popts.delta0;
    options.retention_floor = popts.retention_floor;
    const sb::PosteriorSummary summary =
        sb::summarize_posterior(counts, prior, options);
    const double retention =
        static_cast<double>(summary.n_retained) / summary.n_drawn;
    rows.push_back({{"outcome", label},
                    {"method", "simultaneous"},
                    {"reject_prob", summary.reject_prob_simultaneous},
                    {"ci_lo", summary.slb_ci.lo},
                    {"ci_hi", summary.slb_ci.hi},
                    {"retention", retention}});
    rows.push_back({{"outcome", label},
                    {"method", "marginal"},
                    {"reject_prob", summary.reject_prob_marginal},
                    {"ci_lo", summary.mlb_ci.lo},
                    {"ci_hi", summary.mlb_ci.hi},
                    {"retention", retention}});
  }
  Report report;
  report["command"] = "reproduce";
  report["target"] = "hvtn503";
  report["provenance"] = {{"version", kVersion},
                          {"seed", popts.seed},
                          {"draws", popts.draws},
                          {"prior", prior_echo},
                          {"retention_floor", popts.retention_floor}};
  if (opts.scale_n) report["provenance"]["scale_n"] = *opts.scale_n;
  report["rows"] = rows;
  return report;
}

Report sim_point(int n1, const PosteriorCliOptions& popts) {
  const sb::TrialCounts counts = sb::hypothetical_trial(n1);
  const sb::PriorSpec prior =
      parse_prior(popts.prior_alpha, static_cast<int>(counts.arms.size()));
  sb::PosteriorOptions options;
  options.n_draws = popts.draws;
  options.seed = popts.seed;
  options.delta0 = popts.delta0;
  options.retention_floor = popts.retention_floor;
  const sb::PosteriorSummary summary =
      sb::summarize_posterior(counts, prior, options);
  Report row;
  row["n1"] = n1;
  row["reject_prob_simultaneous"] = summary.reject_prob_simultaneous;
  row["reject_prob_marginal"] = summary.reject_prob_marginal;
  row["slb_mean"] = summary.slb_mean;
  row["slb_ci_lo"] = summary.slb_ci.lo;
  row["slb_ci_hi"] = summary.slb_ci.hi;
  row["mlb_mean"] = summary.mlb_mean;
  row["mlb_ci_lo"] = summary.mlb_ci.lo;
  row["mlb_ci_hi"] = summary.mlb_ci.hi;
  row["retention"] =
      static_cast<double>(summary.n_retained) / summary.n_drawn;
  return row;
}

Report reproduce_sim(const CommonOptions& opts, const PosteriorCliOptions& popts) {
  Report report;
  report["command"] = "reproduce";
  report["target"] = "sim";
  report["provenance"] = {{"version", kVersion},
                          {"seed", popts.seed},
                          {"draws", popts.draws},
                          {"retention_floor", popts.retention_floor}};
  if (opts.n1) {
    report["result"] = sim_point(*opts.n1, popts);
  } else {
    // Full sweep over the parameter: the posterior-probability and
    // credible-band curves as plottable series.
    Report series = Report::array();
    for (int n1 = 0; n1 <= 40; ++n1) {
      series.push_back(sim_point(n1, popts));
    }
    report["series"] = series;
  }
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-identification bounds and tests for multiarm trials "
               "with truncation by death"};
  app.require_subcommand(1);

  CommonOptions common;
  PosteriorCliOptions posterior_opts;
  bool oracle_check = false;
  std::string dump_lp_path;
  std::string reproduce_target;

  CLI::App* identify = app.add_subcommand(
      "identify", "Stratum proportions and survivor shares from counts");
  add_common(identify, common);

  CLI::App* test_global = app.add_subcommand(
      "test-global", "Step-down test of the global null of no effect");
  add_common(test_global, common);
  test_global->add_flag("--oracle-check", oracle_check,
                        "Cross-check against the LP and grid oracles");

  CLI::App* deltamax = app.add_subcommand(
      "deltamax", "Sharp lower bound on the largest within-stratum effect");
  add_common(deltamax, common);
  deltamax->add_flag("--oracle-check", oracle_check,
                     "Cross-check against the exhaustive grid oracle");
  deltamax->add_option("--dump-lp", dump_lp_path,
                       "Write the linear program in LP text format");

  CLI::App* marginal = app.add_subcommand(
      "marginal", "Single-arm trimming intervals for stratum means and contrasts");
  add_common(marginal, common);

  CLI::App* posterior = app.add_subcommand(
      "posterior", "Dirichlet-posterior analysis: rejection probabilities and "
                   "credible intervals");
  add_common(posterior, common);
  add_posterior(posterior, posterior_opts);

  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "Re-run an embedded study end to end");
  reproduce->add_option("target", reproduce_target, "hvtn503 or sim")
      ->required()
      ->check(CLI::IsMember({"hvtn503", "sim"}));
  add_common(reproduce, common, /*dataset_only=*/true);
  add_posterior(reproduce, posterior_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage problems are input problems
  }

  try {
    Report report;
    if (identify->parsed()) {
      report = run_identify(common);
    } else if (test_global->parsed()) {
      report = run_test_global(common, oracle_check);
    } else if (deltamax->parsed()) {
      report = run_deltamax(common, oracle_check, dump_lp_path);
    } else if (marginal->parsed()) {
      report = run_marginal(common);
    } else if (posterior->parsed()) {
      report = run_posterior(common, posterior_opts);
    } else if (reproduce->parsed()) {
      if (reproduce_target == "hvtn503") {
        report = reproduce_hvtn(common, posterior_opts);
      } else {
        report = reproduce_sim(common, posterior_opts);
      }
    }
    emit(report, common.format);
    return 0;
  } catch (const sb::InputError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return 1;
  }
}
