// effsize: effective portfolio size pipelines.
//
//   effsize estimate-corr  --prices FILE [--matrix FILE] [--out FILE]
//   effsize effsize        (--corr FILE | --prices FILE [--index FILE]) [--sectors FILE]
//   effsize subset-curve   --prices FILE [--sectors FILE] [--sizes 2:30] [--draws N] [--seed S]
//   effsize sliding        --prices FILE [--window 252] [--step 1]
//   effsize fig1           [--M 10] [--p 0.55,0.6,0.7] [--C 0:1:0.05]
//   effsize fig2           [--M 10] [--p 0.55] [--C-true 0.2] [--C 0:0.6:0.05]
//   effsize variance-ratio --index FILE --prices FILE
//   effsize synth          [--blocks 10,10,10] [--C 0.5,0.3,0.2] [--p 0.55] [--days N]
//                          [--scale 0.01] [--seed S] [--sectors-out F] [--index-out F]
//
// Every subcommand accepts --out FILE (default: standard output).

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "effsize/commands.hpp"

namespace {

using namespace effsize::cli;

template <class T>
std::optional<T> maybe(const CLI::Option* opt, const T& value) {
  return opt->count() > 0 ? std::optional<T>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective portfolio size of correlated assets"};
  app.require_subcommand(1);

  std::string out;
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Output table path (default: stdout)");
  };

  // estimate-corr
  EstimateCorrConfig est;
  std::string est_matrix;
  auto* est_cmd = app.add_subcommand("estimate-corr", "Estimate the correlation matrix of a price file");
  est_cmd->add_option("--prices", est.prices, "Price file")->required();
  auto* est_matrix_opt = est_cmd->add_option("--matrix", est_matrix, "Write the matrix here");
  add_out(est_cmd);

  // effsize
  EffsizeConfig eff;
  std::string eff_corr, eff_prices, eff_sectors, eff_index;
  auto* eff_cmd = app.add_subcommand("effsize", "Effective size estimates for one asset set");
  auto* eff_corr_opt = eff_cmd->add_option("--corr", eff_corr, "Correlation matrix file");
  auto* eff_prices_opt = eff_cmd->add_option("--prices", eff_prices, "Price file");
  auto* eff_sectors_opt = eff_cmd->add_option("--sectors", eff_sectors, "Sector file");
  auto* eff_index_opt = eff_cmd->add_option("--index", eff_index, "Index price file");
  add_out(eff_cmd);

  // subset-curve
  SubsetCurveConfig sub;
  std::string sub_sectors, sub_sizes;
  auto* sub_cmd = app.add_subcommand("subset-curve", "Average effective size of random subsets");
  sub_cmd->add_option("--prices", sub.prices, "Price file")->required();
  auto* sub_sectors_opt = sub_cmd->add_option("--sectors", sub_sectors, "Sector file");
  auto* sub_sizes_opt = sub_cmd->add_option("--sizes", sub_sizes, "Sizes: list or start:stop[:step]");
  sub_cmd->add_option("--draws", sub.draws, "Random draws per size")->capture_default_str();
  sub_cmd->add_option("--seed", sub.seed, "Random seed")->capture_default_str();
  add_out(sub_cmd);

  // sliding
  SlidingConfig sl;
  auto* sl_cmd = app.add_subcommand("sliding", "Effective size over a sliding window");
  sl_cmd->add_option("--prices", sl.prices, "Price file")->required();
  sl_cmd->add_option("--window", sl.window, "Window length in trading days")->capture_default_str();
  sl_cmd->add_option("--step", sl.step, "Window stride in trading days")->capture_default_str();
  add_out(sl_cmd);

  // fig1
  Fig1Config f1;
  auto* f1_cmd = app.add_subcommand("fig1", "First-order vs numeric Kelly effective size");
  f1_cmd->add_option("--M", f1.M, "Number of assets")->capture_default_str();
  f1_cmd->add_option("--p", f1.p_list, "Win probabilities")->capture_default_str();
  f1_cmd->add_option("--C", f1.c_grid, "Correlation grid")->capture_default_str();
  add_out(f1_cmd);

  // fig2
  Fig2Config f2;
  auto* f2_cmd = app.add_subcommand("fig2", "Growth rate under a mis-estimated correlation");
  f2_cmd->add_option("--M", f2.M, "Number of assets")->capture_default_str();
  f2_cmd->add_option("--p", f2.p, "Win probability")->capture_default_str();
  f2_cmd->add_option("--C-true", f2.c_true, "Actual correlation")->capture_default_str();
  f2_cmd->add_option("--C", f2.c_grid, "Assumed correlation grid")->capture_default_str();
  add_out(f2_cmd);

  // variance-ratio
  VarianceRatioConfig vr;
  auto* vr_cmd = app.add_subcommand("variance-ratio", "Mean stock variance over index variance");
  vr_cmd->add_option("--index", vr.index, "Index price file")->required();
  vr_cmd->add_option("--prices", vr.prices, "Constituent price file")->required();
  add_out(vr_cmd);

  // synth
  SynthConfig sy;
  std::string sy_sectors, sy_index;
  auto* sy_cmd = app.add_subcommand("synth", "Synthetic price panel from the hidden-asset model");
  sy_cmd->add_option("--blocks", sy.blocks, "Assets per sector")->capture_default_str();
  sy_cmd->add_option("--C", sy.correlations, "Correlation per sector")->capture_default_str();
  sy_cmd->add_option("--p", sy.p, "Win probability")->capture_default_str();
  sy_cmd->add_option("--days", sy.days, "Number of return periods")->capture_default_str();
  sy_cmd->add_option("--scale", sy.scale, "Return magnitude")->capture_default_str();
  sy_cmd->add_option("--seed", sy.seed, "Random seed")->capture_default_str();
  auto* sy_sectors_opt = sy_cmd->add_option("--sectors-out", sy_sectors, "Write sector file");
  auto* sy_index_opt = sy_cmd->add_option("--index-out", sy_index, "Write equal-weight index");
  add_out(sy_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (est_cmd->parsed()) {
    est.matrix_out = maybe(est_matrix_opt, est_matrix);
    return run_to(out, est, cmd_estimate_corr);
  }
  if (eff_cmd->parsed()) {
    eff.corr = maybe(eff_corr_opt, eff_corr);
    eff.prices = maybe(eff_prices_opt, eff_prices);
    eff.sectors = maybe(eff_sectors_opt, eff_sectors);
    eff.index = maybe(eff_index_opt, eff_index);
    return run_to(out, eff, cmd_effsize);
  }
  if (sub_cmd->parsed()) {
    sub.sectors = maybe(sub_sectors_opt, sub_sectors);
    sub.sizes = maybe(sub_sizes_opt, sub_sizes);
    return run_to(out, sub, cmd_subset_curve);
  }
  if (sl_cmd->parsed()) return run_to(out, sl, cmd_sliding);
  if (f1_cmd->parsed()) return run_to(out, f1, cmd_fig1);
  if (f2_cmd->parsed()) return run_to(out, f2, cmd_fig2);
  if (vr_cmd->parsed()) return run_to(out, vr, cmd_variance_ratio);
  if (sy_cmd->parsed()) {
    sy.sectors_out = maybe(sy_sectors_opt, sy_sectors);
    sy.index_out = maybe(sy_index_opt, sy_index);
    return run_to(out, sy, cmd_synth);
  }
  return kUsage;
}
