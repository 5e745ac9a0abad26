// Batch front door: every subcommand reads one JSON scenario config,
// runs one computation, writes one machine-readable result.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "secseq/jsonio.hpp"

namespace {

using secseq::io::json;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfigError = 2;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string csv_path;
  std::uint64_t seed = 0;
  std::size_t grid = 64;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "scenario config (JSON)")
      ->required();
  cmd->add_option("--out", o.out_path, "result JSON path (default: stdout)");
  cmd->add_option("--csv", o.csv_path, "optional CSV side output");
  cmd->add_option("--seed", o.seed, "seed for randomized starts");
  cmd->add_option("--grid", o.grid, "grid resolution for sweeps");
  cmd->add_option("--threads", o.threads, "worker count (results identical)");
}

// Emits the result and the one-line summary; JSON goes to --out when given,
// otherwise to stdout with the summary moved to stderr.
void emit(const CommonOpts& o, const json& result, const std::string& summary) {
  const std::string text = result.dump(2) + "\n";
  if (o.out_path.empty()) {
    std::cout << text;
    std::cerr << summary << "\n";
  } else {
    secseq::io::write_text(o.out_path, text);
    std::cout << summary << "\n";
  }
}

void emit_csv(const CommonOpts& o, const std::string& text) {
  if (!o.csv_path.empty()) secseq::io::write_text(o.csv_path, text);
}

secseq::WiretapKernel wiretap_from_config(const json& cfg) {
  const json& ch = cfg.at("channel");
  if (ch.contains("wiretap"))
    return secseq::io::parse_wiretap(ch.at("wiretap"), "channel.wiretap");
  if (ch.contains("dmc")) {
    // Plain channel: model a blind eavesdropper seeing a constant.
    const auto main = secseq::io::parse_dmc(ch.at("dmc"), "channel.dmc");
    return secseq::WiretapKernel::independent_eaves(main, secseq::Pmf({1.0}));
  }
  throw secseq::io::config_error("channel needs 'dmc' or 'wiretap'");
}

secseq::Dmc dmc_from_config(const json& cfg) {
  const json& ch = cfg.at("channel");
  if (ch.contains("dmc"))
    return secseq::io::parse_dmc(ch.at("dmc"), "channel.dmc");
  if (ch.contains("wiretap"))
    return secseq::marginal_v(
        secseq::io::parse_wiretap(ch.at("wiretap"), "channel.wiretap"));
  throw secseq::io::config_error("channel needs 'dmc' or 'wiretap'");
}

int run_capacity(const CommonOpts& o) {
  const json cfg = secseq::io::load_config(o.config_path);
  const auto ch = dmc_from_config(cfg);
  const auto res = secseq::capacity(ch);
  json out{{"command", "capacity"},
           {"C", res.capacity_bits},
           {"input", res.input.probs()},
           {"iterations", res.iterations}};
  std::ostringstream s;
  s << "capacity C=" << res.capacity_bits << " bits/use";
  emit(o, out, s.str());
  return kExitOk;
}

int run_secrecy(const CommonOpts& o) {
  const json cfg = secseq::io::load_config(o.config_path);
  const auto w = wiretap_from_config(cfg);
  std::size_t aux = 0;
  if (cfg.contains("aux_size")) aux = cfg.at("aux_size").get<std::size_t>();
  const auto res = secseq::secrecy_capacity(w, aux, o.seed, o.threads);
  json out{{"command", "secrecy"},
           {"C_WT", res.secrecy_bits},
           {"aux_size", res.input.aux_size},
           {"joint", res.input.joint},
           {"best_start", res.best_start},
           {"seed", o.seed}};
  std::ostringstream s;
  s << "secrecy C_WT=" << res.secrecy_bits << " bits/use";
  emit(o, out, s.str());
  return kExitOk;
}

int run_rd(const CommonOpts& o) {
  const json cfg = secseq::io::load_config(o.config_path);
  const auto source = secseq::io::parse_source(cfg.at("source"), "source");
  secseq::RateDistortionCurve curve(source);
  const std::size_t points = std::max<std::size_t>(o.grid, 2);
  json samples = json::array();
  std::ostringstream csv;
  csv << "D,R\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double d = curve.d_min() +
                     (curve.d_max() - curve.d_min()) * static_cast<double>(i) /
                         static_cast<double>(points - 1);
    const double r = curve.rate_at_distortion(d);
    samples.push_back(json{{"D", d}, {"R", r}});
    csv << d << "," << r << "\n";
  }
  json out{{"command", "rd"},
           {"d_min", curve.d_min()},
           {"d_max", curve.d_max()},
           {"max_rate", curve.max_rate()},
           {"samples", samples}};
  emit_csv(o, csv.str());
  std::ostringstream s;
  s << "rd curve on [" << curve.d_min() << ", " << curve.d_max() << "], R(d_min)="
    << curve.max_rate();
  emit(o, out, s.str());
  return kExitOk;
}

int run_effective(const CommonOpts& o, const std::string& kind,
                  std::size_t k_opt) {
  const json cfg = secseq::io::load_config(o.config_path);
  const auto G = secseq::io::parse_cumulative(cfg.at("G"), "G");
  const auto L = secseq::io::parse_cumulative(cfg.at("L"), "L");

  double C = 0.0, C_WT = 0.0, C1 = 0.0, C2 = 0.0, ell = 1.0;
  if (cfg.contains("params")) {
    const json& p = cfg.at("params");
    if (p.contains("C")) C = p.at("C").get<double>();
    if (p.contains("C_WT")) C_WT = p.at("C_WT").get<double>();
    if (p.contains("C1")) C1 = p.at("C1").get<double>();
    if (p.contains("C2")) C2 = p.at("C2").get<double>();
    if (p.contains("ell")) ell = p.at("ell").get<double>();
    if (!p.contains("C1")) C1 = C_WT;
    if (!p.contains("C2")) C2 = C;
  } else {
    // Derive everything from the channel's rate-leakage region.
    const auto w = wiretap_from_config(cfg);
    const auto sweep = secseq::rate_leakage_boundary(w, o.grid, o.seed, o.threads);
    C = sweep.summary.C;
    C_WT = sweep.summary.C_WT;
    C1 = sweep.summary.C1;
    C2 = sweep.summary.C2;
    ell = sweep.summary.ell;
  }

  std::optional<secseq::EffectiveProfile> profile;
  if (kind == "outer") {
    profile = secseq::effective_out(G, L, C, C_WT);
  } else if (kind == "inner") {
    profile = secseq::effective_in(G, L, C1, C2, ell);
  } else if (kind == "discretized") {
    if (k_opt == 0)
      throw secseq::io::config_error("--kind discretized requires --k");
    profile = secseq::discretize_effective(G, L, C, C_WT, k_opt);
  } else {
    throw secseq::io::config_error("--kind must be outer|inner|discretized");
  }

  json out = secseq::io::to_json(*profile);
  out["command"] = "effective";
  if (cfg.contains("source")) {
    const auto source = secseq::io::parse_source(cfg.at("source"), "source");
    secseq::RateDistortionCurve curve(source);
    out["distortion_bound"] = secseq::distortion_bound(*profile, curve);
  } else {
    out["distortion_bound"] = nullptr;
  }
  if (k_opt > 0) {
    const auto plan = secseq::block_rate_plan(*profile, G, k_opt);
    out["block_plan"] = json{{"source_rates", plan.source_rates},
                             {"effective_rates", plan.effective_rates},
                             {"channel_budgets", plan.channel_budgets},
                             {"channel_rates", plan.channel_rates}};
  } else {
    out["block_plan"] = nullptr;
  }

  std::ostringstream csv;
  csv << "alpha,raw,envelope\n";
  const std::size_t pts = std::max<std::size_t>(o.grid, 2);
  for (std::size_t i = 0; i < pts; ++i) {
    const double a = static_cast<double>(i) / static_cast<double>(pts - 1);
    csv << a << "," << profile->raw.eval(a) << "," << profile->envelope(a)
        << "\n";
  }
  emit_csv(o, csv.str());

  std::ostringstream s;
  s << "effective " << kind << " penalty=" << profile->penalty_constant
    << " raw(1)=" << profile->raw.eval(1.0);
  emit(o, out, s.str());
  return kExitOk;
}

int run_reshape(const CommonOpts& o) {
  const json cfg = secseq::io::load_config(o.config_path);
  secseq::RateVector in;
  for (const auto& x : cfg.at("rates")) in.entries.push_back(x.get<double>());
  in.k = in.entries.size();
  const double target = cfg.at("target_total").get<double>();
  const auto out_rates = secseq::reshape_rates(in, target);
  json out{{"command", "reshape"},
           {"input", in.entries},
           {"target_total", target},
           {"output", out_rates.entries}};
  std::ostringstream s;
  s << "reshape k=" << in.entries.size() << " total=" << target;
  emit(o, out, s.str());
  return kExitOk;
}

int run_boundary(const CommonOpts& o) {
  const json cfg = secseq::io::load_config(o.config_path);
  const auto w = wiretap_from_config(cfg);
  const auto sweep = secseq::rate_leakage_boundary(w, o.grid, o.seed, o.threads);
  json pts = json::array();
  std::ostringstream csv;
  csv << "R,R_L\n";
  for (const auto& p : sweep.points) {
    pts.push_back(json::array({p.rate, p.leakage}));
    csv << p.rate << "," << p.leakage << "\n";
  }
  emit_csv(o, csv.str());
  json out{{"command", "boundary"},
           {"summary", secseq::io::to_json(sweep.summary)},
           {"points", pts}};
  std::ostringstream s;
  s << "boundary C=" << sweep.summary.C << " C_WT=" << sweep.summary.C_WT
    << " ell=" << sweep.summary.ell;
  emit(o, out, s.str());
  return kExitOk;
}

int run_simulate(const CommonOpts& o, std::size_t mc_trials) {
  const json cfg = secseq::io::load_config(o.config_path);
  const auto source = secseq::io::parse_source(cfg.at("source"), "source");
  const auto w = wiretap_from_config(cfg);
  const auto G = secseq::io::parse_cumulative(cfg.at("G"), "G");
  const auto L = secseq::io::parse_cumulative(cfg.at("L"), "L");
  const double d_bar = cfg.at("d_bar").get<double>();
  const auto code =
      secseq::io::parse_code(cfg.at("code"), source, w, G, "code");

  if (mc_trials > 0) {
    // Distortion-only sampling mode for instances too large to enumerate;
    // no leakage accounting here.
    const double est = secseq::mc_distortion(code, source, secseq::marginal_v(w),
                                             o.seed, mc_trials);
    json out{{"command", "simulate"},
             {"mode", "monte-carlo"},
             {"expected_distortion_estimate", est},
             {"trials", mc_trials},
             {"seed", o.seed},
             {"d_bar", d_bar}};
    std::ostringstream s;
    s << "simulate (mc) E[d]~" << est << " over " << mc_trials << " trials";
    emit(o, out, s.str());
    return kExitOk;
  }

  const auto report = secseq::run_exact(code, source, w, G, L, d_bar);

  json out = secseq::io::to_json(report);
  out["command"] = "simulate";
  const auto mono = secseq::audit_monotone_leakage(report, code.n, code.k);
  out["leakage_monotone"] = mono.ok;

  std::ostringstream csv;
  csv << "i,leakage,L\n";
  for (std::size_t i = 0; i < report.leakage.size(); ++i)
    csv << i + 1 << "," << report.leakage[i] << ","
        << report.leakage_budget[i] << "\n";
  emit_csv(o, csv.str());

  std::ostringstream s;
  s << "simulate E[d]=" << report.expected_distortion << " violations="
    << report.violations.size();
  emit(o, out, s.str());
  return report.violations.empty() ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secure sequential source-channel coding toolkit"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string kind = "outer";
  std::size_t k_opt = 0;
  std::size_t mc_trials = 0;

  CLI::App* c_cap = app.add_subcommand("capacity", "channel capacity");
  add_common(c_cap, o);
  CLI::App* c_sec = app.add_subcommand("secrecy", "wiretap secrecy capacity");
  add_common(c_sec, o);
  CLI::App* c_rd = app.add_subcommand("rd", "rate-distortion curve");
  add_common(c_rd, o);
  CLI::App* c_eff = app.add_subcommand("effective", "effective rate profile");
  add_common(c_eff, o);
  c_eff->add_option("--kind", kind, "outer|inner|discretized");
  c_eff->add_option("--k", k_opt, "block count (discretized / block plan)");
  CLI::App* c_resh = app.add_subcommand("reshape", "converse rate reshaping");
  add_common(c_resh, o);
  CLI::App* c_bnd = app.add_subcommand("boundary", "rate-leakage boundary");
  add_common(c_bnd, o);
  CLI::App* c_sim = app.add_subcommand("simulate", "exact sequential-code audit");
  add_common(c_sim, o);
  c_sim->add_option("--mc", mc_trials,
                    "Monte-Carlo trials (distortion only, skips enumeration)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_cap->parsed()) return run_capacity(o);
    if (c_sec->parsed()) return run_secrecy(o);
    if (c_rd->parsed()) return run_rd(o);
    if (c_eff->parsed()) return run_effective(o, kind, k_opt);
    if (c_resh->parsed()) return run_reshape(o);
    if (c_bnd->parsed()) return run_boundary(o);
    if (c_sim->parsed()) return run_simulate(o, mc_trials);
  } catch (const secseq::io::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const secseq::feasibility_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitViolation;
  } catch (const secseq::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolation;
  }
  return kExitConfigError;
}
