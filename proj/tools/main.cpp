// Command-line front door: scenario runs, polytope queries, optimization,
// and the demo reproductions, all emitting machine-readable JSON on stdout
// (presentation-only text goes to stderr).
//
// Exit codes: 0 success, 1 usage, 2 numerical/size-guard failure,
// 3 invalid input, 4 LP failure. Verdicts like "outside" or "no violation"
// are results, not errors, and exit 0.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ewfs/errors.hpp"
#include "ewfs/json_io.hpp"

using namespace ewfs;

namespace {

double env_tolerance() {
  if (const char* v = std::getenv("EWFS_TOL")) return std::atof(v);
  return 1e-10;
}

void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write '" + out_path + "'");
    out << text;
  }
}

EugeneSetting setting_from_flag(int x) {
  if (x == 1) return EugeneSetting::PopAndAsk;
  if (x == 2) return EugeneSetting::ReverseAndMeasure;
  throw std::invalid_argument("--x must be 1 (ask) or 2 (reverse)");
}

Ticket ticket_from_name(const std::string& name) {
  if (name == "G0") return Ticket::g0();
  if (name == "G1") return Ticket::g1();
  if (name == "G2") return Ticket::g2();
  if (name == "G01") return Ticket::g01();
  throw std::invalid_argument("unknown ticket '" + name + "'");
}

SettleOrder order_from_name(const std::string& name) {
  if (name == "wallet-first") return SettleOrder::WalletFirst;
  if (name == "measurement-first") return SettleOrder::MeasurementFirst;
  if (name == "simultaneous") return SettleOrder::Simultaneous;
  if (name == "wallet-before-reversal") return SettleOrder::WalletBeforeReversal;
  throw std::invalid_argument("unknown order '" + name + "'");
}

struct Options {
  std::string scenario_path, model = "unitary", out;
  std::string table_path, variant = "lf";
  int nx = 2, ny = 2, ka = 2, kb = 2;
  std::string vertex_model = "lf";
  std::string inequality_path, config_path;
  std::optional<std::uint64_t> seed;
  int restarts = 0;  // 0: keep the config/default value
  bool trivial_friend = false, optimize_state = false;
  int bb_d = 3;
  double alpha = 0.6, beta = 0.8;
  std::string ticket = "G1", perspective = "external";
  int internal_c = 0, x_setting = 1;
  std::string order = "simultaneous";
  double b_alpha = 0.6, b_beta = 0.8, b_gamma = 0.6, b_delta = 0.8;
  BetSetup bet() const { return {b_alpha, b_beta, b_gamma, b_delta}; }
};

int cmd_run(const Options& opt) {
  const BubbleScenario sc = scenario_from_json(load_json_file(opt.scenario_path));
  const ValidationReport report = validate(sc);
  if (!report.ok()) {
    for (const auto& v : report.violations)
      std::fprintf(stderr, "scenario: %s\n", v.c_str());
    return 3;
  }
  const double tol = env_tolerance();
  json out;
  auto pack = [&](const CorrelationTable& t) {
    const NoSignallingReport ns = no_signalling_report(t);
    json j = json{{"table", table_to_json(t)},
                  {"no_signalling", ns_report_to_json(ns)}};
    j["no_signalling"]["pass"] = ns.pass(tol);
    return j;
  };
  if (opt.model == "unitary" || opt.model == "both")
    out["unitary"] = pack(run_correlations(sc));
  if (opt.model == "collapse" || opt.model == "both")
    out["collapse"] = pack(run_collapse_correlations(sc));
  if (out.empty())
    throw std::invalid_argument("--model must be unitary, collapse or both");
  emit(out, opt.out);
  return 0;
}

int cmd_lf_membership(const Options& opt) {
  const CorrelationTable t = table_from_json(load_json_file(opt.table_path));
  MembershipCertificate cert;
  if (opt.variant == "bell")
    cert = bell_membership(t);
  else if (opt.variant == "lf")
    cert = lf_membership(t, LfVariant::OneFriend);
  else if (opt.variant == "lf2")
    cert = lf_membership(t, LfVariant::TwoFriend);
  else
    throw std::invalid_argument("--variant must be bell, lf or lf2");
  emit(certificate_to_json(cert), opt.out);
  return 0;
}

int cmd_lf_vertices(const Options& opt) {
  const TableDims dims{opt.nx, opt.ny, opt.ka, opt.kb};
  VertexSet vs;
  if (opt.vertex_model == "bell")
    vs = bell_vertices(dims);
  else if (opt.vertex_model == "lf")
    vs = lf_vertices(dims);
  else if (opt.vertex_model == "ns")
    vs = ns_vertices(dims);
  else
    throw std::invalid_argument("--model must be bell, lf or ns");
  std::fprintf(stderr, "%zu vertices\n", vs.vertices.size());
  emit(vertex_set_to_json(vs), opt.out);
  return 0;
}

int cmd_lf_optimize(const Options& opt) {
  const Inequality iq = inequality_from_json(load_json_file(opt.inequality_path));
  OptimizeConfig config;
  bool have_seed = false;
  if (!opt.config_path.empty()) {
    const json cj = load_json_file(opt.config_path);
    config = optimize_config_from_json(cj);
    have_seed = cj.contains("seed");
  }
  if (opt.seed.has_value()) {
    config.seed = *opt.seed;
    have_seed = true;
  }
  if (!have_seed) {
    std::fprintf(stderr, "a seed is required for stochastic commands\n");
    return 1;
  }
  if (opt.restarts > 0) config.restarts = opt.restarts;
  config.optimize_state |= opt.optimize_state;

  if (iq.dims.ka != 2 || iq.dims.kb != 2)
    throw std::invalid_argument("the optimizer handles binary-outcome scenarios");
  ScenarioTemplate tpl;
  tpl.nx = iq.dims.nx;
  tpl.ny = iq.dims.ny;
  tpl.trivial_friend = opt.trivial_friend;

  emit(violation_result_to_json(optimize(iq, tpl, config)), opt.out);
  return 0;
}

int cmd_bb(const Options& opt) {
  const RetroReport rep = bb_retro_demo(opt.bb_d);
  std::fprintf(stderr, "c   P(c|x=1)              P(c|x=2)\n");
  for (std::size_t c = 0; c < rep.p_interrogation.size(); ++c)
    std::fprintf(stderr, "%-3zu %-21.17g %-21.17g\n", c, rep.p_interrogation[c],
                 rep.p_alternative[c]);
  std::fprintf(stderr, "L1 distance %.17g\n", rep.l1_distance);
  emit(retro_report_to_json(rep), opt.out);
  return 0;
}

int cmd_deutsch(const Options& opt) {
  const DeutschScenario sc{opt.alpha, opt.beta};
  const DeutschUnitaryResult uni = deutsch_unitary(sc);
  const DeutschCollapseResult col = deutsch_collapse(sc);
  std::fprintf(stderr, "unitary p_phi0 %.17g, collapse p_phi0 %.17g\n",
               uni.p_phi0, col.p_phi0);
  emit(json{{"p_phi0_unitary", uni.p_phi0},
            {"p_phi0_collapse", col.p_phi0},
            {"gap", uni.p_phi0 - col.p_phi0},
            {"record_register_prob", uni.fm_record_prob}},
       opt.out);
  return 0;
}

Perspective cli_perspective(const Options& opt) {
  if (opt.perspective == "external") return Perspective::external();
  if (opt.perspective == "internal") return Perspective::internal(opt.internal_c);
  throw std::invalid_argument("--perspective must be external or internal");
}

int cmd_bet_price(const Options& opt) {
  const double price =
      price_ticket(ticket_from_name(opt.ticket), cli_perspective(opt),
                   opt.bet(), setting_from_flag(opt.x_setting));
  emit(json{{"ticket", opt.ticket},
            {"perspective", opt.perspective},
            {"price", price}},
       opt.out);
  return 0;
}

int cmd_bet_settle(const Options& opt) {
  const Perspective p = cli_perspective(opt);
  const SettlementReport rep = run_protocol(
      ticket_from_name(opt.ticket), p.kind, opt.bet(),
      setting_from_flag(opt.x_setting), order_from_name(opt.order));
  std::fprintf(stderr, "gain                  probability\n");
  for (const auto& [g, prob] : rep.gains)
    std::fprintf(stderr, "%-21.17g %-21.17g\n", g, prob);
  std::fprintf(stderr, "expected %.17g%s\n", rep.expected_gain,
               rep.refunded ? " (refunded)" : "");
  emit(settlement_to_json(rep), opt.out);
  return 0;
}

int cmd_bet_audit(const Options& opt) {
  const AuditReport rep = total_probability_audit(opt.bet());
  std::fprintf(stderr,
               "x=1: external %.17g internal %.17g gap %.17g\n"
               "x=2: external %.17g internal %.17g gap %.17g\n",
               rep.external_x1, rep.internal_marginal_x1, rep.gap_x1,
               rep.external_x2, rep.internal_marginal_x2, rep.gap_x2);
  emit(audit_to_json(rep), opt.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extended Wigner's-friend simulator and Local Friendliness toolkit"};
  app.require_subcommand(1);
  Options opt;
  std::function<int(const Options&)> action;
  auto bind = [&](CLI::App* cmd, int (*fn)(const Options&)) {
    cmd->callback([&action, fn] { action = fn; });
  };

  CLI::App* run = app.add_subcommand("run", "correlation tables of a scenario file");
  run->add_option("--scenario", opt.scenario_path, "scenario JSON file")
      ->required();
  run->add_option("--model", opt.model, "unitary | collapse | both");
  run->add_option("--out", opt.out, "output path (default stdout)");
  bind(run, cmd_run);

  CLI::App* lf = app.add_subcommand("lf", "polytope queries");
  lf->require_subcommand(1);
  CLI::App* membership =
      lf->add_subcommand("membership", "decide Bell/LF membership of a table");
  membership->add_option("--table", opt.table_path, "correlation JSON file")
      ->required();
  membership->add_option("--variant", opt.variant, "bell | lf | lf2");
  membership->add_option("--out", opt.out, "output path");
  bind(membership, cmd_lf_membership);

  CLI::App* vertices = lf->add_subcommand("vertices", "enumerate polytope vertices");
  vertices->add_option("--nx", opt.nx)->required();
  vertices->add_option("--ny", opt.ny)->required();
  vertices->add_option("--ka", opt.ka)->required();
  vertices->add_option("--kb", opt.kb)->required();
  vertices->add_option("--model", opt.vertex_model, "bell | lf | ns");
  vertices->add_option("--out", opt.out, "output path");
  bind(vertices, cmd_lf_vertices);

  CLI::App* optimize_cmd =
      lf->add_subcommand("optimize", "maximize an inequality over EWFS settings");
  optimize_cmd->add_option("--inequality", opt.inequality_path)->required();
  optimize_cmd->add_option("--config", opt.config_path, "optimizer config JSON");
  optimize_cmd->add_option("--seed", opt.seed, "RNG seed (required)");
  optimize_cmd->add_option("--restarts", opt.restarts);
  optimize_cmd->add_flag("--trivial-friend", opt.trivial_friend,
                         "plain Bell scenario, no pointer register");
  optimize_cmd->add_flag("--optimize-state", opt.optimize_state);
  optimize_cmd->add_option("--out", opt.out, "output path");
  bind(optimize_cmd, cmd_lf_optimize);

  CLI::App* bb = app.add_subcommand("bb", "two-pointer prescription demo");
  bb->add_option("--d", opt.bb_d, "system dimension");
  bb->add_option("--out", opt.out, "output path");
  bind(bb, cmd_bb);
  CLI::App* bb_demo = bb->add_subcommand("demo", "same as bare bb");
  bb_demo->add_option("--d", opt.bb_d, "system dimension");
  bind(bb_demo, cmd_bb);

  CLI::App* deutsch = app.add_subcommand("deutsch", "reversal experiment");
  deutsch->add_option("--alpha", opt.alpha)->required();
  deutsch->add_option("--beta", opt.beta)->required();
  deutsch->add_option("--out", opt.out, "output path");
  bind(deutsch, cmd_deutsch);

  CLI::App* bet = app.add_subcommand("bet", "wallet gambling calculus");
  bet->require_subcommand(1);
  CLI::App* price = bet->add_subcommand("price", "ticket price per perspective");
  CLI::App* settle = bet->add_subcommand("settle", "run and settle a gamble");
  CLI::App* audit = bet->add_subcommand("audit", "total-probability audit");
  std::string bet_config;
  for (CLI::App* cmd : {price, settle}) {
    cmd->add_option("--ticket", opt.ticket, "G0 | G1 | G2 | G01");
    cmd->add_option("--perspective", opt.perspective, "external | internal");
    cmd->add_option("--c", opt.internal_c, "internal outcome (pricing)");
    cmd->add_option("--x", opt.x_setting, "1 = ask, 2 = reverse");
    cmd->add_option("--out", opt.out, "output path");
  }
  settle->add_option("--order", opt.order,
                     "wallet-first | measurement-first | simultaneous | "
                     "wallet-before-reversal");
  audit->add_option("--out", opt.out, "output path");
  for (CLI::App* cmd : {price, settle, audit}) {
    cmd->add_option("--config", bet_config,
                    "bet config JSON {alpha, beta, gamma, delta, ticket, "
                    "perspective, order, c, x}; explicit flags override");
    cmd->add_option("--alpha", opt.b_alpha);
    cmd->add_option("--beta", opt.b_beta);
    cmd->add_option("--gamma", opt.b_gamma);
    cmd->add_option("--delta", opt.b_delta);
  }
  auto apply_bet_config = [&opt, &bet_config](CLI::App* cmd) {
    if (bet_config.empty()) return;
    const json j = load_json_file(bet_config);
    auto set = [&](const char* flag, auto& field) {
      using T = std::decay_t<decltype(field)>;
      const CLI::Option* op = cmd->get_option_no_throw(flag);
      if (op && op->count() > 0) return;  // explicit flags win
      if (j.contains(flag + 2)) field = j.at(flag + 2).get<T>();
    };
    set("--alpha", opt.b_alpha);
    set("--beta", opt.b_beta);
    set("--gamma", opt.b_gamma);
    set("--delta", opt.b_delta);
    set("--ticket", opt.ticket);
    set("--perspective", opt.perspective);
    set("--order", opt.order);
    set("--c", opt.internal_c);
    set("--x", opt.x_setting);
  };
  price->callback([&action, &apply_bet_config, price] {
    action = [&apply_bet_config, price](const Options& o) {
      apply_bet_config(price);
      return cmd_bet_price(o);
    };
  });
  settle->callback([&action, &apply_bet_config, settle] {
    action = [&apply_bet_config, settle](const Options& o) {
      apply_bet_config(settle);
      return cmd_bet_settle(o);
    };
  });
  audit->callback([&action, &apply_bet_config, audit] {
    action = [&apply_bet_config, audit](const Options& o) {
      apply_bet_config(audit);
      return cmd_bet_audit(o);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return action ? action(opt) : 1;
  } catch (const LpFailure& e) {
    std::fprintf(stderr, "LP failure: %s\n", e.what());
    return 4;
  } catch (const SizeGuardError& e) {
    std::fprintf(stderr, "size guard: %s\n", e.what());
    return 2;
  } catch (const UnboundedError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 3;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "refused: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 3;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  }
}
