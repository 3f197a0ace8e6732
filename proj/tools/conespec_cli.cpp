// conespec: command-line front end.
//
//   conespec modes      --config c.json --out dir
//   conespec spectrum   --config c.json --out dir
//   conespec sweep      --config c.json --out dir [--svg]
//   conespec aps-kernel --config c.json --out dir
//   conespec mcgowan    --config c.json --out dir
//   conespec dodziuk    --lambda 2 --eta 0 --n 2 --p 1
//
// Exit status 0 iff every embedded check of the subcommand passes; 1 when a
// check fails; 2 on errors (a JSON error record goes to stderr).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "conespec/analysis.hpp"
#include "conespec/aps_limit.hpp"
#include "conespec/config.hpp"
#include "conespec/geometry.hpp"
#include "conespec/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace conespec;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  bool svg = false;
  int jobs = 0;
  long seed = 0;
};

struct Context {
  RunConfig cfg;
  std::string hash;
  fs::path out;
};

Context make_context(const Flags& f) {
  Context c;
  if (!f.config.empty()) c.cfg = load_config(f.config);
  if (!f.out.empty()) c.cfg.output.dir = f.out;
  if (!f.format.empty()) c.cfg.output.format = f.format;
  if (f.svg) c.cfg.output.svg = true;
  if (f.jobs > 0) c.cfg.jobs = f.jobs;
  validate(c.cfg);
  c.hash = config_hash(c.cfg);
  c.out = c.cfg.output.dir;
  fs::create_directories(c.out);
  return c;
}

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks) a.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return a;
}

bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

// CSV or JSON rendering of one table, chosen by --format.
void emit_table(const Context& ctx, const std::string& stem, const CsvTable& t,
                const json& rows) {
  if (ctx.cfg.output.format == "json") {
    json doc = {{"version", kVersion}, {"config_hash", ctx.hash}, {"columns", t.header()},
                {"rows", rows}};
    write_text((ctx.out / (stem + ".json")).string(), doc.dump(2) + "\n");
  } else {
    write_text((ctx.out / (stem + ".csv")).string(), t.render(ctx.hash));
  }
}

void write_report(const Context& ctx, const std::string& command, json body,
                  const std::vector<Check>& checks) {
  body["command"] = command;
  body["version"] = kVersion;
  body["config_hash"] = ctx.hash;
  body["config"] = to_json(ctx.cfg);
  body["checks"] = checks_json(checks);
  body["pass"] = all_pass(checks);
  write_text((ctx.out / "report.json").string(), body.dump(2) + "\n");
}

void print_checks(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
}

int cmd_modes(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SolverOptions opt = cfg.solver();
  CsvTable t({"n", "q", "k", "mu_sq", "mult", "family", "gamma", "degree"});
  json rows = json::array();
  bool abs_ok = true, nonzero_ok = true, formula_ok = true;
  double min_abs = INFINITY;
  for (int p = 0; p <= cfg.n + 1; ++p) {
    for (const auto& ch : gamma_channels(cfg.n, p, cfg.mu_sq_max, opt.provider)) {
      const auto& m = ch.block.source;
      const std::string k = m.level ? std::to_string(*m.level) : "harmonic";
      t.row() << cfg.n << m.q << k << m.mu_sq << ch.multiplicity << to_string(ch.block.family)
              << ch.gamma << p;
      rows.push_back({cfg.n, m.q, k, m.mu_sq, ch.multiplicity, to_string(ch.block.family),
                      ch.gamma, p});
      min_abs = std::min(min_abs, std::abs(ch.gamma));
      abs_ok = abs_ok && std::abs(ch.gamma) >= 0.5 * cfg.n * (1.0 - 1e-12);
      nonzero_ok = nonzero_ok && ch.gamma != 0.0;
      if (!m.harmonic()) {
        const double s = std::sqrt(m.mu_sq + std::pow(0.5 * (cfg.n - 1) - m.q, 2));
        const double base = ch.block.family == BlockFamily::PlusHalf ? 0.5 : -0.5;
        const double expect = ch.index == 0 ? base + s : base - s;
        formula_ok = formula_ok && std::abs(ch.gamma - expect) <= 1e-12 * std::abs(expect);
      }
    }
  }
  emit_table(ctx, "modes", t, rows);
  std::vector<Check> checks = {
      {"gamma_lower_bound", abs_ok, "min |gamma| = " + fmt_num(min_abs) + ", n/2 = " + fmt_num(0.5 * cfg.n)},
      {"zero_not_in_spectrum", nonzero_ok, "0 is not an eigenvalue of A"},
      {"block_formula", formula_ok, "block eigenvalues match +-1/2 +- sqrt(mu^2 + ((n-1)/2 - q)^2)"}};
  write_report(ctx, "modes", {{"channels", t.size()}}, checks);
  print_checks(checks);
  return all_pass(checks) ? 0 : 1;
}

int cmd_spectrum(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SweepConfig sc = cfg.sweep();
  const SolverOptions opt = cfg.solver();
  std::vector<std::pair<std::string, Profile>> profs = {{"m1", sc.m1}};
  for (double eps : cfg.epsilons) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "m_eps=%.12g", eps);
    profs.push_back({buf, connected_sum_profile(sc.m1, sc.m2, eps)});
  }
  CsvTable t({"profile", "p", "lambda", "multiplicity", "family", "q", "k", "unit_dim"});
  json rows = json::array();
  json summary = json::array();
  bool zeros_ok = true, agree_ok = true;
  for (const auto& [name, prof] : profs) {
    for (int p : cfg.degrees) {
      const SpectrumResult s = assemble_spectrum(prof, cfg.n, p, cfg.lambda_max, opt);
      for (const auto& e : s.entries) {
        t.row() << name << p << e.lambda << e.multiplicity << to_string(e.family) << e.q
                << e.level << e.unit_dim;
        rows.push_back({name, p, e.lambda, e.multiplicity, to_string(e.family), e.q, e.level,
                        e.unit_dim});
      }
      zeros_ok = zeros_ok && s.zero_count == s.analytic_zero_count;
      agree_ok = agree_ok && s.max_rel_disagreement <= cfg.agreement_tol;
      summary.push_back({{"profile", name},
                         {"id", prof.id},
                         {"p", p},
                         {"entries", s.entries.size()},
                         {"zero_count", s.zero_count},
                         {"analytic_zero_count", s.analytic_zero_count},
                         {"max_rel_disagreement", s.max_rel_disagreement},
                         {"channel_bound_violations", s.bound_violations},
                         {"units", s.units.size()},
                         {"c_max", s.c_max},
                         {"mu_sq_max", s.mu_sq_max}});
    }
  }
  emit_table(ctx, "spectrum", t, rows);
  std::vector<Check> checks = {
      {"zero_modes_analytic", zeros_ok, "numerical zero modes equal harmonic-field counts"},
      {"solver_agreement", agree_ok, "secular and FEM agree within agreement_tol"}};
  write_report(ctx, "spectrum", {{"spectra", summary}}, checks);
  print_checks(checks);
  return all_pass(checks) ? 0 : 1;
}

int cmd_sweep(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SweepReport rep = sweep_epsilon(cfg.sweep());
  CsvTable t({"epsilon", "p", "k", "lambda_eps", "lambda_m1", "abs_err", "rel_err", "bord_ratio",
              "mcgowan", "zero_count"});
  json rows = json::array();
  for (const auto& r : rep.rows) {
    t.row() << r.eps << r.p << r.k << r.lambda_eps << r.lambda_m1 << r.abs_err << r.rel_err
            << r.bord_ratio << r.mcgowan << r.zero_count;
    rows.push_back({r.eps, r.p, r.k, r.lambda_eps, r.lambda_m1, r.abs_err, r.rel_err,
                    std::isnan(r.bord_ratio) ? json(nullptr) : json(r.bord_ratio),
                    std::isnan(r.mcgowan) ? json(nullptr) : json(r.mcgowan), r.zero_count});
  }
  emit_table(ctx, "sweep", t, rows);

  json per_eps = json::array();
  for (const auto& se : rep.per_eps) {
    json m = json::array();
    for (const auto& mc : se.mcgowan)
      m.push_back({{"p", mc.p}, {"mu_p_U1", mc.mu_p_u1}, {"mu_p_U2", mc.mu_p_u2},
                   {"mu_pm1_U12", mc.mu_pm1_u12}, {"c_rho", mc.c_rho}, {"omega", mc.omega},
                   {"lambda0", mc.lambda0}});
    per_eps.push_back({{"epsilon", se.eps},
                       {"zero_counts", se.zero_counts},
                       {"min_positive_degrees_1_to_n", se.min_positive},
                       {"mcgowan", m},
                       {"volume", se.volume},
                       {"failures", se.failures}});
  }
  json diags = json::array();
  for (const auto& r : rep.rows)
    if (r.diag.available)
      diags.push_back({{"epsilon", r.eps}, {"p", r.p}, {"k", r.k},
                       {"pi_minus_sq", r.diag.pi_minus_sq}, {"ratio", r.diag.ratio},
                       {"cutoff_mass", r.diag.cutoff_mass},
                       {"cutoff_energy", r.diag.cutoff_energy},
                       {"energy_bound", r.diag.energy_bound}, {"pairing", r.diag.pairing}});
  double max_ratio = 0.0;
  for (const auto& r : rep.rows)
    if (!std::isnan(r.bord_ratio)) max_ratio = std::max(max_ratio, r.bord_ratio);
  write_report(ctx, "sweep",
               {{"per_epsilon", per_eps},
                {"diagnostics", diags},
                {"max_bord_ratio", max_ratio},
                {"m1_zero_counts", rep.m1_zero_counts},
                {"expected_zero_counts", rep.expected_zero_counts},
                {"m1_min_positive", rep.m1_min_positive},
                {"m1_volume", rep.m1_volume}},
               rep.checks);

  if (cfg.output.svg) {
    fs::create_directories(ctx.out / "plots");
    for (int p : cfg.degrees) {
      std::vector<Series> series;
      for (int k = 1; k <= cfg.K; ++k) {
        Series s{"k=" + std::to_string(k), {}, {}};
        for (const auto& r : rep.rows)
          if (r.p == p && r.k == k) {
            s.x.push_back(r.eps);
            s.y.push_back(r.abs_err);
          }
        series.push_back(s);
      }
      write_text((ctx.out / "plots" / ("sweep_error_p" + std::to_string(p) + ".svg")).string(),
                 svg_loglog("|lambda_k(M_eps) - lambda_k(M1)|, p = " + std::to_string(p), "eps",
                            "error", series));
    }
  }
  print_checks(rep.checks);
  return rep.all_pass() ? 0 : 1;
}

int cmd_aps_kernel(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Profile m2 = build_profile(cfg.m2);
  const KernelReport rep = aps_kernel(ApsProblem{m2, cfg.n, cfg.mu_sq_max, cfg.solver().provider});
  // closed model of M2: fill the boundary with a cone tip
  Profile closed = m2;
  closed.segments.front().r_lo = 0.0;
  closed.start = Endpoint::tip();
  const auto betti = betti_numbers(closed, cfg.n, cfg.solver());
  json blocks = json::array();
  for (const auto& b : rep.blocks)
    if (b.dimension > 0 || b.near_singular)
      blocks.push_back({{"block", b.block}, {"dimension", b.dimension}, {"by_degree", b.by_degree},
                        {"multiplicity", b.multiplicity}, {"near_singular", b.near_singular},
                        {"gammas", b.gammas}});
  json l2 = json::array();
  bool l2_ok = true;
  for (const auto& b : rep.blocks)
    for (double g : b.gammas) {
      const bool rule = l2_extension_rule(g);
      l2_ok = l2_ok && rule == (g > 0.5);
    }
  json dims = json::array();
  bool coho_ok = true;
  std::string detail;
  for (int p = 0; p <= cfg.n + 1; ++p) {
    dims.push_back({{"p", p}, {"dimension", rep.dimension_by_degree[p]},
                    {"betti_closed_m2", betti[p]},
                    {"in_cohomology_range", rep.in_cohomology_range(p)}});
    if (rep.in_cohomology_range(p) && rep.dimension_by_degree[p] != betti[p]) {
      coho_ok = false;
      detail += " p=" + std::to_string(p);
    }
  }
  json doc = {{"version", kVersion},
              {"config_hash", ctx.hash},
              {"profile", m2.id},
              {"rank_tolerance", rep.rank_tolerance},
              {"near_singular", rep.near_singular},
              {"dimension_by_degree", dims},
              {"kernel_blocks", blocks},
              {"blocks_examined", rep.blocks.size()}};
  write_text((ctx.out / "aps_kernel.json").string(), doc.dump(2) + "\n");
  std::vector<Check> checks = {
      {"kernel_matches_cohomology", coho_ok,
       detail.empty() ? "dim Ker = b_p(M2) for 1 <= p <= n" : "mismatch at" + detail},
      {"l2_extension_rule", l2_ok, "harmonic fields extend in L2 iff gamma > 1/2"},
      {"rank_decisions_clear", !rep.near_singular, "no singular value in the ambiguous band"}};
  write_report(ctx, "aps-kernel", {{"aps_kernel", doc}}, checks);
  print_checks(checks);
  return all_pass(checks) ? 0 : 1;
}

int cmd_mcgowan(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SweepConfig sc = cfg.sweep();
  const SolverOptions opt = cfg.solver();
  CsvTable t({"epsilon", "p", "mu_p_U1", "mu_p_U2", "mu_pm1_U12", "c_rho", "omega", "lambda0",
              "min_positive"});
  json rows = json::array();
  bool ok = true;
  for (double eps : cfg.epsilons) {
    const Profile meps = connected_sum_profile(sc.m1, sc.m2, eps);
    double min_pos = INFINITY;
    for (int p = 1; p <= cfg.n; ++p) {
      const auto s = assemble_spectrum(meps, cfg.n, p, cfg.lambda_max, opt);
      if (s.positive(1)) min_pos = std::min(min_pos, *s.positive(1));
    }
    for (int p = 2; p <= cfg.n; ++p) {
      const auto m = mcgowan_from_cover(meps, eps, cfg.n, p, opt, cfg.omega, cfg.c_rho);
      t.row() << eps << p << m.mu_p_u1 << m.mu_p_u2 << m.mu_pm1_u12 << m.c_rho << m.omega
              << m.lambda0 << min_pos;
      rows.push_back({eps, p, m.mu_p_u1, m.mu_p_u2, m.mu_pm1_u12, m.c_rho, m.omega, m.lambda0,
                      min_pos});
      ok = ok && m.lambda0 > 0.0 && m.lambda0 <= min_pos;
    }
  }
  emit_table(ctx, "mcgowan", t, rows);
  std::vector<Check> checks = {
      {"mcgowan_below_gap", ok, "0 < lambda0 <= min positive eigenvalue (degrees 1..n)"}};
  write_report(ctx, "mcgowan", {{"rows", rows}}, checks);
  print_checks(checks);
  return all_pass(checks) ? 0 : 1;
}

void error_record(const std::string& code, const std::string& msg) {
  std::cerr << json{{"error", {{"code", code}, {"message", msg}}}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hodge Laplacian spectra on collapsing conical connected sums"};
  app.require_subcommand(1);
  Flags flags;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON run configuration");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--format", flags.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--svg", flags.svg, "emit SVG plots");
    sub->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.seed, "seed for randomized property checks");
  };
  std::map<std::string, std::function<int(const Context&)>> handlers = {
      {"modes", cmd_modes},   {"spectrum", cmd_spectrum},     {"sweep", cmd_sweep},
      {"aps-kernel", cmd_aps_kernel}, {"mcgowan", cmd_mcgowan}};
  const char* help[][2] = {{"modes", "sphere modes and gamma channels"},
                           {"spectrum", "p-form spectra of M1 and M_eps"},
                           {"sweep", "collapsing sweep with property checks"},
                           {"aps-kernel", "kernel of the limit problem on M2(1)"},
                           {"mcgowan", "McGowan lower bound per eps"}};
  for (auto& h : help) common(app.add_subcommand(h[0], h[1]));

  double lambda = 0.0, eta = 0.0;
  int n = 2, p = 0;
  auto* dz = app.add_subcommand("dodziuk", "eigenvalue interval under metric pinching");
  dz->add_option("--lambda", lambda, "eigenvalue")->required();
  dz->add_option("--eta", eta, "pinching exponent")->required();
  dz->add_option("--n", n, "sphere dimension");
  dz->add_option("--p", p, "form degree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (dz->parsed()) {
      const auto [lo, hi] = dodziuk_interval(lambda, eta, n, p);
      std::printf("[%s, %s]\n", fmt_num(lo).c_str(), fmt_num(hi).c_str());
      return 0;
    }
    for (auto* sub : app.get_subcommands()) {
      const Context ctx = make_context(flags);
      return handlers.at(sub->get_name())(ctx);
    }
  } catch (const Error& e) {
    error_record(to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    error_record("internal", e.what());
    return 2;
  }
  return 2;
}
