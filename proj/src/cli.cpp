#include "kincouple/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kincouple/errors.hpp"
#include "kincouple/morse.hpp"
#include "kincouple/normal_modes.hpp"
#include "kincouple/propagator.hpp"
#include "kincouple/verify.hpp"

namespace kincouple::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
  SystemParams params{1.0, 1.0, 0.0, 25.0, 1.0, 1.0, 0.0, 1.0};
  double K = 0.0;
  double l = 1.0;
  double g = 1.0;
  std::string output = "-";
  std::string format = "json";

  // morse-wavefunction
  int n = 0;
  double k = 0.0;
  double x_min = std::nan("");
  double x_max = std::nan("");
  int points = 201;

  // morse-green
  double energy = std::nan("");
  double x1 = 0.0;
  double x2 = 0.5;
  int scan_points = 200;

  // pendulum-kernel
  std::vector<double> phi1{0.0, 0.0};
  std::vector<double> phi2{0.0, 0.0};
  double T = 0.5;
  std::string regime = "imaginary";

  // pendulum-spectrum
  int levels = 10;

  // verify
  std::string system = "all";
  unsigned seed = 1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

ordered_json morse_config(const Options& o) {
  const auto& p = o.params;
  return ordered_json{{"m1", p.m1},   {"m2", p.m2},     {"kappa", p.kappa}, {"lambda", p.lambda},
                      {"alpha", p.alpha}, {"beta", p.beta}, {"r0", p.r0},   {"hbar", p.hbar},
                      {"K", o.K}};
}

ordered_json pendulum_config(const Options& o) {
  return ordered_json{{"m1", o.params.m1}, {"m2", o.params.m2}, {"l", o.l}, {"g", o.g}, {"hbar", o.params.hbar}};
}

ordered_json envelope(const std::string& command, ordered_json config, ordered_json results, double hbar) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  j["units"] = "natural, hbar=" + num(hbar);
  j["results"] = std::move(results);
  return j;
}

void require_csv_or_json(const Options& o) {
  if (o.format != "json" && o.format != "csv") throw UsageError("--format must be json or csv");
}

modes::NormalModeBasis pendulum_basis(const Options& o) {
  return modes::generalized_modes(modes::pendulum_matrices(o.params.m1, o.params.m2, o.l, o.g));
}

void check_hbar(const Options& o) {
  if (!(o.params.hbar > 0.0) || !std::isfinite(o.params.hbar)) throw InvalidParameters("invalid parameters: hbar > 0");
}

int cmd_morse_spectrum(const Options& o, std::ostream& out) {
  validate(o.params);
  const auto sol = morse::build(o.params, o.K);
  const double com = morse::com_energy(sol);
  ordered_json levels = ordered_json::array();
  for (int n = 0; n < sol.n_bound; ++n) {
    levels.push_back({{"n", n}, {"E_rel", morse::bound_energy_relative(sol, n)}, {"E_total", morse::bound_energy(sol, n)}});
  }
  if (o.format == "csv") {
    out << "n,E_rel,E_total\n";
    for (const auto& l : levels) out << l["n"].get<int>() << ',' << num(l["E_rel"]) << ',' << num(l["E_total"]) << '\n';
    return kExitOk;
  }
  ordered_json res;
  res["xi"] = sol.xi;
  res["n_bound"] = sol.n_bound;
  res["d"] = sol.coeffs.d;
  res["com_energy"] = com;
  res["threshold"] = morse::threshold_energy(sol);
  res["levels"] = levels;
  out << envelope("morse-spectrum", morse_config(o), res, o.params.hbar).dump(2) << '\n';
  return kExitOk;
}

int cmd_morse_wavefunction(const Options& o, std::ostream& out) {
  validate(o.params);
  const auto sol = morse::build(o.params, o.K);
  if (o.points < 2) throw UsageError("--points must be at least 2");
  const auto prob = morse::relative_problem(o.params);
  const double lo = std::isnan(o.x_min) ? prob.x_lo : o.x_min;
  const double hi = std::isnan(o.x_max) ? morse::well_minimum(o.params) + 15.0 / o.params.beta : o.x_max;
  if (!(hi > lo)) throw UsageError("--x-max must exceed --x-min");

  std::function<double(double)> psi;
  ordered_json state;
  if (o.k > 0.0) {
    const auto c = morse::continuum_wavefunction(sol, o.k);
    psi = c;
    state = {{"kind", "continuum"}, {"k", o.k}, {"E_total", c.energy()}};
  } else {
    const auto b = morse::bound_wavefunction(sol, o.n);
    psi = b;
    state = {{"kind", "bound"}, {"n", o.n}, {"E_rel", b.energy_relative()}, {"E_total", b.energy()}};
  }
  std::vector<double> xs(o.points), ps(o.points), vs(o.points);
  for (int i = 0; i < o.points; ++i) {
    xs[i] = lo + (hi - lo) * i / (o.points - 1);
    ps[i] = psi(xs[i]);
    vs[i] = morse::potential(o.params, xs[i]);
  }
  if (o.format == "csv") {
    out << "x,psi,V(x)\n";
    for (int i = 0; i < o.points; ++i) out << num(xs[i]) << ',' << num(ps[i]) << ',' << num(vs[i]) << '\n';
    return kExitOk;
  }
  ordered_json samples = ordered_json::array();
  for (int i = 0; i < o.points; ++i) samples.push_back({{"x", xs[i]}, {"psi", ps[i]}, {"V", vs[i]}});
  ordered_json cfg = morse_config(o);
  cfg["x_min"] = lo;
  cfg["x_max"] = hi;
  cfg["points"] = o.points;
  out << envelope("morse-wavefunction", cfg, {{"state", state}, {"samples", samples}}, o.params.hbar).dump(2) << '\n';
  return kExitOk;
}

int cmd_morse_green(const Options& o, std::ostream& out) {
  validate(o.params);
  const auto sol = morse::build(o.params, o.K);
  std::vector<double> energies;
  if (!std::isnan(o.energy)) {
    energies.push_back(o.energy);
  } else {
    if (o.scan_points < 2) throw UsageError("--scan-points must be at least 2");
    const double lo = morse::com_energy(sol);
    const double hi = morse::threshold_energy(sol);
    for (int i = 0; i < o.scan_points; ++i) energies.push_back(lo + (hi - lo) * (i + 0.5) / o.scan_points);
  }
  struct Row {
    double E;
    double inv;
    double G;
    bool pole;
  };
  std::vector<Row> rows;
  for (double E : energies) {
    Row r{E, morse::inverse_green_function(sol, E, o.x1, o.x2), 0.0, false};
    try {
      r.G = morse::green_function(sol, E, o.x1, o.x2);
    } catch (const PoleError&) {
      r.pole = true;
    }
    rows.push_back(r);
  }
  if (o.format == "csv") {
    out << "E,G,inverse_G\n";
    for (const auto& r : rows) out << num(r.E) << ',' << (r.pole ? std::string("inf") : num(r.G)) << ',' << num(r.inv) << '\n';
    return kExitOk;
  }
  ordered_json pts = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json row{{"E", r.E}};
    row["G"] = r.pole ? ordered_json(nullptr) : ordered_json(r.G);
    row["inverse_G"] = r.inv;
    pts.push_back(row);
  }
  ordered_json poles = ordered_json::array();
  for (int n = 0; n < sol.n_bound; ++n) poles.push_back(morse::bound_energy(sol, n));
  ordered_json cfg = morse_config(o);
  cfg["x1"] = o.x1;
  cfg["x2"] = o.x2;
  out << envelope("morse-green", cfg, {{"poles", poles}, {"points", pts}}, o.params.hbar).dump(2) << '\n';
  return kExitOk;
}

int cmd_pendulum_modes(const Options& o, std::ostream& out) {
  const auto basis = pendulum_basis(o);
  const auto expl = modes::pendulum_omega2_explicit(o.params.m1, o.params.m2, o.l, o.g);
  if (o.format == "csv") {
    out << "k,omega2,omega,C_k1,C_k2\n";
    for (int k = 0; k < basis.n(); ++k) {
      out << k << ',' << num(basis.omega2(k)) << ',' << num(std::sqrt(basis.omega2(k))) << ',' << num(basis.C(k, 0))
          << ',' << num(basis.C(k, 1)) << '\n';
    }
    return kExitOk;
  }
  ordered_json res;
  ordered_json w2 = ordered_json::array(), w = ordered_json::array(), C = ordered_json::array();
  for (int k = 0; k < basis.n(); ++k) {
    w2.push_back(basis.omega2(k));
    w.push_back(std::sqrt(basis.omega2(k)));
    C.push_back({basis.C(k, 0), basis.C(k, 1)});
  }
  res["omega2"] = w2;
  res["omega"] = w;
  res["omega2_closed_form"] = {expl(0), expl(1)};
  res["C"] = C;
  res["det_C"] = basis.det_C;
  out << envelope("pendulum-modes", pendulum_config(o), res, o.params.hbar).dump(2) << '\n';
  return kExitOk;
}

int cmd_pendulum_kernel(const Options& o, std::ostream& out) {
  check_hbar(o);
  const auto basis = pendulum_basis(o);
  propagator::Regime regime;
  if (o.regime == "imaginary") {
    regime = propagator::Regime::ImaginaryTime;
  } else if (o.regime == "real") {
    regime = propagator::Regime::RealTime;
  } else {
    throw UsageError("--regime must be real or imaginary");
  }
  modes::Vector p1(2), p2(2);
  p1 << o.phi1[0], o.phi1[1];
  p2 << o.phi2[0], o.phi2[1];
  const auto kv = propagator::coupled_kernel(basis, p1, p2, o.T, o.params.hbar, regime);
  if (o.format == "csv") {
    out << "re,im,abs\n" << num(kv.amplitude.real()) << ',' << num(kv.amplitude.imag()) << ','
        << num(std::abs(kv.amplitude)) << '\n';
    return kExitOk;
  }
  ordered_json res;
  res["amplitude"] = {{"re", kv.amplitude.real()}, {"im", kv.amplitude.imag()}};
  res["abs"] = std::abs(kv.amplitude);
  if (regime == propagator::Regime::RealTime) {
    res["classical_action"] = propagator::classical_action(basis, p1, p2, o.T);
    res["mvh_determinant"] = propagator::mvh_determinant(basis, o.T);
  }
  ordered_json cfg = pendulum_config(o);
  cfg["phi1"] = o.phi1;
  cfg["phi2"] = o.phi2;
  cfg["T"] = o.T;
  cfg["regime"] = o.regime;
  out << envelope("pendulum-kernel", cfg, res, o.params.hbar).dump(2) << '\n';
  return kExitOk;
}

int cmd_pendulum_spectrum(const Options& o, std::ostream& out) {
  check_hbar(o);
  if (o.levels < 1) throw UsageError("--levels must be at least 1");
  const auto basis = pendulum_basis(o);
  struct Level {
    int n1, n2;
    double E;
  };
  std::vector<Level> all;
  for (int n1 = 0; n1 < o.levels; ++n1) {
    for (int n2 = 0; n2 < o.levels; ++n2) all.push_back({n1, n2, propagator::energy_level(basis, n1, n2, o.params.hbar)});
  }
  std::stable_sort(all.begin(), all.end(), [](const Level& a, const Level& b) { return a.E < b.E; });
  all.resize(o.levels);
  if (o.format == "csv") {
    out << "n1,n2,E\n";
    for (const auto& l : all) out << l.n1 << ',' << l.n2 << ',' << num(l.E) << '\n';
    return kExitOk;
  }
  ordered_json levels = ordered_json::array();
  for (const auto& l : all) levels.push_back({{"n1", l.n1}, {"n2", l.n2}, {"E", l.E}});
  ordered_json cfg = pendulum_config(o);
  cfg["levels"] = o.levels;
  out << envelope("pendulum-spectrum", cfg, {{"omega2", {basis.omega2(0), basis.omega2(1)}}, {"levels", levels}},
                  o.params.hbar)
                 .dump(2)
      << '\n';
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  if (o.system != "all" && o.system != "morse" && o.system != "pendulum") {
    throw UsageError("--system must be morse, pendulum or all");
  }
  std::vector<verify::Check> checks;
  if (o.system != "pendulum") {
    auto c = verify::verify_morse(o.params, o.seed);
    checks.insert(checks.end(), c.begin(), c.end());
  }
  if (o.system != "morse") {
    check_hbar(o);
    auto c = verify::verify_pendulum({o.params.m1, o.params.m2, o.l, o.g, o.params.hbar}, o.seed);
    checks.insert(checks.end(), c.begin(), c.end());
  }
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const verify::Check& c) { return c.pass; });
  if (o.format == "json") {
    ordered_json arr = ordered_json::array();
    for (const auto& c : checks) {
      arr.push_back({{"name", c.name},
                     {"error", std::isfinite(c.error) ? ordered_json(c.error) : ordered_json(nullptr)},
                     {"tolerance", c.tolerance},
                     {"pass", c.pass},
                     {"detail", c.detail}});
    }
    ordered_json cfg = morse_config(o);
    cfg["l"] = o.l;
    cfg["g"] = o.g;
    cfg["system"] = o.system;
    cfg["seed"] = o.seed;
    out << envelope("verify", cfg, {{"checks", arr}, {"all_pass", ok}}, o.params.hbar).dump(2) << '\n';
  } else {
    out << std::left << std::setw(50) << "check" << std::setw(14) << "error" << std::setw(12) << "tolerance"
        << "result  detail\n";
    for (const auto& c : checks) {
      std::ostringstream e, t;
      e << std::setprecision(3) << std::scientific << c.error;
      t << std::setprecision(1) << std::scientific << c.tolerance;
      out << std::left << std::setw(50) << c.name << std::setw(14) << e.str() << std::setw(12) << t.str()
          << (c.pass ? "PASS    " : "FAIL    ") << c.detail << '\n';
    }
    out << (ok ? "all checks passed" : "verification FAILED") << '\n';
  }
  return ok ? kExitOk : kExitFailure;
}

void add_physics(CLI::App& app, Options& o) {
  auto& p = o.params;
  app.add_option("--m1", p.m1, "mass of particle / bob 1 [mass]")->capture_default_str();
  app.add_option("--m2", p.m2, "mass of particle / bob 2 [mass]")->capture_default_str();
  app.add_option("--kappa", p.kappa, "kinetic coupling kappa [1/mass]")->capture_default_str();
  app.add_option("--lambda", p.lambda, "Morse well depth [energy]")->capture_default_str();
  app.add_option("--alpha", p.alpha, "Morse shape parameter alpha [dimensionless]")->capture_default_str();
  app.add_option("--beta", p.beta, "Morse inverse range beta [1/length]")->capture_default_str();
  app.add_option("--r0", p.r0, "equilibrium separation r0 [length]")->capture_default_str();
  app.add_option("--hbar", p.hbar, "Planck constant [action]")->capture_default_str();
  app.add_option("--K", o.K, "centre-of-mass wavenumber [1/length]")->capture_default_str();
  app.add_option("--l", o.l, "pendulum length [length]")->capture_default_str();
  app.add_option("--g", o.g, "gravitational acceleration [length/time^2]")->capture_default_str();
  app.add_option("--output,-o", o.output, "output path, - for standard output")->capture_default_str();
  app.add_option("--format", o.format, "json or csv (verify: json or table)")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Momentum-coupled Morse pair and harmonic double pendulum: spectra, wavefunctions, "
               "Green functions, propagators and oracle checks.",
               "kincouple"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "flat key=value file; command-line flags override it");
  app.allow_config_extras(false);
  add_physics(app, o);

  auto* spectrum = app.add_subcommand("morse-spectrum", "bound levels of the Morse pair. CSV columns: n,E_rel,E_total");
  auto* wave = app.add_subcommand("morse-wavefunction", "bound or continuum wavefunction on a grid. CSV columns: x,psi,V(x)");
  wave->add_option("--n", o.n, "bound-state index")->capture_default_str();
  wave->add_option("--k", o.k, "continuum index k > 0 (overrides --n) [dimensionless]");
  wave->add_option("--x-min", o.x_min, "first sample [length]");
  wave->add_option("--x-max", o.x_max, "last sample [length]");
  wave->add_option("--points", o.points, "number of samples")->capture_default_str();
  auto* green = app.add_subcommand("morse-green", "energy Green function below threshold. CSV columns: E,G,inverse_G");
  green->add_option("--energy", o.energy, "total energy; omit to scan up to the threshold [energy]");
  green->add_option("--x1", o.x1, "first relative coordinate [length]")->capture_default_str();
  green->add_option("--x2", o.x2, "second relative coordinate [length]")->capture_default_str();
  green->add_option("--scan-points", o.scan_points, "energies in the scan")->capture_default_str();
  auto* modes_cmd = app.add_subcommand("pendulum-modes", "normal modes of the double pendulum. CSV columns: k,omega2,omega,C_k1,C_k2");
  auto* kernel = app.add_subcommand("pendulum-kernel", "coupled propagator between two angle pairs. CSV columns: re,im,abs");
  kernel->add_option("--phi1", o.phi1, "start angles phi1,phi2 [rad]")->expected(2)->delimiter(',')->capture_default_str();
  kernel->add_option("--phi2", o.phi2, "end angles phi1,phi2 [rad]")->expected(2)->delimiter(',')->capture_default_str();
  kernel->add_option("--T", o.T, "propagation time, or tau in imaginary time [time]")->capture_default_str();
  kernel->add_option("--regime", o.regime, "real or imaginary")->capture_default_str();
  auto* pspec = app.add_subcommand("pendulum-spectrum", "lowest levels E_{n1,n2}. CSV columns: n1,n2,E");
  pspec->add_option("--levels", o.levels, "number of levels")->capture_default_str();
  auto* ver = app.add_subcommand("verify", "oracle cross-checks; exits 1 if any check fails");
  ver->add_option("--system", o.system, "morse, pendulum or all")->capture_default_str();
  ver->add_option("--seed", o.seed, "seed for the randomized parameter sweeps")->capture_default_str();
  (void)modes_cmd;
  (void)spectrum;

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const bool is_verify = app.got_subcommand("verify");
  Options resolved = o;
  if (is_verify && resolved.format == "json" && app.count("--format") == 0) resolved.format = "table";

  std::ofstream file;
  std::ostream* sink = &out;
  if (resolved.output != "-") {
    file.open(resolved.output);
    if (!file) {
      err << "error: cannot open output file " << resolved.output << '\n';
      return kExitUsage;
    }
    sink = &file;
  }

  try {
    if (!is_verify) require_csv_or_json(resolved);
    if (is_verify && resolved.format != "json" && resolved.format != "table") {
      throw UsageError("verify --format must be json or table");
    }
    if (app.got_subcommand("morse-spectrum")) return cmd_morse_spectrum(resolved, *sink);
    if (app.got_subcommand("morse-wavefunction")) return cmd_morse_wavefunction(resolved, *sink);
    if (app.got_subcommand("morse-green")) return cmd_morse_green(resolved, *sink);
    if (app.got_subcommand("pendulum-modes")) return cmd_pendulum_modes(resolved, *sink);
    if (app.got_subcommand("pendulum-kernel")) return cmd_pendulum_kernel(resolved, *sink);
    if (app.got_subcommand("pendulum-spectrum")) return cmd_pendulum_spectrum(resolved, *sink);
    return cmd_verify(resolved, *sink);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidParameters& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IndexOutOfRange& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace kincouple::cli
