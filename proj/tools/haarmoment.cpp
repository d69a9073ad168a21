// Command-line front end: exact coefficient tables, Monte-Carlo comparison,
// inequality scans, concentration experiments, and a reproducible self-test.
//
// Exit codes: 0 success, 2 configuration error, 3 statistical acceptance
// failure (|z| > 5), 4 internal consistency failure.
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "haarmoment/closedforms.hpp"
#include "haarmoment/montecarlo.hpp"

using json = nlohmann::ordered_json;
using namespace haarmoment;
using functionals::Observable;
using sampling::SeededStream;
using twirl::Spectrum;

namespace {

constexpr const char* kVersion = "1.0.0";

constexpr int kExitConfig = 2;
constexpr int kExitStatistical = 3;
constexpr int kExitInternal = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string d_spec = "2";
  long long n = 100000;
  std::uint64_t seed = 12345;
  bool seed_from_flag = false;
  int threads = 0;  // 0: hardware concurrency
  std::string pair = "seeded:0";
  std::string spectrum = "seeded:1";
  std::string ensemble = "iso";
  std::string format = "json";
  std::string out;
  bool sweep = false;
};

int effective_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 4 : static_cast<int>(hw);
}

void apply_seed_env(RunConfig& cfg) {
  if (cfg.seed_from_flag) return;
  if (const char* env = std::getenv("HAARMOMENT_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("HAARMOMENT_SEED is not an unsigned integer: " +
                        std::string(env));
    }
  }
}

// --d accepts either a single dimension ("4") or a range ("2..6").
std::vector<int> parse_dims(const RunConfig& cfg) {
  const auto dots = cfg.d_spec.find("..");
  auto to_int = [](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != s.size())
      throw ConfigError("invalid dimension: '" + s + "'");
    return v;
  };
  std::vector<int> dims;
  if (dots == std::string::npos) {
    dims.push_back(to_int(cfg.d_spec));
  } else {
    const int lo = to_int(cfg.d_spec.substr(0, dots));
    const int hi = to_int(cfg.d_spec.substr(dots + 2));
    if (lo > hi) throw ConfigError("empty dimension range: " + cfg.d_spec);
    for (int d = lo; d <= hi; ++d) dims.push_back(d);
  }
  if (dims.size() > 1 && !cfg.sweep)
    throw ConfigError("a dimension range requires --sweep");
  for (int d : dims)
    if (d < 2 || d > 64)
      throw ConfigError("dimension out of range [2, 64]: " +
                        std::to_string(d));
  return dims;
}

Observable load_observable_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open observable file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("bad JSON in " + path + ": " + e.what());
  }
  if (!j.contains("d") || !j.contains("re"))
    throw ConfigError(path + ": expected fields d, re (and optional im)");
  const int d = j["d"].get<int>();
  if (d < 1) throw ConfigError(path + ": d must be positive");
  Eigen::MatrixXcd m(d, d);
  const auto& re = j["re"];
  const json im = j.value("im", json::array());
  if (static_cast<int>(re.size()) != d)
    throw ConfigError(path + ": re must be a " + std::to_string(d) + "x" +
                      std::to_string(d) + " array");
  for (int r = 0; r < d; ++r) {
    if (static_cast<int>(re[r].size()) != d)
      throw ConfigError(path + ": ragged re rows");
    for (int c = 0; c < d; ++c) {
      double x = re[r][c].get<double>();
      double y = 0.0;
      if (!im.empty()) {
        if (static_cast<int>(im.size()) != d ||
            static_cast<int>(im[r].size()) != d)
          throw ConfigError(path + ": im must match re in shape");
        y = im[r][c].get<double>();
      }
      m(r, c) = {x, y};
    }
  }
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw ConfigError(path + ": matrix is not Hermitian (tolerance 1e-10)");
  return Observable((m + m.adjoint()) / 2.0);
}

// Pair sources: pauli-xy|xz|yz (d=2), gellmann-IJ with I,J in 1..8 (d=3),
// seeded:K (random Hermitian pair at the requested d), file:A.json,B.json.
std::pair<Observable, Observable> parse_pair(const RunConfig& cfg, int d) {
  const std::string& p = cfg.pair;
  auto pauli_index = [](char c) {
    switch (c) {
      case 'x': return 0;
      case 'y': return 1;
      case 'z': return 2;
      default: throw ConfigError("unknown Pauli axis");
    }
  };
  if (p.rfind("pauli-", 0) == 0) {
    if (p.size() != 8) throw ConfigError("expected pauli-<a><b>, e.g. pauli-xy");
    if (d != 2) throw ConfigError("pauli pairs require --d 2");
    return {Observable::pauli(pauli_index(p[6])),
            Observable::pauli(pauli_index(p[7]))};
  }
  if (p.rfind("gellmann-", 0) == 0) {
    if (p.size() != 11 || !std::isdigit(p[9]) || !std::isdigit(p[10]))
      throw ConfigError("expected gellmann-<i><j> with i, j in 1..8");
    if (d != 3) throw ConfigError("gellmann pairs require --d 3");
    const int i = p[9] - '0', j = p[10] - '0';
    if (i < 1 || i > 8 || j < 1 || j > 8)
      throw ConfigError("gellmann indices must lie in 1..8");
    return {Observable::gell_mann(i), Observable::gell_mann(j)};
  }
  if (p.rfind("seeded:", 0) == 0) {
    std::uint64_t k = 0;
    try {
      k = std::stoull(p.substr(7));
    } catch (const std::exception&) {
      throw ConfigError("expected seeded:<integer>");
    }
    SeededStream s(cfg.seed, 0xA000 + 2 * k);
    auto A = sampling::random_hermitian(d, s);
    auto B = sampling::random_hermitian(d, s);
    return {std::move(A), std::move(B)};
  }
  if (p.rfind("file:", 0) == 0) {
    const std::string rest = p.substr(5);
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw ConfigError("expected file:<pathA>,<pathB>");
    auto A = load_observable_file(rest.substr(0, comma));
    auto B = load_observable_file(rest.substr(comma + 1));
    if (A.d() != d || B.d() != d)
      throw ConfigError("observable files have dimension " +
                        std::to_string(A.d()) + "/" + std::to_string(B.d()) +
                        " but --d is " + std::to_string(d));
    return {std::move(A), std::move(B)};
  }
  throw ConfigError("unknown pair source: " + p);
}

// Spectrum sources: uniform, pure, seeded:K, file:path (JSON array).
Spectrum parse_spectrum(const RunConfig& cfg, int d) {
  const std::string& sp = cfg.spectrum;
  if (sp == "uniform") return Spectrum::uniform(d);
  if (sp == "pure") return Spectrum::pure(d);
  if (sp.rfind("seeded:", 0) == 0) {
    std::uint64_t k = 0;
    try {
      k = std::stoull(sp.substr(7));
    } catch (const std::exception&) {
      throw ConfigError("expected seeded:<integer>");
    }
    SeededStream s(cfg.seed, 0xB000 + k);
    return sampling::random_spectrum(d, s);
  }
  if (sp.rfind("file:", 0) == 0) {
    const std::string path = sp.substr(5);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spectrum file: " + path);
    json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError("bad JSON in " + path + ": " + e.what());
    }
    if (!j.is_array() || static_cast<int>(j.size()) != d)
      throw ConfigError(path + ": expected an array of " + std::to_string(d) +
                        " eigenvalues");
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = j[i].get<double>();
    try {
      return Spectrum(v);
    } catch (const std::exception& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  throw ConfigError("unknown spectrum source: " + sp);
}

json config_json(const RunConfig& cfg) {
  return json{{"command", cfg.command}, {"d", cfg.d_spec},
              {"n", cfg.n},             {"seed", cfg.seed},
              {"threads", effective_threads(cfg)},
              {"pair", cfg.pair},       {"spectrum", cfg.spectrum},
              {"ensemble", cfg.ensemble},
              {"format", cfg.format},   {"sweep", cfg.sweep},
              {"version", kVersion}};
}

json coeff_json(const closedforms::CoefficientVector& v) {
  json arr = json::array();
  for (int j = 1; j <= 8; ++j) arr.push_back(v[j]);
  return arr;
}

void emit(const RunConfig& cfg, const json& report, const std::string& csv) {
  std::string text;
  if (cfg.format == "csv" && !csv.empty()) {
    text = csv;
  } else {
    text = report.dump(2);
    text += '\n';
  }
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out);
    if (!out) throw ConfigError("cannot write output file: " + cfg.out);
    out << text;
  }
}

std::string full_precision(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// exact
// ---------------------------------------------------------------------------
int cmd_exact(const RunConfig& cfg) {
  const int d = parse_dims(cfg).front();
  const auto [A, B] = parse_pair(cfg, d);
  const auto lambda = parse_spectrum(cfg, d);
  const auto omega = functionals::omega_vector(A, B);

  json report;
  report["config"] = config_json(cfg);
  json omj = json::array();
  for (int j = 1; j <= 8; ++j) omj.push_back(omega[j]);
  report["omega"] = omj;

  const auto pure = closedforms::pure_coefficients(d);
  json fam;
  fam["u"] = coeff_json(pure.u);
  fam["l"] = coeff_json(pure.l);
  fam["omega_iso"] = coeff_json(closedforms::omega_iso(lambda));
  bool beta_match = true;
  if (d <= 3) {
    const auto low = closedforms::lowdim_coefficients(d);
    fam["hs_product"] = coeff_json(low.product);
    fam["hs_bound"] = coeff_json(low.bound);
  } else {
    const auto lb = closedforms::lower_bound_coefficients(d);
    fam["omega_bar"] = coeff_json(closedforms::omega_bar(d));
    fam["beta"] = coeff_json(lb.beta);
    fam["beta_prime"] = coeff_json(lb.beta_prime);
    for (int j = 1; j <= 6; ++j)
      beta_match = beta_match && lb.beta[j] == lb.beta_prime[j];
  }
  report["families"] = fam;

  json avg;
  avg["pure_product"] = closedforms::assemble_average(pure.u, omega);
  avg["pure_bound"] = closedforms::assemble_average(pure.l, omega);
  if (d <= 3) {
    const auto low = closedforms::lowdim_coefficients(d);
    avg["hs_product"] = closedforms::assemble_average(low.product, omega);
    avg["hs_bound"] = closedforms::assemble_average(low.bound, omega);
  } else {
    avg["hs_product"] =
        closedforms::assemble_average(closedforms::omega_bar(d), omega);
    avg["hs_bound"] = closedforms::assemble_average(
        closedforms::lower_bound_coefficients(d).beta_prime, omega);
  }
  avg["iso_product"] = closedforms::assemble_average(
      closedforms::omega_iso(lambda), omega);
  report["averages"] = avg;

  report["checks"] = json{
      {"beta_prime_eq_beta_below_7", beta_match ? "pass" : "fail"},
      {"mixed_difference",
       functionals::mixed_difference(A, B, d) >= -1e-9 ? "pass" : "fail"}};
  emit(cfg, report, "");
  return beta_match ? 0 : kExitInternal;
}

// ---------------------------------------------------------------------------
// mc
// ---------------------------------------------------------------------------
int cmd_mc(const RunConfig& cfg) {
  if (cfg.n < 100) throw ConfigError("mc requires --n >= 100");
  const int d = parse_dims(cfg).front();
  const auto [A, B] = parse_pair(cfg, d);
  const auto lambda = parse_spectrum(cfg, d);
  const auto rows = montecarlo::compare_all(A, B, lambda, cfg.n, cfg.seed,
                                            effective_threads(cfg));

  json report;
  report["config"] = config_json(cfg);
  json table = json::array();
  std::ostringstream csv;
  csv << "quantity,exact,mc_mean,mc_se,z,pass\n";
  bool all_pass = true;
  for (const auto& row : rows) {
    const auto& e = row.estimate;
    const bool pass = std::abs(*e.z) <= 5.0;
    all_pass = all_pass && pass;
    table.push_back(json{{"quantity", row.quantity},
                         {"exact", *e.target},
                         {"mc_mean", e.mean},
                         {"mc_se", e.std_error},
                         {"z", *e.z},
                         {"pass", pass}});
    csv << row.quantity << ',' << full_precision(*e.target) << ','
        << full_precision(e.mean) << ',' << full_precision(e.std_error) << ','
        << full_precision(*e.z) << ',' << (pass ? "true" : "false") << '\n';
  }
  report["rows"] = table;
  report["pass"] = all_pass;
  emit(cfg, report, csv.str());
  return all_pass ? 0 : kExitStatistical;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------
int cmd_scan(const RunConfig& cfg) {
  const int d = parse_dims(cfg).front();
  SeededStream s(cfg.seed, 0xC000);

  struct Fact {
    std::string name;
    long long violations = 0;
    double worst = std::numeric_limits<double>::infinity();  // min margin
  };
  std::vector<Fact> facts{{"pure_gap"},      {"mixed_difference"},
                          {"omega1_sign"},   {"omega2_sign"},
                          {"omega4_sign"},   {"omega5_sign"},
                          {"omega7_sign"},   {"omega7_plus_omega8_sign"},
                          {"omega8_sign"},   {"omega8_ge_omega7"}};

  const auto pure = closedforms::pure_coefficients(d);
  std::array<double, 8> gap{}, mixed{};
  for (int j = 0; j < 8; ++j) gap[j] = pure.u.c[j] - pure.l.c[j];
  if (d <= 3) {
    const auto low = closedforms::lowdim_coefficients(d);
    for (int j = 0; j < 8; ++j) mixed[j] = low.product.c[j] - low.bound.c[j];
  } else {
    const auto wb = closedforms::omega_bar(d);
    const auto lb = closedforms::lower_bound_coefficients(d);
    for (int j = 0; j < 8; ++j) mixed[j] = wb.c[j] - lb.beta_prime.c[j];
  }

  auto record = [](Fact& f, double margin) {
    if (margin < -1e-9) ++f.violations;
    f.worst = std::min(f.worst, margin);
  };
  for (long long i = 0; i < cfg.n; ++i) {
    const auto A = sampling::random_hermitian(d, s);
    const auto B = sampling::random_hermitian(d, s);
    const auto o = functionals::omega_vector(A, B);
    double g = 0.0, m = 0.0;
    for (int j = 1; j <= 8; ++j) {
      g += gap[j - 1] * o[j];
      m += mixed[j - 1] * o[j];
    }
    record(facts[0], g);
    record(facts[1], m);
    record(facts[2], o[1]);
    record(facts[3], o[2]);
    record(facts[4], o[4]);
    record(facts[5], o[5]);
    record(facts[6], o[7]);
    record(facts[7], o[7] + o[8]);
    record(facts[8], o[8]);
    record(facts[9], o[8] - o[7]);
  }

  json report;
  report["config"] = config_json(cfg);
  json table = json::array();
  std::ostringstream csv;
  csv << "fact,violations,worst_margin\n";
  for (const auto& f : facts) {
    table.push_back(json{{"fact", f.name},
                         {"violations", f.violations},
                         {"worst_margin", f.worst}});
    csv << f.name << ',' << f.violations << ',' << full_precision(f.worst)
        << '\n';
  }
  report["facts"] = table;
  emit(cfg, report, csv.str());
  return 0;  // findings are data, not failures
}

// ---------------------------------------------------------------------------
// concentration
// ---------------------------------------------------------------------------
int cmd_concentration(const RunConfig& cfg) {
  const auto dims = parse_dims(cfg);
  json report;
  report["config"] = config_json(cfg);
  json runs = json::array();
  std::ostringstream csv;
  csv << "d,ensemble,epsilon,upper_freq,lower_freq,bound,valid\n";
  for (int d : dims) {
    const auto [A, B] = parse_pair(cfg, d);
    SeededStream s(cfg.seed, 0xD000 + static_cast<std::uint64_t>(d));
    const auto eps = montecarlo::default_epsilon_grid(A, B);
    montecarlo::ConcentrationReport r;
    if (cfg.ensemble == "iso") {
      r = montecarlo::concentration_iso(parse_spectrum(cfg, d), A, B, cfg.n,
                                        eps, s);
    } else if (cfg.ensemble == "pure") {
      r = montecarlo::concentration_pure(A, B, cfg.n, eps, s);
    } else if (cfg.ensemble == "hs") {
      r = montecarlo::concentration_hs(A, B, cfg.n, eps, s);
    } else {
      throw ConfigError("unknown ensemble: " + cfg.ensemble +
                        " (expected iso, pure, or hs)");
    }
    json rows = json::array();
    for (std::size_t i = 0; i < r.epsilon.size(); ++i) {
      const bool valid = r.valid_at(i, 3.0 * r.freq_se(i));
      rows.push_back(json{{"epsilon", r.epsilon[i]},
                          {"upper_freq", r.upper_freq[i]},
                          {"lower_freq", r.lower_freq[i]},
                          {"bound", r.bound[i]},
                          {"valid", valid}});
      csv << d << ',' << r.ensemble << ',' << full_precision(r.epsilon[i])
          << ',' << full_precision(r.upper_freq[i]) << ','
          << full_precision(r.lower_freq[i]) << ','
          << full_precision(r.bound[i]) << ',' << (valid ? "true" : "false")
          << '\n';
    }
    runs.push_back(json{{"d", d},
                        {"ensemble", r.ensemble},
                        {"scale", r.scale},
                        {"mean", r.mean},
                        {"n", r.n},
                        {"two_sided_bound", r.two_sided_bound},
                        {"rows", rows}});
  }
  report["runs"] = runs;
  emit(cfg, report, csv.str());
  return 0;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------
int cmd_selftest(const RunConfig& cfg) {
  const int threads = effective_threads(cfg);
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", name.c_str());
    if (!ok) ++failures;
  };

  try {
    // Exact coefficient identities; the constructors verify their own dual
    // routes internally and throw on disagreement.
    for (int d = 2; d <= 6; ++d) {
      const auto pc = closedforms::pure_coefficients(d);
      bool consistent = true;
      for (int j = 1; j <= 8; ++j) {
        const double w = closedforms::omega_iso(Spectrum::pure(d))[j];
        consistent = consistent && std::abs(w - pc.u[j]) <= 1e-12;
      }
      check("omega_iso(pure) = u at d=" + std::to_string(d), consistent);
      if (d >= 4) {
        (void)closedforms::omega_bar(d);
        (void)closedforms::lower_bound_coefficients(d);
        check("dual-route HS coefficients at d=" + std::to_string(d), true);
      } else {
        (void)closedforms::lowdim_coefficients(d);
        check("low-dimension table at d=" + std::to_string(d), true);
      }
    }

    // Pauli exact value.
    const auto pauli = functionals::omega_vector(Observable::pauli(0),
                                                 Observable::pauli(1));
    const auto p2 = closedforms::pure_coefficients(2);
    check("Pauli pure product average = 2/5",
          std::abs(closedforms::assemble_average(p2.u, pauli) - 0.4) < 1e-14);

    // Projector algebra (small sizes).
    for (int k = 2; k <= 3; ++k) {
      for (int d = 2; d <= 4; ++d) {
        const auto set = symgroup::central_projectors(k, d);
        const long side = symgroup::tensor_side(d, k);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(side, side);
        double worst = 0.0;
        for (const auto& [la, C] : set.projectors) {
          sum += C;
          worst = std::max(worst, (C * C - C).norm());
        }
        worst = std::max(
            worst, (sum - Eigen::MatrixXd::Identity(side, side)).norm());
        check("projector algebra k=" + std::to_string(k) +
                  " d=" + std::to_string(d),
              worst <= 1e-10);
      }
    }

    // Deterministic estimates: printed at full precision so independent
    // runs can be compared bit-for-bit, and recomputed single-threaded.
    const auto rows = montecarlo::compare_all(
        Observable::pauli(0), Observable::pauli(1), Spectrum::pure(2), 20000,
        cfg.seed, threads);
    const auto rows1 = montecarlo::compare_all(
        Observable::pauli(0), Observable::pauli(1), Spectrum::pure(2), 20000,
        cfg.seed, 1);
    bool deterministic = true;
    bool statistical = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::printf("estimate %s mean=%s\n", rows[i].quantity.c_str(),
                  full_precision(rows[i].estimate.mean).c_str());
      deterministic =
          deterministic && rows[i].estimate.mean == rows1[i].estimate.mean;
      statistical = statistical && std::abs(*rows[i].estimate.z) <= 5.0;
    }
    check("estimates independent of worker count", deterministic);
    check("estimates within 5 standard errors", statistical);
    if (!statistical) return kExitStatistical;
  } catch (const std::exception& e) {
    std::printf("FAIL  internal consistency: %s\n", e.what());
    return kExitInternal;
  }
  return failures == 0 ? 0 : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and Monte-Carlo ensemble averages of uncertainty "
               "products of bounded observables"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--d", cfg.d_spec,
                    "dimension, or a range like 2..6 with --sweep");
    sub->add_option("--n", cfg.n, "sample / scan count");
    sub->add_option("--seed", cfg.seed, "RNG seed (overrides HAARMOMENT_SEED)")
        ->each([&](const std::string&) { cfg.seed_from_flag = true; });
    sub->add_option("--threads", cfg.threads,
                    "worker threads (default: available cores)");
    sub->add_option("--pair", cfg.pair,
                    "pauli-xy | gellmann-12 | seeded:K | file:A.json,B.json");
    sub->add_option("--spectrum", cfg.spectrum,
                    "uniform | pure | seeded:K | file:spec.json");
    sub->add_option("--format", cfg.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "write the report to this path");
    sub->add_flag("--sweep", cfg.sweep, "sweep over a dimension range");
    return sub;
  };
  add_common(app.add_subcommand("exact", "closed-form coefficient tables"));
  add_common(app.add_subcommand("mc", "Monte-Carlo validation table"));
  add_common(app.add_subcommand("scan", "inequality scan over random pairs"));
  add_common(
      app.add_subcommand("concentration", "tail-probability experiments"))
      ->add_option("--ensemble", cfg.ensemble, "iso | pure | hs");
  add_common(app.add_subcommand("selftest", "full invariant suite"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    apply_seed_env(cfg);
    if (cfg.command == "exact") return cmd_exact(cfg);
    if (cfg.command == "mc") return cmd_mc(cfg);
    if (cfg.command == "scan") return cmd_scan(cfg);
    if (cfg.command == "concentration") return cmd_concentration(cfg);
    if (cfg.command == "selftest") return cmd_selftest(cfg);
    std::cerr << "unknown command\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal consistency failure: " << e.what() << "\n";
    return kExitInternal;
  }
}
