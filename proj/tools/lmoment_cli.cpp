// lmoment: identity checks, central values, moment tables and
// nonvanishing scans for the even primitive family mod q.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lmoment/lmoment.hpp"

namespace {

using namespace lmoment;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string modulus;
  std::string moduli;
  std::string coeff = "eisenstein:1";
  std::string format = "csv";
  std::string output;
  unsigned threads = 1;
  double tolerance_exact = 1e-9;
  double tolerance_quad = 1e-4;
  long q_max = 221;
  bool all = false;
  double threshold = 1e-4;
  bool timing = false;
};

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key=value lines, '#' comments; keys are the long flag names.
void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "modulus") cfg.modulus = value;
      else if (key == "moduli") cfg.moduli = value;
      else if (key == "coeff") cfg.coeff = value;
      else if (key == "format") cfg.format = value;
      else if (key == "output") cfg.output = value;
      else if (key == "threads") cfg.threads = static_cast<unsigned>(std::stoul(value));
      else if (key == "tolerance-exact") cfg.tolerance_exact = std::stod(value);
      else if (key == "tolerance-quad") cfg.tolerance_quad = std::stod(value);
      else if (key == "q-max") cfg.q_max = std::stol(value);
      else if (key == "all") cfg.all = parse_bool(key, value);
      else if (key == "threshold") cfg.threshold = std::stod(value);
      else if (key == "timing") cfg.timing = parse_bool(key, value);
      else throw UsageError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": bad value for '" + key + "'");
    }
  }
}

long parse_positive(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::logic_error&) {
    throw UsageError("bad " + what + " '" + s + "'");
  }
  if (pos != s.size() || v < 1) throw UsageError("bad " + what + " '" + s + "'");
  return v;
}

// "p", "q" or "q1xq2"; the product form is normalized to q1 < q2.
Modulus parse_modulus(const std::string& spec) {
  if (spec.empty()) throw UsageError("a modulus is required (--modulus)");
  try {
    const auto x = spec.find('x');
    if (x == std::string::npos) return Modulus(parse_positive(spec, "modulus"));
    const long a = parse_positive(spec.substr(0, x), "modulus");
    const long b = parse_positive(spec.substr(x + 1), "modulus");
    return Modulus::semiprime(std::min(a, b), std::max(a, b));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("unsupported modulus '") + spec + "': " + e.what());
  }
}

std::vector<Modulus> parse_moduli(const std::string& list) {
  std::vector<Modulus> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_modulus(item));
  }
  if (out.empty()) throw UsageError("--moduli is empty");
  std::sort(out.begin(), out.end(), [](const Modulus& a, const Modulus& b) { return a.value() < b.value(); });
  for (std::size_t k = 1; k < out.size(); ++k)
    if (out[k].value() == out[k - 1].value()) throw UsageError("--moduli lists q = " + std::to_string(out[k].value()) + " twice");
  return out;
}

// eisenstein:<t>, synthetic:<seed> or file:<path>; coefficients cover at
// least `needed` indices.
HeckeCoefficients load_source(const std::string& spec, std::size_t needed) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("bad --coeff '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  const std::size_t n_max = std::max<std::size_t>(needed, 200000);
  if (kind == "eisenstein") {
    double t = 0.0;
    std::size_t pos = 0;
    try {
      t = std::stod(arg, &pos);
    } catch (const std::logic_error&) {
      throw UsageError("bad spectral parameter in --coeff '" + spec + "'");
    }
    if (pos != arg.size()) throw UsageError("bad spectral parameter in --coeff '" + spec + "'");
    return HeckeCoefficients::eisenstein(SpectralParameter(t), n_max);
  }
  if (kind == "synthetic") {
    std::size_t pos = 0;
    unsigned long long seed = 0;
    try {
      seed = std::stoull(arg, &pos);
    } catch (const std::logic_error&) {
      throw UsageError("bad seed in --coeff '" + spec + "'");
    }
    if (pos != arg.size()) throw UsageError("bad seed in --coeff '" + spec + "'");
    return HeckeCoefficients::synthetic(seed, n_max);
  }
  if (kind == "file") {
    HeckeCoefficients h = [&] {
      try {
        return load_coefficients(arg);
      } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
      }
    }();
    if (h.n_max() < needed) h.extend_to(needed);
    return h;
  }
  throw UsageError("unknown coefficient source '" + kind + "'");
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void require_format(const RunConfig& cfg) {
  if (cfg.format != "csv" && cfg.format != "json") throw UsageError("--format must be csv or json");
  if (cfg.threads < 1) throw UsageError("--threads must be at least 1");
}

int run_verify(const RunConfig& cfg) {
  std::vector<VerificationReport> reports;
  if (cfg.all) {
    SuiteConfig suite;
    suite.q_max = cfg.q_max;
    suite.tolerance_exact = cfg.tolerance_exact;
    suite.tolerance_quad = cfg.tolerance_quad;
    suite.threads = cfg.threads;
    reports = run_identity_suite(suite);
  } else {
    const Modulus m = parse_modulus(cfg.modulus);
    if (!m.is_semiprime()) throw UsageError("verify needs a semiprime modulus q1xq2 (or --all)");
    const std::vector<Modulus> ms{m};
    reports.push_back(verify_orthogonality(ms, std::min(cfg.tolerance_exact, 1e-10)));
    reports.push_back(verify_B_identity(ms, 50, cfg.tolerance_exact));
    reports.push_back(verify_D_identity(ms, 50, cfg.tolerance_exact));
    reports.push_back(verify_gauss_mult(ms, cfg.tolerance_exact));
  }
  Output out(cfg.output);
  for (const auto& r : reports) out.stream() << to_json(r).dump() << '\n';
  return suite_failed(reports) ? kExitFailed : kExitOk;
}

int run_lvalue(const RunConfig& cfg) {
  const Modulus m = parse_modulus(cfg.modulus);
  const AfeOptions opts;
  const auto f = load_source(cfg.coeff, afe_truncation(m.value(), opts.margin));
  const auto records = central_values(f, m, opts, cfg.threads);
  Output out(cfg.output);
  if (cfg.format == "csv") {
    out.stream() << kCentralCsvHeader << '\n';
    for (const auto& r : records) out.stream() << central_csv_row(r) << '\n';
  } else {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : records) arr.push_back(to_json(r));
    out.stream() << arr.dump(2) << '\n';
  }
  return kExitOk;
}

int run_moment(const RunConfig& cfg) {
  const auto moduli = !cfg.moduli.empty() ? parse_moduli(cfg.moduli) : std::vector<Modulus>{parse_modulus(cfg.modulus)};
  const AfeOptions opts;
  const auto f = load_source(cfg.coeff, afe_truncation(moduli.back().value(), opts.margin));
  const auto table = moment_trend(f, moduli, 0.5, opts, cfg.threads, cfg.timing);
  Output out(cfg.output);
  if (cfg.format == "csv")
    write_moment_csv(out.stream(), table.rows);
  else
    write_moment_json(out.stream(), table.rows);
  return kExitOk;
}

int run_scan(const RunConfig& cfg) {
  const Modulus m = parse_modulus(cfg.modulus);
  if (!(cfg.threshold > 0.0)) throw UsageError("--threshold must be positive");
  const AfeOptions opts;
  const auto f = load_source(cfg.coeff, afe_truncation(m.value(), opts.margin));
  const auto hits = nonvanishing_scan(f, m, cfg.threshold, opts, cfg.threads);
  if (hits.empty())
    std::cerr << "scan: no even primitive character mod " << m.value() << " has |product| > "
              << format_number(cfg.threshold) << '\n';
  Output out(cfg.output);
  if (cfg.format == "csv") {
    out.stream() << "chi_id,magnitude\n";
    for (const auto& h : hits) out.stream() << h.chi_id << ',' << format_number(h.magnitude) << '\n';
  } else {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& h : hits) arr.push_back({{"chi_id", h.chi_id}, {"magnitude", json_number(h.magnitude)}});
    out.stream() << arr.dump(2) << '\n';
  }
  return kExitOk;
}

int run_characters(const RunConfig& cfg) {
  const Modulus m = parse_modulus(cfg.modulus);
  const auto chars = enumerate_characters(m);
  Output out(cfg.output);
  auto exponents = [](const DirichletCharacter& chi) {
    std::string s;
    for (int e : chi.exponents()) s += (s.empty() ? "" : ":") + std::to_string(e);
    return s;
  };
  if (cfg.format == "csv") {
    out.stream() << "chi_id,exponents,parity,conductor,primitive,gauss_re,gauss_im\n";
    for (std::size_t i = 0; i < chars.size(); ++i) {
      const auto& chi = chars[i];
      const cplx tau = gauss_sum(chi);
      out.stream() << i << ',' << exponents(chi) << ',' << (chi.is_even() ? "even" : "odd") << ','
                   << chi.conductor() << ',' << (chi.is_primitive() ? 1 : 0) << ',' << format_number(tau.real())
                   << ',' << format_number(tau.imag()) << '\n';
    }
  } else {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < chars.size(); ++i) {
      const auto& chi = chars[i];
      const cplx tau = gauss_sum(chi);
      arr.push_back({{"chi_id", i},
                     {"exponents", exponents(chi)},
                     {"parity", chi.is_even() ? "even" : "odd"},
                     {"conductor", chi.conductor()},
                     {"primitive", chi.is_primitive()},
                     {"gauss_re", json_number(tau.real())},
                     {"gauss_im", json_number(tau.imag())}});
    }
    out.stream() << arr.dump(2) << '\n';
  }
  return kExitOk;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--modulus", cfg.modulus, "modulus: prime p, or q1xq2");
  sub->add_option("--coeff", cfg.coeff, "coefficients: eisenstein:<t>, synthetic:<seed> or file:<path>");
  sub->add_option("--format", cfg.format, "output format: csv or json");
  sub->add_option("--output", cfg.output, "output file (default stdout)");
  sub->add_option("--threads", cfg.threads, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Twisted first moments over even primitive Dirichlet characters"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run the identity checks (JSON lines)");
  add_common(verify, cfg);
  verify->add_flag("--all", cfg.all, "run the full suite");
  verify->add_option("--q-max", cfg.q_max, "largest semiprime modulus for --all");
  verify->add_option("--tolerance-exact", cfg.tolerance_exact, "tolerance for exact identities");
  verify->add_option("--tolerance-quad", cfg.tolerance_quad, "tolerance for quadrature-based checks");

  auto* lvalue = app.add_subcommand("lvalue", "central values for every even primitive character");
  add_common(lvalue, cfg);

  auto* moment = app.add_subcommand("moment", "family sums, main terms and the S1/S2 split");
  add_common(moment, cfg);
  moment->add_option("--moduli", cfg.moduli, "comma-separated moduli");
  moment->add_flag("--timing", cfg.timing, "fill runtime_ms (otherwise 0)");

  auto* scan = app.add_subcommand("scan", "characters whose central product exceeds a threshold");
  add_common(scan, cfg);
  scan->add_option("--threshold", cfg.threshold, "magnitude threshold");

  auto* characters = app.add_subcommand("characters", "list the characters mod q");
  add_common(characters, cfg);

  try {
    if (const char* path = std::getenv("LMOMENT_CONFIG"); path && *path) apply_config_file(path, cfg);
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    require_format(cfg);
    if (verify->parsed()) return run_verify(cfg);
    if (lvalue->parsed()) return run_lvalue(cfg);
    if (moment->parsed()) return run_moment(cfg);
    if (scan->parsed()) return run_scan(cfg);
    if (characters->parsed()) return run_characters(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
