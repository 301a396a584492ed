#include "rigidlab/cli.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace rigidlab {

IntVec parse_poly_expr(const std::string& text) {
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto digits = [&](Int& value) {
    const std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) return false;
    value = Int(text.substr(start, i - start));
    return true;
  };
  IntVec coeffs;
  bool first = true;
  skip();
  if (i == text.size()) throw ParseError("empty polynomial", 0);
  while (true) {
    skip();
    if (i == text.size()) break;
    int sign = 1;
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
      skip();
    } else if (!first) {
      throw ParseError("expected '+' or '-'", i);
    }
    first = false;
    const std::size_t term_start = i;
    Int c = 1;
    bool has_coeff = digits(c);
    skip();
    if (i < text.size() && (text[i] == '.' || text[i] == '/'))
      throw ParseError("coefficients must be integers", i);
    std::size_t power = 0;
    if (i < text.size() && text[i] == '*') {
      if (!has_coeff) throw ParseError("'*' without a coefficient", i);
      ++i;
      skip();
      if (i == text.size() || text[i] != 'n') throw ParseError("expected 'n' after '*'", i);
    }
    if (i < text.size() && text[i] == 'n') {
      ++i;
      power = 1;
      skip();
      if (i < text.size() && text[i] == '^') {
        ++i;
        skip();
        Int e;
        const std::size_t at = i;
        if (!digits(e)) throw ParseError("expected an exponent", at);
        if (!e.fits_ulong_p() || e > 64) throw ParseError("exponent too large", at);
        power = e.get_ui();
      }
    } else if (!has_coeff) {
      throw ParseError("expected a term", term_start);
    }
    if (coeffs.size() <= power) coeffs.resize(power + 1, 0);
    coeffs[power] += sign * c;
  }
  while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
  return coeffs;
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::Parse, "config must be a JSON object");
  RunConfig c;
  auto count = [](const Json& v, const std::string& key) {
    if (!v.is_number_unsigned()) fail(ErrorCode::Parse, "config key \"" + key + "\" must be a nonnegative integer");
    return v.get<std::uint64_t>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "depth") c.depth = count(v, key);
    else if (key == "samples") c.samples = count(v, key);
    else if (key == "seed") c.seed = count(v, key);
    else if (key == "index_cap") c.index_cap = count(v, key);
    else if (key == "ell_cap") c.ell_cap = count(v, key);
    else if (key == "coeff_bound") c.coeff_bound = static_cast<long>(count(v, key));
    else if (key == "depth_cap") c.depth_cap = count(v, key);
    else if (key == "sample_cap") c.sample_cap = count(v, key);
    else if (key == "tol") {
      if (!v.is_number()) fail(ErrorCode::Parse, "config key \"tol\" must be a number");
      c.tol = v.get<double>();
    } else if (key == "out") {
      if (!v.is_string()) fail(ErrorCode::Parse, "config key \"out\" must be a string");
      c.out = v.get<std::string>();
    } else if (key == "format") {
      if (!v.is_string()) fail(ErrorCode::Parse, "config key \"format\" must be a string");
      c.format = v.get<std::string>();
    } else {
      fail(ErrorCode::Parse, "unknown config key \"" + key + "\"");
    }
  }
  return c;
}

void validate(const RunConfig& c) {
  if (c.index_cap == 0 || c.ell_cap == 0 || c.coeff_bound <= 0 || c.depth_cap == 0 || c.sample_cap == 0)
    fail(ErrorCode::Precondition, "caps must be positive");
  if (c.tol && !(*c.tol > 0)) fail(ErrorCode::Precondition, "tolerance must be positive");
  if (!c.format.empty() && c.format != "csv" && c.format != "json")
    fail(ErrorCode::Precondition, "format must be csv or json");
  if (c.depth > c.depth_cap)
    fail(ErrorCode::CapExceeded, "depth " + std::to_string(c.depth) + " above cap " + std::to_string(c.depth_cap));
  if (c.samples > c.sample_cap)
    fail(ErrorCode::CapExceeded, "samples " + std::to_string(c.samples) + " above cap " + std::to_string(c.sample_cap));
}

namespace {

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Parse, path + ": " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : s) {
    if (ch == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
      continue;
    }
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    cur += ch;
  }
  out.push_back(cur);
  return out;
}

unsigned long parse_count(const std::string& s) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("expected a positive integer in \"" + s + "\"", 0);
  }
  if (pos != s.size() || s.empty() || s[0] == '-') throw ParseError("expected a positive integer in \"" + s + "\"", pos);
  return v;
}

IndexSet parse_index_set(const std::string& s, std::size_t l) {
  IndexSet F;
  if (s.empty() || s == "{}" || s == "∅") return F;
  for (const auto& part : split_list(s)) {
    const unsigned long i = parse_count(part);
    if (i == 0 || i > l) fail(ErrorCode::Precondition, "index " + part + " outside 1.." + std::to_string(l));
    F.push_back(i - 1);
  }
  std::sort(F.begin(), F.end());
  F.erase(std::unique(F.begin(), F.end()), F.end());
  return F;
}

RealInterval parse_interval(const std::string& s) {
  auto parts = split_list(s);
  if (parts.size() != 2) throw ParseError("interval must be lo,hi", 0);
  auto num = [](const std::string& t) {
    if (t == "-inf") return -HUGE_VAL;
    if (t == "inf" || t == "+inf") return HUGE_VAL;
    std::istringstream in(t);
    in.imbue(std::locale::classic());
    double v;
    if (!(in >> v) || !in.eof()) throw ParseError("malformed number \"" + t + "\"", 0);
    return v;
  };
  return RealInterval{num(parts[0]), num(parts[1])};
}

// Directions with entries in [-bound, bound], first nonzero entry positive.
std::vector<IntVec> box_directions(std::size_t l, long bound) {
  std::vector<IntVec> out;
  std::vector<long> a(l, -bound);
  while (true) {
    auto nz = std::find_if(a.begin(), a.end(), [](long x) { return x != 0; });
    if (nz != a.end() && *nz > 0) {
      IntVec v;
      for (long x : a) v.emplace_back(x);
      out.push_back(std::move(v));
    }
    std::size_t i = 0;
    while (i < l && a[i] == bound) a[i++] = -bound;
    if (i == l) break;
    ++a[i];
  }
  return out;
}

// Buffers everything so a failed command leaves no partial file behind.
class Output {
 public:
  Output(std::optional<std::string> path, std::ostream& fallback) : path_(std::move(path)), fallback_(fallback) {}
  std::ostream& get() { return buf_; }
  void json(const Json& j) { buf_ << j.dump(2) << '\n'; }
  void commit() {
    if (!path_) {
      fallback_ << buf_.str();
      return;
    }
    std::ofstream f(*path_);
    if (!f || !(f << buf_.str())) fail(ErrorCode::Io, "cannot write " + *path_);
  }

 private:
  std::optional<std::string> path_;
  std::ostream& fallback_;
  std::ostringstream buf_;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot write " + path);
  f << text;
}

void check_family(const SequenceFamily& fam, const RunConfig& cfg) {
  if (fam.size() > cfg.ell_cap)
    fail(ErrorCode::CapExceeded, "family size " + std::to_string(fam.size()) + " above cap " + std::to_string(cfg.ell_cap));
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::Io:
      return 1;
    case ErrorCode::CapExceeded:
    case ErrorCode::SearchExhausted:
      return 3;
    default:
      return 2;
  }
}

void report_error(std::ostream& err, const char* code, const std::string& message) {
  err << Json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rigidity groups, mixing/rigidity splits and IP recurrence experiments", "rigidlab"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration");

  RunConfig flags;
  std::string family_path, group_path, sigma_path, F_text, interval_text = "-1,0", polys_text, p_text = "n^2+n",
                                                                 q_text = "2n^2+3n", primes_text = "2,3,5,7,11,13",
                                                                 scan_csv, out_path, format;
  bool witness_groups = false, no_scan = false;
  long bound = 2, gauss_bound = 0;
  std::size_t levels = 3, generators = 10, k0_max = 13, grid = 0;
  unsigned ell = 2;
  double tol = 0;

  std::vector<CLI::Option*> tracked;
  auto common_out = [&](CLI::App* sub) {
    tracked.push_back(sub->add_option("--out", out_path, "output file (default stdout)"));
  };
  auto run_opts = [&](CLI::App* sub) {
    tracked.push_back(sub->add_option("--depth", flags.depth, "schedule depth K"));
    tracked.push_back(sub->add_option("--samples", flags.samples, "Monte Carlo draws N"));
    tracked.push_back(sub->add_option("--seed", flags.seed, "random seed"));
  };

  auto* analyze = app.add_subcommand("analyze", "relation group, adequacy and split summary");
  analyze->add_option("family", family_path)->required();
  common_out(analyze);

  auto* splits = app.add_subcommand("splits", "mixing/rigidity split table");
  splits->add_option("family", family_path)->required();
  splits->add_option("--F", F_text, "single subset, 1-based, comma separated");
  splits->add_flag("--witness", witness_groups, "attach witness groups to feasible splits");
  tracked.push_back(splits->add_option("--format", format, "csv or json"));
  common_out(splits);

  auto* interp = app.add_subcommand("interp", "interpolation condition");
  interp->add_option("family", family_path)->required();
  common_out(interp);

  auto* witness = app.add_subcommand("witness", "witness for one split");
  witness->add_option("family", family_path)->required();
  witness->add_option("--F", F_text, "subset, 1-based, comma separated")->required();
  common_out(witness);

  auto* measure = app.add_subcommand("measure", "build a spectral measure for a rigidity group");
  measure->add_option("family", family_path)->required();
  measure->add_option("--group", group_path, "lattice JSON")->required();
  run_opts(measure);
  common_out(measure);

  auto* dich = app.add_subcommand("verify-dichotomy", "Fourier coefficients against their 0/1 targets");
  dich->add_option("sigma", sigma_path)->required();
  dich->add_option("--bound", bound, "coefficient box for directions a");
  auto* dich_tol = dich->add_option("--tol", tol, "tolerance (default 0.15)");
  dich->add_option("--levels", levels, "top levels checked");
  tracked.push_back(dich->add_option("--format", format, "csv or json"));
  common_out(dich);

  auto* gauss = app.add_subcommand("gaussian", "Gaussian transfer of the dichotomy");
  gauss->add_option("sigma", sigma_path)->required();
  gauss->add_option("--interval", interval_text, "lo,hi (inf allowed)");
  auto* gauss_tol = gauss->add_option("--tol", tol, "tolerance (default 0.05)");
  gauss->add_option("--bound", gauss_bound, "coefficient box for directions; 0 = unit vectors");
  gauss->add_option("--levels", levels, "top levels checked");
  common_out(gauss);

  auto* demo = app.add_subcommand("demo", "IP recurrence demonstrations");
  demo->require_subcommand(1);
  auto demo_opts = [&](CLI::App* sub) {
    run_opts(sub);
    sub->add_option("--generators", generators, "generators scanned");
    sub->add_option("--k0-max", k0_max, "largest tail start tried");
    sub->add_flag("--no-scan", no_scan, "exact ledger only");
    sub->add_option("--scan-csv", scan_csv, "scan rows as CSV");
    common_out(sub);
  };
  auto* d65 = demo->add_subcommand("cor65", "independent polynomials, A = T x [0,2/3)");
  auto* ell65 = d65->add_option("--ell", ell, "number of polynomials");
  d65->add_option("--polys", polys_text, "comma separated, default n,n^2,...");
  demo_opts(d65);
  auto* d66 = demo->add_subcommand("cor66", "deg p = deg q > deg(2p-q) > 0 with a Behrend set");
  d66->add_option("--p", p_text);
  d66->add_option("--q", q_text);
  d66->add_option("--ell", ell)->default_val(3);
  demo_opts(d66);
  auto* d67 = demo->add_subcommand("cor67", "shifts n, 2n, n^2 over a tower of primes");
  d67->add_option("--ell", ell)->default_val(3);
  d67->add_option("--primes", primes_text, "increasing primes");
  demo_opts(d67);

  auto* beh = app.add_subcommand("behrend", "interval set with few 3-term progressions");
  beh->add_option("--ell", ell)->required();
  beh->add_option("--grid", grid, "midpoint-grid cross-check size (0 = skip)");
  common_out(beh);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "PARSE_ERROR", e.what());
    return 1;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : config_from_json(read_json(config_path));
    for (auto* opt : tracked) {
      if (opt->count() == 0) continue;
      const std::string name = opt->get_name();
      if (name == "--depth") cfg.depth = flags.depth;
      else if (name == "--samples") cfg.samples = flags.samples;
      else if (name == "--seed") cfg.seed = flags.seed;
      else if (name == "--out") cfg.out = out_path;
      else if (name == "--format") cfg.format = format;
    }
    if (dich_tol->count() || gauss_tol->count()) cfg.tol = tol;
    validate(cfg);
    Output sink(cfg.out, out);

    if (analyze->parsed()) {
      SequenceFamily fam = family_from_json(read_json(family_path));
      check_family(fam, cfg);
      Json j{{"family", to_json(fam)}, {"size", fam.size()}};
      j["relation_group"] = to_json(relation_group(fam));
      j["user_asserted"] = relation_group_user_asserted(fam);
      Adequacy ad = is_adequate(fam);
      j["adequate"] = ad.adequate;
      if (ad.certificate) j["adequacy_certificate"] = to_json(*ad.certificate);
      if (!ad.reason.empty()) j["adequacy_reason"] = ad.reason;
      j["interpolation"] = to_json(interpolation_condition(fam));
      Json feasible = Json::array();
      for (const auto& v : all_splits(fam))
        if (v.feasible) feasible.push_back(index_set_label(v.F));
      j["feasible_splits"] = feasible;
      sink.json(j);
    } else if (splits->parsed()) {
      SequenceFamily fam = family_from_json(read_json(family_path));
      check_family(fam, cfg);
      if (!F_text.empty()) {
        SplitVerdict v = split_feasible(fam, parse_index_set(F_text, fam.size()));
        if (witness_groups && v.feasible) v.H = split_witness_group(fam, v.F);
        sink.json(to_json(v));
      } else {
        auto table = all_splits(fam, witness_groups);
        if (cfg.format == "json") {
          Json arr = Json::array();
          for (const auto& v : table) arr.push_back(to_json(v));
          sink.json(arr);
        } else {
          write_splits_csv(sink.get(), table);
        }
      }
    } else if (interp->parsed()) {
      SequenceFamily fam = family_from_json(read_json(family_path));
      check_family(fam, cfg);
      sink.json(to_json(interpolation_condition(fam)));
    } else if (witness->parsed()) {
      SequenceFamily fam = family_from_json(read_json(family_path));
      check_family(fam, cfg);
      SplitVerdict v = split_feasible(fam, parse_index_set(F_text, fam.size()));
      if (v.feasible) v.H = split_witness_group(fam, v.F);
      sink.json(to_json(v));
    } else if (measure->parsed()) {
      SequenceFamily fam = family_from_json(read_json(family_path));
      check_family(fam, cfg);
      Lattice G = lattice_from_json(read_json(group_path));
      if (auto idx = index_in_ambient(G); idx && *idx > cfg.index_cap)
        fail(ErrorCode::CapExceeded, "group index " + idx->get_str() + " above cap " + std::to_string(cfg.index_cap));
      GroupMeasure gm = build_measure_for_group(fam, G, cfg.depth, cfg.samples, cfg.seed);
      ScheduleReport check = check_schedule(gm.schedule, subfamily(fam, gm.reduction.family.indices));
      MeasureArtifact art{fam, G, gm.schedule, gm.reduction.family.M, gm.measure};
      Json j = to_json(art);
      j["schedule_check"] = to_json(check);
      sink.json(j);
    } else if (dich->parsed()) {
      MeasureArtifact art = measure_artifact_from_json(read_json(sigma_path));
      if (bound > cfg.coeff_bound)
        fail(ErrorCode::CapExceeded, "coefficient bound above cap " + std::to_string(cfg.coeff_bound));
      DichotomyReport rep =
          verify_dichotomy(art.measure, art.schedule, art.family, art.group, bound, cfg.tol.value_or(0.15), levels);
      if (cfg.format == "json") sink.json(to_json(rep));
      else write_dichotomy_csv(sink.get(), rep);
    } else if (gauss->parsed()) {
      MeasureArtifact art = measure_artifact_from_json(read_json(sigma_path));
      if (gauss_bound > cfg.coeff_bound)
        fail(ErrorCode::CapExceeded, "coefficient bound above cap " + std::to_string(cfg.coeff_bound));
      std::vector<IntVec> dirs = gauss_bound > 0 ? box_directions(art.family.size(), gauss_bound) : std::vector<IntVec>{};
      TransferReport rep = verify_gaussian_transfer(art.measure, art.schedule, art.family, art.group,
                                                    parse_interval(interval_text), cfg.tol.value_or(0.05), dirs, levels);
      sink.json(to_json(rep));
    } else if (demo->parsed()) {
      DemoOptions opt;
      opt.depth = cfg.depth;
      opt.samples = cfg.samples;
      opt.seed = cfg.seed;
      opt.generators = generators;
      opt.k0_max = k0_max;
      opt.scan = !no_scan;
      if (generators > 14) fail(ErrorCode::CapExceeded, "at most 14 generators");
      std::optional<ScanResult> scan;
      if (d65->parsed()) {
        std::vector<IntVec> polys;
        if (polys_text.empty()) {
          for (unsigned s = 1; s <= ell; ++s) {
            IntVec p(s + 1, 0);
            p[s] = 1;
            polys.push_back(std::move(p));
          }
        } else {
          for (const auto& t : split_list(polys_text)) polys.push_back(parse_poly_expr(t));
        }
        if (ell65->count() && polys.size() != ell)
          fail(ErrorCode::Precondition, "--ell disagrees with the number of polynomials");
        Cor65Report rep = cor65_demo(polys, opt);
        scan = rep.scan;
        sink.json(to_json(rep));
      } else if (d66->parsed()) {
        Cor66Report rep = cor66_demo(parse_poly_expr(p_text), parse_poly_expr(q_text), ell, opt);
        scan = rep.scan;
        sink.json(to_json(rep));
      } else {
        std::vector<unsigned long> primes;
        for (const auto& t : split_list(primes_text)) primes.push_back(parse_count(t));
        Cor67Report rep = cor67_demo(ell, primes, opt);
        for (const auto& lv : rep.levels)
          if (rep.witness_prime && lv.prime == *rep.witness_prime) scan = lv.scan;
        sink.json(to_json(rep));
      }
      if (!scan_csv.empty() && scan) {
        std::ostringstream csv;
        write_scan_csv(csv, *scan);
        write_text(scan_csv, csv.str());
      }
    } else if (beh->parsed()) {
      BehrendSet b = behrend_set(ell);
      Json j = to_json(b);
      if (grid > 0) {
        GridCheck g = behrend_grid_quadrature(b.set, grid);
        j["grid"] = Json{{"size", grid}, {"estimate", approx(g.estimate)}, {"error_bound", approx(g.error_bound)}};
      }
      sink.json(j);
    }
    sink.commit();
  } catch (const Error& e) {
    report_error(err, error_code_name(e.code()), e.what());
    return exit_code(e.code());
  } catch (const std::bad_alloc&) {
    report_error(err, error_code_name(ErrorCode::CapExceeded), "out of memory");
    return 3;
  } catch (const std::exception& e) {
    report_error(err, "INTERNAL_ERROR", e.what());
    return 2;
  }
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace rigidlab
