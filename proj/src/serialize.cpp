#include "rigidlab/serialize.hpp"

#include <charconv>
#include <ostream>

namespace rigidlab {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::Parse, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Json rat_vec_json(const RatVec& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

Json one_based(const IndexSet& F) {
  Json out = Json::array();
  for (auto i : F) out.push_back(i + 1);
  return out;
}

Json witness_json(const SplitWitness& w) { return Json{{"a", to_json(w.a)}, {"j", w.j + 1}}; }

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string vec_label(const IntVec& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + a[i].get_str();
  return s + ")";
}

Json scan_summary(const std::optional<ScanResult>& s) {
  if (!s) return nullptr;
  return to_json(*s);
}

Json generators_json(const std::vector<Int>& g) {
  Json out = Json::array();
  for (const auto& n : g) out.push_back(to_json(n));
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json to_json(const Rat& x) { return x.get_str(); }

Json to_json(const Int& x) {
  if (x.fits_slong_p()) return x.get_si();
  return x.get_str();
}

Json to_json(const IntVec& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

Json approx(double x) { return Json{{"value", x}, {"approx", true}}; }

Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(Int(j.get<long>()));
  if (!j.is_string()) bad("expected a rational string \"p/q\"");
  Rat r;
  if (r.set_str(j.get<std::string>(), 10) != 0) bad("malformed rational \"" + j.get<std::string>() + "\"");
  if (r.get_den() == 0) bad("zero denominator");
  r.canonicalize();
  return r;
}

Int int_from_json(const Json& j) {
  if (j.is_number_integer()) return Int(j.get<long>());
  if (!j.is_string()) bad("expected an integer");
  Int x;
  if (x.set_str(j.get<std::string>(), 10) != 0) bad("malformed integer \"" + j.get<std::string>() + "\"");
  return x;
}

IntVec int_vec_from_json(const Json& j) {
  if (!j.is_array()) bad("expected an integer array");
  IntVec v;
  for (const auto& x : j) v.push_back(int_from_json(x));
  return v;
}

Json to_json(const Lattice& L) {
  Json basis = Json::array();
  for (const auto& row : L.basis()) basis.push_back(to_json(row));
  return Json{{"ambient_dim", L.ambient_dim()}, {"basis", basis}};
}

Lattice lattice_from_json(const Json& j) {
  const Json& d = field(j, "ambient_dim");
  if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) bad("ambient_dim must be a positive integer");
  const std::size_t dim = d.get<std::size_t>();
  IntMat rows;
  for (const auto& r : field(j, "basis")) {
    rows.push_back(int_vec_from_json(r));
    if (rows.back().size() != dim) fail(ErrorCode::DimensionMismatch, "basis vector length differs from ambient_dim");
  }
  return canonicalize(rows, dim);
}

Json to_json(const SequenceFamily& fam) {
  Json out;
  switch (fam.kind()) {
    case FamilyKind::Polynomial: {
      out["kind"] = "polynomial";
      Json polys = Json::array();
      for (const auto& p : fam.polys()) polys.push_back(to_json(p));
      out["polys"] = polys;
      break;
    }
    case FamilyKind::Beatty: {
      out["kind"] = "beatty";
      Json alphas = Json::array();
      for (const auto& a : fam.alphas()) alphas.push_back(Json{{"value", to_json(a.value)}, {"error", to_json(a.error)}});
      out["alphas"] = alphas;
      out["independent"] = true;
      break;
    }
    case FamilyKind::Explicit: {
      out["kind"] = "explicit";
      Json values = Json::array();
      for (const auto& row : fam.values()) values.push_back(to_json(row));
      out["values"] = values;
      if (fam.user_relations()) out["relations"] = to_json(*fam.user_relations());
      break;
    }
  }
  return out;
}

SequenceFamily family_from_json(const Json& j) {
  const Json& kind = field(j, "kind");
  if (!kind.is_string()) bad("family kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "polynomial") {
    std::vector<IntVec> polys;
    for (const auto& p : field(j, "polys")) polys.push_back(int_vec_from_json(p));
    return SequenceFamily::polynomial(std::move(polys));
  }
  if (k == "beatty") {
    std::vector<BeattyMultiplier> alphas;
    for (const auto& a : field(j, "alphas")) {
      if (a.is_string()) alphas.push_back(parse_multiplier(a.get<std::string>()));
      else alphas.push_back(BeattyMultiplier{rat_from_json(field(a, "value")), rat_from_json(field(a, "error"))});
    }
    const Json& ind = field(j, "independent");
    if (!ind.is_boolean()) bad("\"independent\" must be a boolean");
    return SequenceFamily::beatty(std::move(alphas), ind.get<bool>());
  }
  if (k == "explicit") {
    std::vector<IntVec> values;
    for (const auto& row : field(j, "values")) values.push_back(int_vec_from_json(row));
    std::optional<Lattice> rel;
    if (j.contains("relations")) rel = lattice_from_json(j.at("relations"));
    return SequenceFamily::explicit_table(std::move(values), std::move(rel));
  }
  bad("unknown family kind \"" + k + "\"");
}

Json to_json(const Schedule& s) {
  Json n = Json::array(), alpha = Json::array();
  for (const auto& x : s.n) n.push_back(x.get_str());
  for (const auto& row : s.alpha) alpha.push_back(rat_vec_json(row));
  return Json{{"depth", s.depth()}, {"n", n}, {"alpha", alpha}};
}

Schedule schedule_from_json(const Json& j) {
  Schedule s;
  for (const auto& x : field(j, "n")) s.n.push_back(int_from_json(x));
  for (const auto& row : field(j, "alpha")) {
    RatVec r;
    for (const auto& x : row) r.push_back(rat_from_json(x));
    s.alpha.push_back(std::move(r));
  }
  if (s.alpha.size() != s.n.size()) fail(ErrorCode::DimensionMismatch, "schedule alpha rows differ from depth");
  return s;
}

Json to_json(const AtomicMeasure& m) {
  Json atoms = Json::array();
  for (const auto& a : m.atoms()) atoms.push_back(Json::array({to_json(a.x), to_json(a.w)}));
  return Json{{"atoms", atoms}};
}

AtomicMeasure measure_from_json(const Json& j) {
  std::vector<Atom> atoms;
  for (const auto& a : field(j, "atoms")) {
    if (!a.is_array() || a.size() != 2) bad("atom must be a pair [x, w]");
    atoms.push_back(Atom{rat_from_json(a[0]), rat_from_json(a[1])});
  }
  return AtomicMeasure::from_atoms(std::move(atoms));
}

Json to_json(const MeasureArtifact& a) {
  Json out = to_json(a.measure);
  out["family"] = to_json(a.family);
  out["group"] = to_json(a.group);
  out["schedule"] = to_json(a.schedule);
  out["M"] = to_json(a.M);
  return out;
}

MeasureArtifact measure_artifact_from_json(const Json& j) {
  return MeasureArtifact{family_from_json(field(j, "family")), lattice_from_json(field(j, "group")),
                         schedule_from_json(field(j, "schedule")), int_from_json(field(j, "M")),
                         measure_from_json(j)};
}

std::string index_set_label(const IndexSet& F) {
  if (F.empty()) return "∅";
  std::string s = "{";
  for (std::size_t i = 0; i < F.size(); ++i) s += (i ? "," : "") + std::to_string(F[i] + 1);
  return s + "}";
}

Json to_json(const SplitVerdict& v) {
  Json out{{"F", one_based(v.F)}, {"feasible", v.feasible}};
  if (v.witness) out["witness"] = witness_json(*v.witness);
  if (v.H) out["witness_group"] = to_json(*v.H);
  if (v.user_asserted) out["user_asserted"] = true;
  return out;
}

Json to_json(const InterpolationVerdict& v) {
  Json out{{"holds", v.holds}, {"adequate", v.adequate}};
  if (v.witness) out["witness"] = witness_json(*v.witness);
  if (v.adequacy_certificate) out["adequacy_certificate"] = to_json(*v.adequacy_certificate);
  if (v.user_asserted) out["user_asserted"] = true;
  return out;
}

Json to_json(const ScheduleReport& r) {
  auto prop = [](const PropertyCheck& c) {
    Json out{{"pass", c.pass}};
    out["worst_margin"] = c.worst_margin ? to_json(*c.worst_margin) : Json(nullptr);
    if (!c.worst_at.empty()) out["worst_at"] = c.worst_at;
    return out;
  };
  return Json{{"window", prop(r.window)},   {"diagonal", prop(r.diagonal)}, {"cross", prop(r.cross)},
              {"earlier", prop(r.earlier)}, {"indices_ok", r.indices_ok},   {"all_pass", r.all_pass()}};
}

Json to_json(const DichotomyReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back(Json{{"level", row.level},
                        {"a", to_json(row.a)},
                        {"modulus", approx(row.modulus)},
                        {"target", row.target},
                        {"deviation", approx(row.deviation)}});
  return Json{{"pass", r.pass}, {"max_deviation_top", approx(r.max_deviation_top)}, {"rows", rows}};
}

Json to_json(const TransferReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back(Json{{"level", row.level},
                        {"a", to_json(row.a)},
                        {"rigid", row.rigid},
                        {"rho", approx(row.rho)},
                        {"mass", approx(row.mass)},
                        {"target", approx(row.target)},
                        {"deviation", approx(row.deviation)}});
  return Json{{"pass", r.pass}, {"max_deviation_top", approx(r.max_deviation_top)}, {"rows", rows}};
}

Json to_json(const BehrendSet& b) {
  Json arcs = Json::array();
  for (const auto& iv : b.set.intervals()) arcs.push_back(Json::array({to_json(iv.lo), to_json(iv.hi)}));
  return Json{{"radix", b.radix},
              {"length", b.length},
              {"digit_vectors", b.digit_vectors},
              {"measure", to_json(b.set.measure())},
              {"intervals", arcs},
              {"integral", to_json(b.integral)},
              {"bound", to_json(b.bound)},
              {"holds", b.integral <= b.bound}};
}

Json to_json(const ScanResult& s) {
  std::size_t hits = 0, misses = 0, unsure = 0;
  for (const auto& r : s.rows) {
    if (r.verdict == "HIT") ++hits;
    else if (r.verdict == "MISS") ++misses;
    else ++unsure;
  }
  Json out{{"threshold", to_json(s.threshold)}, {"sums", s.rows.size()}, {"miss", misses},
           {"hit", hits},                       {"inconclusive", unsure}};
  out["k0"] = s.k0 ? Json(*s.k0) : Json(nullptr);
  out["tail_size"] = s.tail_size;
  out["tail_inconclusive"] = s.tail_inconclusive;
  return out;
}

Json to_json(const Cor65Report& r) {
  Json polys = Json::array();
  for (const auto& p : r.polys) polys.push_back(to_json(p));
  Json padding = Json::array();
  for (auto t : r.padding) padding.push_back(t + 1);
  return Json{{"polys", polys},
              {"G_prime", to_json(r.G_prime)},
              {"padding", padding},
              {"G", to_json(r.G)},
              {"H", to_json(r.H)},
              {"limit_points", r.limit_points},
              {"limit", to_json(r.limit)},
              {"nu_power", to_json(r.nu_power)},
              {"gap", to_json(r.gap)},
              {"epsilon", to_json(r.epsilon)},
              {"threshold", to_json(r.threshold)},
              {"limit_matches_closed_form", r.limit_matches_closed_form},
              {"gap_at_least_two_epsilon", r.gap_at_least_two_epsilon},
              {"requested_depth", r.requested_depth},
              {"measure_depth", r.measure_depth},
              {"generators", generators_json(r.generators)},
              {"scan", scan_summary(r.scan)}};
}

Json to_json(const Cor66Report& r) {
  return Json{{"p", to_json(r.p)},
              {"q", to_json(r.q)},
              {"difference", to_json(r.difference)},
              {"degree", r.degree},
              {"ell", r.ell},
              {"behrend", to_json(r.behrend)},
              {"limit", to_json(r.limit)},
              {"bound", to_json(r.bound)},
              {"threshold", to_json(r.threshold)},
              {"limit_matches_behrend", r.limit_matches_behrend},
              {"generators", generators_json(r.generators)},
              {"scan", scan_summary(r.scan)}};
}

Json to_json(const Cor67Report& r) {
  Json levels = Json::array();
  for (const auto& lv : r.levels)
    levels.push_back(Json{{"prime", lv.prime},
                          {"limit", to_json(lv.limit)},
                          {"riemann_gap", approx(lv.riemann_gap)},
                          {"riemann_bound", approx(lv.riemann_bound)},
                          {"below_threshold", lv.below_threshold},
                          {"generators", generators_json(lv.generators)},
                          {"scan", scan_summary(lv.scan)}});
  Json out{{"ell", r.ell},
           {"behrend", to_json(r.behrend)},
           {"uniform_limit", to_json(r.uniform_limit)},
           {"bound", to_json(r.bound)},
           {"threshold", to_json(r.threshold)},
           {"uniform_within_bound", r.uniform_within_bound},
           {"levels", levels}};
  out["witness_prime"] = r.witness_prime ? Json(*r.witness_prime) : Json(nullptr);
  return out;
}

void write_splits_csv(std::ostream& out, const std::vector<SplitVerdict>& verdicts) {
  out << "F,feasible,witness\n";
  for (const auto& v : verdicts) {
    out << quoted(index_set_label(v.F)) << ',' << (v.feasible ? "true" : "false") << ',';
    if (v.witness) out << quoted("a=" + vec_label(v.witness->a) + ";j=" + std::to_string(v.witness->j + 1));
    out << '\n';
  }
}

void write_dichotomy_csv(std::ostream& out, const DichotomyReport& r) {
  out << "k,a,modulus,target,deviation\n";
  for (const auto& row : r.rows)
    out << row.level << ',' << quoted(vec_label(row.a)) << ',' << format_double(row.modulus) << ',' << row.target
        << ',' << format_double(row.deviation) << '\n';
}

void write_scan_csv(std::ostream& out, const ScanResult& s) {
  out << "alpha,n_alpha,correlation,std_error,threshold,verdict\n";
  const std::string thr = s.threshold.get_str();
  for (const auto& r : s.rows) {
    std::string a = "{";
    for (std::size_t i = 0; i < r.alpha.size(); ++i) a += (i ? "," : "") + std::to_string(r.alpha[i]);
    out << quoted(a + "}") << ',' << r.n_alpha.get_str() << ',' << format_double(r.correlation) << ','
        << format_double(r.std_error) << ',' << thr << ',' << r.verdict << '\n';
  }
}

}  // namespace rigidlab
