#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigidlab/deciders.hpp"
#include "rigidlab/dynamics.hpp"

namespace rigidlab {

using Json = nlohmann::ordered_json;

// Exact values travel as strings: "p/q" for rationals, decimal for integers.
Json to_json(const Rat& x);
Json to_json(const Int& x);
Json to_json(const IntVec& v);
Json approx(double x);  // {"value": x, "approx": true}
Rat rat_from_json(const Json& j);
Int int_from_json(const Json& j);
IntVec int_vec_from_json(const Json& j);

Json to_json(const Lattice& L);
Lattice lattice_from_json(const Json& j);

Json to_json(const SequenceFamily& fam);
SequenceFamily family_from_json(const Json& j);

Json to_json(const Schedule& s);
Schedule schedule_from_json(const Json& j);

Json to_json(const AtomicMeasure& m);  // {"atoms": [[x, w], ...]}
AtomicMeasure measure_from_json(const Json& j);

// Output of `measure`: everything `verify-dichotomy` and `gaussian` need.
struct MeasureArtifact {
  SequenceFamily family;
  Lattice group{1};
  Schedule schedule;
  Int M;
  AtomicMeasure measure;
};
Json to_json(const MeasureArtifact& a);
MeasureArtifact measure_artifact_from_json(const Json& j);

std::string index_set_label(const IndexSet& F);  // 1-based, "∅" when empty
Json to_json(const SplitVerdict& v);
Json to_json(const InterpolationVerdict& v);
Json to_json(const ScheduleReport& r);
Json to_json(const DichotomyReport& r);
Json to_json(const TransferReport& r);
Json to_json(const BehrendSet& b);
Json to_json(const ScanResult& s);
Json to_json(const Cor65Report& r);
Json to_json(const Cor66Report& r);
Json to_json(const Cor67Report& r);

void write_splits_csv(std::ostream& out, const std::vector<SplitVerdict>& verdicts);
void write_dichotomy_csv(std::ostream& out, const DichotomyReport& r);
void write_scan_csv(std::ostream& out, const ScanResult& s);

// Shortest round-trip decimal, independent of the global locale.
std::string format_double(double x);

}  // namespace rigidlab
