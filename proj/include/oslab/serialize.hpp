#pragma once

// JSON and CSV emission. Every JSON document is an object whose first two
// members are "schema": "oseledets-lab/1" and "kind". Keys keep insertion
// order and reals use the shortest round-trip form, so equal inputs give
// byte-identical output. Non-finite reals are written as null.

#include "oslab/config.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace oslab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "oseledets-lab/1";

Json to_json(const Vector& v);
Json to_json(const Matrix& m);  // array of rows
Json to_json(const SystemSpec& spec);
Json to_json(const ExponentEstimate& e);
Json to_json(const SplittingSample& s);
Json to_json(const PeriodicOrbit& po);
Json to_json(const PesinReport& r);
Json to_json(const MeasureStats& m);
Json to_json(const GapReport& g);
Json to_json(const CoverageReport& c);
Json to_json(const ApproximationReport& r);

/// {"schema": ..., "kind": kind, <members of body>}.
Json document(const std::string& kind, const Json& body);

Json exponents_document(const ExponentEstimate& e, const SystemSpec& spec);
Json splitting_document(const SplittingSample& s, const SystemSpec& spec);
Json periodic_document(const std::vector<PeriodicOrbit>& orbits, const SystemSpec& spec);
Json pesin_document(const PesinReport& r, const Point& x, const SystemSpec& spec);
Json verify_document(const ApproximationReport& r);

/// Checks the top-level schema tag and kind; throws ValidationError.
void check_document(const Json& doc, const std::string& kind);

// CSV flavours, one header line each.
void write_exponents_csv(std::ostream& out, const ExponentEstimate& e);             // index,exponent
void write_splitting_csv(std::ostream& out, const SplittingSample& s);              // block,dim,exponent,vector,c0..
void write_periodic_csv(std::ostream& out, const std::vector<PeriodicOrbit>& orbits);  // orbit,period,residual,step,x0..
void write_pesin_csv(std::ostream& out, const PesinReport& r);                      // m,a,b,c
void write_coverage_csv(std::ostream& out, const CoverageReport& c);                // sample,x0..,distance,nearest,covered

}  // namespace oslab
