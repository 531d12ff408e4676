#pragma once

// JSON encodings for every value type and report. Readers take the JSON path
// of the value so that schema errors point at the offending field.

#include "qcoarse/asdim.hpp"
#include "qcoarse/expander.hpp"
#include "qcoarse/moduli.hpp"
#include "qcoarse/qmetric.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace qcoarse {

using json = nlohmann::json;

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Reads and parses a file; parse failures become SchemaError at "$".
json load_json_file(const std::string& file);
/// Returns report["results"] for a RunReport, the input otherwise.
const json& unwrap_report(const json& j);

/// A real that may be the string "inf".
json real_to_json(double v);
double real_from_json(const json& j, const std::string& path);

json to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& path = "$");

json to_json(const Projection& p);
Projection projection_from_json(const json& j, const std::string& path = "$",
                                const ToleranceConfig& tol = {});

json to_json(const OperatorSubspace& s);
OperatorSubspace subspace_from_json(const json& j, const std::string& path = "$",
                                    const ToleranceConfig& tol = {});

json to_json(const KrausSet& k);
KrausSet kraus_from_json(const json& j, const std::string& path = "$",
                         const ToleranceConfig& tol = {});

json to_json(const FiniteMetricSpace& s);
FiniteMetricSpace space_from_json(const json& j, const std::string& path = "$");

json to_json(const ExtendedDistance& d);
ExtendedDistance distance_from_json(const json& j, const std::string& path = "$");

Subset subset_from_json(const json& j, const std::string& path = "$");

json to_json(const ExpanderSpec& s);
/// Checks unitarity; keeps the stored epsilon.
ExpanderSpec expander_from_json(const json& j, const std::string& path = "$",
                                const ToleranceConfig& tol = {});

json to_json(const CoverFamily& c);
CoverFamily cover_from_json(const json& j, const std::string& path = "$",
                            const ToleranceConfig& tol = {});

struct MapFile {
  std::vector<std::string> from;
  std::vector<std::string> to;
  PointMap f;
};
json to_json(const MapFile& m);
MapFile map_from_json(const json& j, const std::string& path = "$");

json to_json(const ModuliTable& t);
json to_json(const CoarseFlags& f);

json to_json(const ToleranceConfig& t);
json to_json(const GapReport& r);
json to_json(const CheegerScan& s);
json to_json(const ConnectivityReport& r);
json to_json(const IsoperimetricReport& r);
json to_json(const IteratedReport& r);
json to_json(const RankDiameterReport& r);
json to_json(const DiameterBracket& b);
json to_json(const RegularGraph& g);
json to_json(const ClassicalGap& g);
json to_json(const CoverReport& r);
json to_json(const AsdimResult& r);
json to_json(const CountingCertificate& c);

}  // namespace qcoarse
