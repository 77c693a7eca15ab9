#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mdlab/bracket.hpp"
#include "mdlab/group.hpp"
#include "mdlab/multiplier.hpp"

namespace mdlab {

std::string read_file(const std::string& path);
// Writes to a temporary sibling and renames it into place.
void atomic_write(const std::string& path, const std::string& content);

// Shortest round-trip decimal.
std::string format_number(double x);
std::string format_complex(cd z);  // "a+bi"
std::string csv_field(const std::string& s);

// Complex matrices: CSV with entries "a", "a+bi", "a-bi", "bi", or the binary
// form "SCHR1", uint32 rows, uint32 cols (little endian), then row-major
// (re, im) float64 pairs. read_matrix picks the form by the magic bytes.
Eigen::MatrixXcd parse_matrix_csv(const std::string& text);
Eigen::MatrixXcd parse_matrix_binary(const std::string& bytes);
Eigen::MatrixXcd read_matrix(const std::string& path);
std::string matrix_csv(const Eigen::MatrixXcd& m);
std::string matrix_binary(const Eigen::MatrixXcd& m);

// {"kind": "free", "rank": k} | {"kind": "zn", "n": n} |
// {"kind": "finite", "table": [[...]]} or {"kind": "finite", "n": n} (cyclic) |
// {"kind": "sl2z"} | {"kind": "sl2z_semidirect"}
GroupPtr group_from_json(const nlohmann::json& j, GroupLimits limits = {});
nlohmann::json group_to_json(const Group& g);

// An element as its string form or as the raw integer array.
Element element_from_json(const nlohmann::json& j, const Group& g);

// {"support": [[elem, re, im], ...]} | {"radial": {"coeffs_by_length": [c, ...]}}
// with c a number or [re, im] | {"constant": c} | {"fejer": {"N": n, "r": r}} |
// {"folner": {"k": k}}; an optional "id" names the multiplier.
Multiplier multiplier_from_json(const nlohmann::json& j, const GroupPtr& g);
nlohmann::json multiplier_to_json(const Multiplier& phi);

std::string ball_csv(const Ball& b);
std::string bracket_csv(const std::vector<NormBracket>& rows);
// n,N,r,pointwise_residual,lower,upper,empirical_upper,flags
std::string convergence_csv(const ConvergenceReport& rep);
std::string convergence_header(const ConvergenceReport& rep);

struct FamilyRecord {
  cd z;
  std::size_t radius = 0;
  double unitarity_residual = 0.0;
  double coefficient_residual = 0.0;
  double cr_residual = 0.0;
  double empirical_bound = 0.0;
};
nlohmann::json family_json(const FamilyRecord& r);

}  // namespace mdlab
