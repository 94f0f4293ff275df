#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cgl/bifurcation.hpp"
#include "cgl/boundstate.hpp"
#include "cgl/evolution.hpp"
#include "cgl/floquet.hpp"
#include "cgl/params.hpp"
#include "cgl/stability.hpp"

namespace cgl {

using json = nlohmann::json;

inline constexpr int kSpecVersion = 1;

/// Round-trip decimal form of a double ("nan", "inf" and "-inf" for non-finite values).
std::string fmt_double(double v);

/// Minimal CSV table: a header row and rows of doubles.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string str() const;
};

/// Writes `text` to `path`, creating parent directories. Throws InputError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);
void write_csv(const std::filesystem::path& path, const CsvTable& t);

json to_json(const ParamSet& p);
json to_json(const TrigParamSet& t);
json to_json(const Condition& c);
json to_json(const BranchReport& b);
json to_json(const RegimeReport& r);
json to_json(const NlsCoeffs& c);
json to_json(const Admissibility& a);
json to_json(const LyapunovReport& r);
json to_json(const MonodromyReport& r);
json to_json(const PRoot& r);
json to_json(const AsymptoticReport& r);
/// Branch summary without the Galerkin coefficients.
json to_json(const Branch& b);
json complex_json(cplx z);

/// x, psi, dpsi, re_phi, im_phi, H.
CsvTable profile_table(const Profile& p, const BoundState& bs);
/// DiagnosticsLog::columns().
CsvTable diagnostics_table(const DiagnosticsLog& log);
/// x, y, re, im, abs.
CsvTable field_table(const Field& f);
/// mu_delta, re_m1, im_m1, re_m2, im_m2, log_abs1, log_abs2, log_det, product_error.
CsvTable multiplier_table(const MonodromyReport& r);
/// eps, re_lambda, im_lambda, re_alpha, im_alpha, y_h1, residual.
CsvTable branch_table(const Branch& b);

}  // namespace cgl
