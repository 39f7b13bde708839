#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <gaitd/gaitd.hpp>

namespace gaitd::cli {

inline constexpr const char* kReportHeader = "# gaitd-report v1";

/// Round-trip decimal form (%.17g); "inf", "-inf" and "nan" for non-finite values.
std::string num(double v);

void write_model_section(std::ostream& os, const ModelSpec& spec);
void write_params_section(std::ostream& os, const GaitdDist& dist);
void write_measures(std::ostream& os, const GaitdDist& dist);

struct GteContext {
  GteSpec gte;
  std::optional<MEstimate> m_estimate;
  std::vector<GteRow> table;
};

/// Full fit report. Section order: [model] [params] [fit] [coefficients]
/// [vcov] [intervals] [measures] [dispersion] [trace] [gte-result]
/// [gte-table] [warnings]; the last three only when they apply.
void write_fit_report(std::ostream& os, const FitResult& fit, const std::optional<GteContext>& gte);

/// Short human-readable digest of a fit.
void write_fit_summary(std::ostream& os, const FitResult& fit, const std::optional<GteContext>& gte);

}  // namespace gaitd::cli
