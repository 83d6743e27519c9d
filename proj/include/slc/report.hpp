#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "slc/certify.hpp"
#include "slc/inequalities.hpp"
#include "slc/model.hpp"

namespace slc {

inline constexpr const char* kToolVersion = "slc 0.1.0";

nlohmann::ordered_json to_json(const SlcCertificate& cert);
nlohmann::ordered_json to_json(const DominanceReport& rep);
nlohmann::ordered_json to_json(const GapReport& rep);
nlohmann::ordered_json to_json(const DiagnosticVerdict& v);

struct DiagnoseOptions {
    QuadratureSpec spec;
    int grid = 2001;
    double equality_tol = kEqualityTol;
    std::optional<double> alpha;              // candidate for discrete checks
    std::optional<Eigen::MatrixXd> sigma;     // candidate for d > 1
    std::uint64_t seed = 20240901;
};

// Full pipeline: certify, default gap battery, dominance (continuous),
// characterization diagnostic. Deterministic for fixed inputs.
struct RunOutcome {
    SlcCertificate certificate;
    std::optional<DominanceReport> dominance;
    std::vector<GapReport> gaps;
    DiagnosticVerdict diagnostic;
};

RunOutcome diagnose_model(const Model& model, const DiagnoseOptions& opt = {});

// Assembled single-document run report. wall_ms is the only field expected
// to vary between identical runs.
nlohmann::ordered_json run_report(const nlohmann::json& input_echo,
                                  const RunOutcome& outcome, double wall_ms);

}  // namespace slc
