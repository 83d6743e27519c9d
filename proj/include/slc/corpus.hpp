#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace slc {

// A generated model plus its construction-implied SLC parameter: every
// member is strongly log-concave by construction, so certification results
// can be cross-checked against the closed-form bound.
struct CorpusEntry {
    nlohmann::json model_config;
    std::string kind;  // continuous_1d | continuous_nd | discrete
    double alpha_bound = 0.0;              // 1D / discrete
    std::vector<double> sigma_diag;        // multi-d candidate (diagonal)

    nlohmann::json to_json() const;
};

// Deterministic corpus: convex even perturbations of x^2/(2s) (so phi'' >=
// 1/s), separable multivariate versions, and Poisson pmfs multiplied by a
// log-concave sequence (preserving the discrete criterion with a closed-form
// alpha bound).
std::vector<CorpusEntry> gen_corpus(std::uint64_t seed, int count);

}  // namespace slc
