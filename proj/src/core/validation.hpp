#pragma once

#include "models.hpp"
#include "quadrature.hpp"

namespace halfline {

// Full invariant suite for a model: the CBF inequality checks plus the
// Wiener-Hopf factorization, normalization and eigenfunction identities at
// sampled lambda.  Used by the `validate` CLI command.
ValidationReport validate_model(ModelPtr model,
                                std::span<const double> lambdas,
                                const QuadratureOptions& opt = {});

ValidationReport validate_model(ModelPtr model);

// JSON rendering of a report: {"checks":[{name,margin,pass,detail}...],
// "all_pass":bool}.
std::string report_to_json(const ValidationReport& rep);

} // namespace halfline
