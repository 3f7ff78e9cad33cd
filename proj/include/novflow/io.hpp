#pragma once

// Repository file format: versioned JSON documents ("fmt": 1) with a
// "kind" tag. Rationals are {"num": n, "den": d}; integers that do not fit
// in 64 bits are written as decimal strings.

#include "novflow/flowcat.hpp"
#include "novflow/novikov.hpp"
#include "novflow/perturb.hpp"
#include "novflow/strata.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <variant>

namespace novflow {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

using DocumentPayload = std::variant<NovikovMatrix, NovikovComplex, FlowCategoryDesc, CombStratSpace,
                                     SectionOnBox, FiniteGroupRep, BoundaryData>;

struct Document {
    DocumentPayload payload;

    /// novikov_matrix, complex, flow_category, strat_space, section,
    /// group_rep or boundary_data.
    std::string kind() const;

    friend bool operator==(const Document&, const Document&) = default;
};

/// Throws ParseError ("line L, column C: ...") on malformed JSON and
/// SchemaError ("/path: ...") when the structure or a value is invalid.
Document parse_document(std::string_view text);
Json to_json(const Document& doc);
std::string serialize(const Document& doc);

// Building blocks, shared with the CLI reports.
Json rational_to_json(const Rational& r);
Json integer_to_json(const Integer& n);
Json truncation_to_json(const ExtRational& t);
Json novikov_to_json(const NovikovElement& e);
Json matrix_to_json(const NovikovMatrix& m);
Json cohomology_to_json(const GradedCohomology& h);
Json poly_to_json(const Poly& p);

}  // namespace novflow
