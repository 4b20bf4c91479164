#pragma once

#include <stdexcept>
#include <string>

namespace geoforge {

/// Base of every error thrown by the library. `code()` is a stable
/// machine-readable name (e.g. "DanglingLabel") used in reports and tests.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define GEOFORGE_DEFINE_ERROR(Name)                                           \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& message) : Error(#Name, message) {}  \
    }

// geom_core
GEOFORGE_DEFINE_ERROR(InvalidPredicate);
GEOFORGE_DEFINE_ERROR(UnknownPoint);
GEOFORGE_DEFINE_ERROR(InvalidBudget);
GEOFORGE_DEFINE_ERROR(SamplingFailed);

// deduction
GEOFORGE_DEFINE_ERROR(RuleLibraryError);
GEOFORGE_DEFINE_ERROR(TemplateError);

// scene_schema
GEOFORGE_DEFINE_ERROR(SchemaError);
GEOFORGE_DEFINE_ERROR(DanglingLabel);
GEOFORGE_DEFINE_ERROR(DuplicateCircleId);
GEOFORGE_DEFINE_ERROR(CoordError);
GEOFORGE_DEFINE_ERROR(DegenerateCircle);

// quantity_dsl
GEOFORGE_DEFINE_ERROR(DslSyntaxError);
GEOFORGE_DEFINE_ERROR(UnknownFunction);
GEOFORGE_DEFINE_ERROR(CircleIdRequired);
GEOFORGE_DEFINE_ERROR(PointLabelRequired);
GEOFORGE_DEFINE_ERROR(ArityError);
GEOFORGE_DEFINE_ERROR(UnknownReference);
GEOFORGE_DEFINE_ERROR(DegenerateAngle);
GEOFORGE_DEFINE_ERROR(DivisionByZero);
GEOFORGE_DEFINE_ERROR(ValueParseError);

// verifier / pipeline
GEOFORGE_DEFINE_ERROR(ConfigError);

// renderer
GEOFORGE_DEFINE_ERROR(EmptyScene);

// alignment_metrics
GEOFORGE_DEFINE_ERROR(BinningError);

// llm_gateway
GEOFORGE_DEFINE_ERROR(GatewayUnavailable);
GEOFORGE_DEFINE_ERROR(MockMiss);
GEOFORGE_DEFINE_ERROR(ExtractionError);

#undef GEOFORGE_DEFINE_ERROR

}  // namespace geoforge
