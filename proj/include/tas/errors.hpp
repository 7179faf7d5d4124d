#pragma once

#include <stdexcept>
#include <string>

namespace tas {

/// Base class for all engine errors. Every failure mode below maps to a
/// named subclass so callers can catch selectively and the CLI can emit
/// machine-readable error reports.
class Error : public std::runtime_error {
public:
    Error(std::string type, const std::string& message)
        : std::runtime_error(type + ": " + message), type_(std::move(type)) {}

    const std::string& type() const { return type_; }

private:
    std::string type_;
};

#define TAS_ERROR_TYPE(Name)                                          \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& message)                     \
            : Error(#Name, message) {}                                \
    }

TAS_ERROR_TYPE(RankDeficient);
TAS_ERROR_TYPE(NotPositiveDefinite);
TAS_ERROR_TYPE(Singular);
TAS_ERROR_TYPE(NonFinite);
TAS_ERROR_TYPE(LoopNotClosed);
TAS_ERROR_TYPE(StepTooLarge);
TAS_ERROR_TYPE(NoAnalyticCurvature);
TAS_ERROR_TYPE(AmbiguousDescriptor);
TAS_ERROR_TYPE(BadParams);
TAS_ERROR_TYPE(NonFiniteState);
TAS_ERROR_TYPE(SingularGoalState);
TAS_ERROR_TYPE(NonPositiveLambda);
TAS_ERROR_TYPE(NoClosedForm);
TAS_ERROR_TYPE(UnsupportedLoop);
TAS_ERROR_TYPE(InfeasibleCandidate);
TAS_ERROR_TYPE(IllConditionedWindow);
TAS_ERROR_TYPE(UnknownExperiment);

#undef TAS_ERROR_TYPE

}  // namespace tas
