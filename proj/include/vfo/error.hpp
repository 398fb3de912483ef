#ifndef VFO_ERROR_HPP
#define VFO_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace vfo {

enum class Errc {
    DuplicateId,
    DanglingEndpoint,
    DisconnectedCore,
    InvalidAttribute,
    InvalidService,
    InvalidEmbedding,
    NotWireless,
    Unstable,
    UnroutedVl,
    NoCoverage,
    NoFeasiblePlacement,
    NoFeasibleCapacity,
    BudgetExceeded,
    Infeasible,
    NotIdeal,
    DomainError,
    EmptyRegion,
    RejectionLimit,
    ScenarioInvalid,
    ParseError,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::DanglingEndpoint: return "DanglingEndpoint";
    case Errc::DisconnectedCore: return "DisconnectedCore";
    case Errc::InvalidAttribute: return "InvalidAttribute";
    case Errc::InvalidService: return "InvalidService";
    case Errc::InvalidEmbedding: return "InvalidEmbedding";
    case Errc::NotWireless: return "NotWireless";
    case Errc::Unstable: return "Unstable";
    case Errc::UnroutedVl: return "UnroutedVl";
    case Errc::NoCoverage: return "NoCoverage";
    case Errc::NoFeasiblePlacement: return "NoFeasiblePlacement";
    case Errc::NoFeasibleCapacity: return "NoFeasibleCapacity";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::Infeasible: return "Infeasible";
    case Errc::NotIdeal: return "NotIdeal";
    case Errc::DomainError: return "DomainError";
    case Errc::EmptyRegion: return "EmptyRegion";
    case Errc::RejectionLimit: return "RejectionLimit";
    case Errc::ScenarioInvalid: return "ScenarioInvalid";
    case Errc::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace vfo

#endif // VFO_ERROR_HPP
