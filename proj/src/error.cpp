#include "lattice/error.hpp"

namespace lattice {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Capacity: return "capacity";
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::UnsupportedForcing: return "unsupported-forcing";
        case ErrorKind::ConditionViolation: return "condition-violation";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::BoundaryContamination: return "boundary-contamination";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace lattice
