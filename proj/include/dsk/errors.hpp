#pragma once

#include <stdexcept>
#include <string>

namespace dsk {

class Error : public std::runtime_error {
public:
    Error(const std::string& kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(kind) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define DSK_ERROR(Name)                                                        \
    struct Name : Error {                                                      \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

DSK_ERROR(ConfigError);
DSK_ERROR(DomainError);
DSK_ERROR(NoHorizonGap);
DSK_ERROR(GridError);
DSK_ERROR(ShapeError);
DSK_ERROR(ConvergenceError);
DSK_ERROR(NegativeQuadraticForm);
DSK_ERROR(BlowupError);
DSK_ERROR(AdmissibilityError);
DSK_ERROR(MembershipError);
DSK_ERROR(NoConvergence);
DSK_ERROR(NoStabilization);

#undef DSK_ERROR

} // namespace dsk
