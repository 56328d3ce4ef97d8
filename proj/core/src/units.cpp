#include "twinbeam/units.hpp"

#include <cmath>
#include <string>

#include "twinbeam/error.hpp"

namespace twinbeam {

double to_db(double linear) {
    if (!(linear > 0.0) || !std::isfinite(linear)) {
        throw DomainError("to_db: linear power must be positive and finite, got " +
                          std::to_string(linear));
    }
    return 10.0 * std::log10(linear);
}

double from_db(double db) noexcept { return std::pow(10.0, db / 10.0); }

}  // namespace twinbeam
