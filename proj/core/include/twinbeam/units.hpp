#pragma once

namespace twinbeam {

// Linear shot-noise-normalized power to decibels. Throws DomainError for
// non-positive input.
double to_db(double linear);

// Decibels to linear power ratio.
double from_db(double db) noexcept;

}  // namespace twinbeam
