#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sve {

// A trajectory left the finite range (overflow / NaN); `step` is the first
// offending time index.
class numerical_error : public std::runtime_error {
public:
    numerical_error(std::string what, std::size_t step)
        : std::runtime_error(std::move(what)), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// Kernel compression could not be certified to the requested tolerance
// within the refinement budget.
class soe_build_error : public std::runtime_error {
public:
    soe_build_error(std::string what, double achieved, int terms)
        : std::runtime_error(std::move(what)), achieved_(achieved), terms_(terms) {}
    double achieved_error() const noexcept { return achieved_; }
    int terms() const noexcept { return terms_; }

private:
    double achieved_;
    int terms_;
};

} // namespace sve
