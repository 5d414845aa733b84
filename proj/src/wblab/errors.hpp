#pragma once

#include <stdexcept>
#include <string>

namespace wblab {

// Quadrature failures, NaN/Inf propagation, ill-conditioned solves.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// The time solver reached step underflow without crossing the blow-up threshold.
class no_blowup_error : public numeric_error {
public:
    explicit no_blowup_error(const std::string& what) : numeric_error(what) {}
};

// An evolution left the bounded regime; carries the last good sample index.
class divergence_error : public numeric_error {
public:
    divergence_error(const std::string& what, std::size_t last_good)
        : numeric_error(what), last_good_sample(last_good) {}
    std::size_t last_good_sample;
};

// Orthogonality root solve lost its bracket (departure from the trapped regime).
class modulation_error : public std::runtime_error {
public:
    explicit modulation_error(const std::string& what) : std::runtime_error(what) {}
};

// |d| ran into the open-interval boundary during a root solve.
class parameter_saturation_error : public modulation_error {
public:
    explicit parameter_saturation_error(const std::string& what) : modulation_error(what) {}
};

// The quadratic form went genuinely negative on a projected remainder.
class coercivity_error : public numeric_error {
public:
    explicit coercivity_error(const std::string& what) : numeric_error(what) {}
};

// Rate fitting rejected the data (sign change, non-decaying tail, ...).
class fit_error : public std::runtime_error {
public:
    explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

// Requested quantity is identically degenerate for this configuration.
class not_applicable_error : public std::logic_error {
public:
    explicit not_applicable_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace wblab
