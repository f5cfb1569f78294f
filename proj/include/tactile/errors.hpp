#pragma once

#include <stdexcept>
#include <string>

namespace tactile {

// Base class for every typed failure the toolkit can raise. Pipelines catch
// these; anything else escaping is a bug.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Commanded probe target outside the region of interest.
class OutOfRoi : public Error {
public:
    explicit OutOfRoi(const std::string& msg) : Error(msg) {}
};

// No waypoint fits the requested grid spacing.
class DegenerateGrid : public Error {
public:
    explicit DegenerateGrid(const std::string& msg) : Error(msg) {}
};

// Acquisition never produced a frame inside the force window.
class NoContact : public Error {
public:
    explicit NoContact(const std::string& msg) : Error(msg) {}
};

// Fine interrogation found no region in a captured frame.
class LostTarget : public Error {
public:
    explicit LostTarget(const std::string& msg) : Error(msg) {}
};

// Fine interrogation exhausted its iteration budget.
class NonConvergent : public Error {
public:
    explicit NonConvergent(const std::string& msg) : Error(msg) {}
};

// Surface fit design matrix is rank deficient.
class RankDeficient : public Error {
public:
    explicit RankDeficient(const std::string& msg) : Error(msg) {}
};

// No frame of a sequence lies inside the force window.
class EmptyWindow : public Error {
public:
    explicit EmptyWindow(const std::string& msg) : Error(msg) {}
};

// A training loss went NaN/inf; carries the offending values.
class NonFiniteLoss : public Error {
public:
    explicit NonFiniteLoss(const std::string& msg) : Error(msg) {}
};

// Force span of a sequence too small to fit a deformation slope.
class DegenerateForceRange : public Error {
public:
    explicit DegenerateForceRange(const std::string& msg) : Error(msg) {}
};

// Deformation-index ratio with a zero denominator.
class DivisionByZeroDI : public Error {
public:
    explicit DivisionByZeroDI(const std::string& msg) : Error(msg) {}
};

// Bad configuration file or invalid parameter combination.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Unreadable or inconsistent persisted artifact.
class ArtifactError : public Error {
public:
    explicit ArtifactError(const std::string& msg) : Error(msg) {}
};

} // namespace tactile
