#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qca {

// Every engine failure carries a stable name so the CLI can surface it on
// stderr and map it to a nonzero exit code.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

struct SingularIntegral : Error {
    explicit SingularIntegral(const std::string& what) : Error("SingularIntegral", what) {}
};

struct SingularReduction : Error {
    explicit SingularReduction(const std::string& what) : Error("SingularReduction", what) {}
};

struct CausticError : Error {
    explicit CausticError(const std::string& what) : Error("CausticError", what) {}
};

struct BoundaryError : Error {
    explicit BoundaryError(const std::string& what) : Error("BoundaryError", what) {}
};

struct EmptyHistory : Error {
    explicit EmptyHistory(const std::string& what) : Error("EmptyHistory", what) {}
};

struct EnumerationBudgetExceeded : Error {
    EnumerationBudgetExceeded(double required, double budget)
        : Error("EnumerationBudgetExceeded",
                "requires " + std::to_string(required) + " configurations, budget is " +
                    std::to_string(budget)),
          required_count(required) {}
    double required_count;
};

struct GeneratorBudgetExceeded : Error {
    explicit GeneratorBudgetExceeded(const std::string& what)
        : Error("GeneratorBudgetExceeded", what) {}
};

struct DimensionBudgetExceeded : Error {
    explicit DimensionBudgetExceeded(const std::string& what)
        : Error("DimensionBudgetExceeded", what) {}
};

struct HermiticityError : Error {
    explicit HermiticityError(const std::string& what) : Error("HermiticityError", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("ConfigError", what) {}
};

}  // namespace qca
