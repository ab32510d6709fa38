#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace thermo {

// Every failure the library reports derives from Error so callers (and the
// CLI exit-code mapping) can catch a single type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define THERMO_DECLARE_ERROR(Name)                                  \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    const char* kind() const noexcept override { return #Name; }   \
  };

THERMO_DECLARE_ERROR(NotReversible)
THERMO_DECLARE_ERROR(MalformedConfig)
THERMO_DECLARE_ERROR(LayoutError)
THERMO_DECLARE_ERROR(OrbitBudgetExceeded)
THERMO_DECLARE_ERROR(ParseError)
THERMO_DECLARE_ERROR(BudgetExceeded)
THERMO_DECLARE_ERROR(DimensionMismatch)
THERMO_DECLARE_ERROR(WrongOrbitKind)
THERMO_DECLARE_ERROR(EnergyOutOfRange)
THERMO_DECLARE_ERROR(BetaOverflow)
THERMO_DECLARE_ERROR(SymmetryViolation)
THERMO_DECLARE_ERROR(DegenerateDenominator)
THERMO_DECLARE_ERROR(SpectrumOutOfRange)
THERMO_DECLARE_ERROR(NormTooLarge)
THERMO_DECLARE_ERROR(PolyNotSubnormalized)
THERMO_DECLARE_ERROR(ZeroProbability)
THERMO_DECLARE_ERROR(PromiseUnknown)
THERMO_DECLARE_ERROR(ScheduleInvalid)
THERMO_DECLARE_ERROR(WidthBelowBudget)
THERMO_DECLARE_ERROR(TauTooSmall)
THERMO_DECLARE_ERROR(InvalidArgument)

#undef THERMO_DECLARE_ERROR

// Tolerance hierarchy: construction identities, analytic-versus-numeric
// agreement, and claims about physics are held to different standards.
struct Tolerances {
  double construction = 1e-12;
  double analytic = 1e-10;
  double physics = 1e-8;
};

// Configurable resource caps shared by the modules.
struct Budgets {
  std::int64_t dense_dimension = 20000;
  std::int64_t max_orbit_steps = 0;  // 0 means "derive from d^N"
  double prep_tries = 1e30;          // worst-case postselection tries accepted
  std::int64_t max_shots = 0;        // 0 means no cap on sampled shots
};

// Rational number used for the M-cell fraction alpha.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  static Rational parse(const std::string& text);
};

}  // namespace thermo
