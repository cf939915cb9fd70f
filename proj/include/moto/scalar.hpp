#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace moto {

// Exact backend scalar. All values constructed through the helpers below are
// canonical (reduced, positive denominator); arithmetic preserves that.
using Rat = mpq_class;

// Shared relative tolerance for the binary64 backend. Every equality decision
// in the library goes through approx_eq; ordering comparisons stay raw.
inline constexpr double kFloatEps = 1e-9;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& msg) : Error(msg) {}
};

inline Rat rat(long num, long den = 1) {
  if (den == 0) throw DomainError("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat rat_pow2(long e) {
  // 2^e for possibly large |e| (midpoint floor lengths reach 2^-W).
  Rat r(1);
  if (e >= 0)
    mpz_ui_pow_ui(mpq_numref(r.get_mpq_t()), 2, static_cast<unsigned long>(e));
  else
    mpz_ui_pow_ui(mpq_denref(r.get_mpq_t()), 2, static_cast<unsigned long>(-e));
  return r;
}

// Accepts "p/q", integer, and plain decimal literals ("-3.25", "1e3" is not
// accepted: exponents are not part of the instance grammar).
inline Rat parse_rat(const std::string& text) {
  if (text.empty()) throw InvalidInput("empty number literal");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    Rat r;
    if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0)
      throw InvalidInput("bad rational literal '" + text + "'");
    if (mpz_sgn(mpq_denref(r.get_mpq_t())) == 0)
      throw InvalidInput("zero denominator in '" + text + "'");
    r.canonicalize();
    return r;
  }
  auto dot = text.find('.');
  std::string digits = text;
  long scale = 0;
  if (dot != std::string::npos) {
    digits = text.substr(0, dot) + text.substr(dot + 1);
    scale = static_cast<long>(text.size() - dot - 1);
    if (digits.empty() || digits == "-" || digits == "+")
      throw InvalidInput("bad decimal literal '" + text + "'");
  }
  for (size_t k = 0; k < digits.size(); ++k) {
    char c = digits[k];
    if ((c == '-' || c == '+') && k == 0) continue;
    if (c < '0' || c > '9') throw InvalidInput("bad number literal '" + text + "'");
  }
  Rat num;
  if (mpz_set_str(mpq_numref(num.get_mpq_t()), digits.c_str(), 10) != 0)
    throw InvalidInput("bad number literal '" + text + "'");
  if (scale > 0) {
    mpz_ui_pow_ui(mpq_denref(num.get_mpq_t()), 10, static_cast<unsigned long>(scale));
    num.canonicalize();
  }
  return num;
}

inline std::string format_rat(const Rat& r) { return r.get_str(); }

inline double to_double(const Rat& r) { return r.get_d(); }
inline double to_double(double x) { return x; }

// Exact conversion: every finite double is a dyadic rational.
inline Rat rat_from_scalar(double x) {
  Rat r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}
inline Rat rat_from_scalar(const Rat& x) { return x; }

inline bool approx_eq(const Rat& a, const Rat& b) { return a == b; }

inline bool approx_eq(double a, double b) {
  double m = std::fabs(a);
  double mb = std::fabs(b);
  if (mb > m) m = mb;
  if (m < 1.0) m = 1.0;
  return std::fabs(a - b) <= kFloatEps * m;
}

inline bool is_zero(const Rat& a) { return sgn(a) == 0; }
inline bool is_zero(double a) { return approx_eq(a, 0.0); }

inline Rat abs_of(const Rat& a) { return abs(a); }
inline double abs_of(double a) { return std::fabs(a); }

// Largest integer <= a/b; used by the uniform grid for cell addressing.
inline long floor_div(const Rat& a, const Rat& b) {
  Rat q = a / b;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), mpq_numref(q.get_mpq_t()), mpq_denref(q.get_mpq_t()));
  if (!fl.fits_slong_p()) throw DomainError("grid index out of range");
  return fl.get_si();
}

inline long floor_div(double a, double b) {
  double q = std::floor(a / b);
  if (!(q >= -1e18 && q <= 1e18)) throw DomainError("grid index out of range");
  return static_cast<long>(q);
}

template <class S>
struct ScalarName;
template <>
struct ScalarName<Rat> {
  static constexpr const char* value = "exact";
};
template <>
struct ScalarName<double> {
  static constexpr const char* value = "float";
};

}  // namespace moto
