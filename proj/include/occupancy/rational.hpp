#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace occupancy {

/// Exact rational number num/den with den > 0, always stored in lowest terms.
///
/// Energies and the energy cap are kept as rationals so the cap
/// `sum(q * e_i * N_i) <= q * E * N` can be evaluated in integer arithmetic.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Parses "p/q", an integer "-3", or a finite decimal "1.25" / "-0.4".
  static Rational parse(std::string_view text);

  /// Exact rational of the shortest decimal string that round-trips `value`,
  /// so 1.4 becomes 7/5 rather than the binary expansion of 1.4.
  static Rational from_double(double value);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::int64_t lcm_checked(std::int64_t a, std::int64_t b);

}  // namespace occupancy
