#pragma once

#include <cmath>
#include <complex>

namespace resonance {

/// Neumaier's variant of Kahan summation. Unlike plain Kahan it stays exact
/// when an addend is larger in magnitude than the running sum.
struct compensated_sum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double value) {
    const double t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      compensation += (sum - t) + value;
    } else {
      compensation += (value - t) + sum;
    }
    sum = t;
  }

  compensated_sum& operator+=(double value) {
    add(value);
    return *this;
  }

  double value() const { return sum + compensation; }
};

struct compensated_complex_sum {
  compensated_sum re;
  compensated_sum im;

  compensated_complex_sum& operator+=(std::complex<double> value) {
    re.add(value.real());
    im.add(value.imag());
    return *this;
  }

  std::complex<double> value() const { return {re.value(), im.value()}; }
};

}  // namespace resonance
