#include "ncfa/bessel.hpp"

#include <cmath>
#include <cstdlib>

namespace ncfa {
namespace {

double series_j(int n, double x) {
  // sum_k (-1)^k (x/2)^{n+2k} / (k! (n+k)!), n >= 0
  double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half / k;  // (x/2)^n / n!
  double sum = term;
  double q = -half * half;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (n + k));
    sum += term;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
  }
  return sum;
}

// Backward (Miller) recurrence, filling orders 0..nmax for x > 0.
std::vector<double> miller_j(int nmax, double x) {
  int start = nmax + static_cast<int>(std::ceil(x)) + 36;
  if (start % 2) ++start;
  std::vector<double> out(nmax + 1, 0.0);
  double fp = 0.0, f = 1e-30, norm = 0.0;
  for (int k = start; k >= 1; --k) {
    double fm = (2.0 * k / x) * f - fp;
    fp = f;
    f = fm;
    if (k - 1 <= nmax) out[k - 1] = f;
    if ((k - 1) % 2 == 0) norm += (k == 1 ? 1.0 : 2.0) * f;
    if (std::abs(f) > 1e250) {
      f *= 1e-250;
      fp *= 1e-250;
      norm *= 1e-250;
      for (double& v : out) v *= 1e-250;
    }
  }
  for (double& v : out) v /= norm;
  return out;
}

}  // namespace

std::vector<double> bessel_j_array(int nmax, double x) {
  std::vector<double> out(nmax + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  double ax = std::abs(x);
  if (ax <= 12.0) {
    for (int n = 0; n <= nmax; ++n) out[n] = series_j(n, ax);
  } else {
    out = miller_j(nmax, ax);
  }
  if (x < 0.0)
    for (int n = 1; n <= nmax; n += 2) out[n] = -out[n];
  return out;
}

double bessel_j(int n, double x) {
  int an = std::abs(n);
  double sign = 1.0;
  if (n < 0 && an % 2) sign = -sign;       // J_{-n} = (-1)^n J_n
  if (x < 0.0 && an % 2) sign = -sign;     // J_n(-x) = (-1)^n J_n(x)
  double ax = std::abs(x);
  if (ax == 0.0) return an == 0 ? 1.0 : 0.0;
  if (ax <= 12.0) return sign * series_j(an, ax);
  return sign * miller_j(an, ax)[an];
}

}  // namespace ncfa
