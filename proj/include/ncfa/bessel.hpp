#pragma once

#include <vector>

namespace ncfa {

// Bessel function of the first kind, integer order.  Ascending series for
// small |x|, Miller backward recurrence with J0 + 2 sum J_{2k} = 1
// normalization otherwise.  Handles negative order/argument by symmetry.
double bessel_j(int n, double x);

// All orders 0..nmax at once (one backward recurrence pass); much cheaper
// than nmax+1 separate calls when filling representation matrices.
std::vector<double> bessel_j_array(int nmax, double x);

}  // namespace ncfa
