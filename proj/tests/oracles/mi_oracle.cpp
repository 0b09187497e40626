#include <algorithm>
#include <cmath>

#include "oracles.hpp"

namespace gamecat::oracle {
namespace {

__extension__ typedef __float128 Quad;

// lo + b (hi - lo) / bins <= x, decided without rounding for double inputs.
bool above_edge(double x, double lo, double hi, int bins, int b) {
  return static_cast<Quad>(bins) * (static_cast<Quad>(x) - lo) >=
         static_cast<Quad>(b) * (static_cast<Quad>(hi) - lo);
}

bool in_bin(double x, double lo, double hi, int bins, int b) {
  if (!(hi > lo)) return b == 0;
  if (!above_edge(x, lo, hi, bins, b)) return false;
  if (b == bins - 1) return true;
  return !above_edge(x, lo, hi, bins, b + 1);
}

}  // namespace

double brute_force_mi(std::span<const double> x, std::span<const std::uint8_t> y, int bins) {
  double lo = x[0], hi = x[0];
  for (double v : x) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double n = static_cast<double>(x.size());
  std::vector<double> cell(static_cast<std::size_t>(bins) * 2, 0.0);
  for (int b = 0; b < bins; ++b) {
    for (int c = 0; c < 2; ++c) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if ((y[i] != 0) == (c == 1) && in_bin(x[i], lo, hi, bins, b)) {
          cell[static_cast<std::size_t>(b) * 2 + static_cast<std::size_t>(c)] += 1.0;
        }
      }
    }
  }
  double mi = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double pb = (cell[static_cast<std::size_t>(b) * 2] +
                       cell[static_cast<std::size_t>(b) * 2 + 1]) / n;
    for (int c = 0; c < 2; ++c) {
      double pc = 0.0;
      for (int bb = 0; bb < bins; ++bb) {
        pc += cell[static_cast<std::size_t>(bb) * 2 + static_cast<std::size_t>(c)];
      }
      pc /= n;
      const double pbc = cell[static_cast<std::size_t>(b) * 2 + static_cast<std::size_t>(c)] / n;
      if (pbc > 0.0) mi += pbc * std::log2(pbc / (pb * pc));
    }
  }
  return mi;
}

}  // namespace gamecat::oracle
