#include "mfsi/fd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfsi {

void fornberg(double z, const double* x, int n, int m, double* c) {
  const int M1 = m + 1;
  std::fill(c, c + n * M1, 0.0);
  double c1 = 1.0, c4 = x[0] - z;
  c[0] = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i * M1 + k] = c1 * (k * c[(i - 1) * M1 + k - 1] - c5 * c[(i - 1) * M1 + k]) / c2;
        c[i * M1] = -c1 * c5 * c[(i - 1) * M1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j * M1 + k] = (c4 * c[j * M1 + k] - k * c[j * M1 + k - 1]) / c3;
      c[j * M1] = c4 * c[j * M1] / c3;
    }
    c1 = c2;
  }
}

Stencil nearest_stencil(const std::vector<double>& nodes, double z, int npts, int m) {
  const int n = static_cast<int>(nodes.size());
  if (n < npts) throw std::invalid_argument("nearest_stencil: too few nodes");
  // window of npts consecutive nodes minimising the largest distance to z
  int hi = static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), z) - nodes.begin());
  int start = std::clamp(hi - npts / 2, 0, n - npts);
  while (start > 0 && std::abs(nodes[start - 1] - z) < std::abs(nodes[start + npts - 1] - z)) --start;
  while (start + npts < n && std::abs(nodes[start + npts] - z) < std::abs(nodes[start] - z)) ++start;
  Stencil s;
  s.start = start;
  s.npts = npts;
  s.m = m;
  s.w.resize(npts * (m + 1));
  fornberg(z, nodes.data() + start, npts, m, s.w.data());
  return s;
}

TensorField::TensorField(std::vector<double> xs, std::vector<double> zs)
    : xs_(std::move(xs)), zs_(std::move(zs)), v_(xs_.size() * zs_.size(), 0.0) {}

std::array<double, 6> TensorField::derivs(double x, double z) const {
  Stencil sx = nearest_stencil(xs_, x, 4, 2), sz = nearest_stencil(zs_, z, 4, 2);
  std::array<double, 6> r{};
  for (int b = 0; b < 4; ++b) {
    double col[3] = {0, 0, 0};  // d^k/dx^k along row iz
    int iz = sz.start + b;
    for (int a = 0; a < 4; ++a) {
      double v = at(sx.start + a, iz);
      for (int k = 0; k < 3; ++k) col[k] += sx.weight(a, k) * v;
    }
    r[0] += sz.weight(b, 0) * col[0];
    r[1] += sz.weight(b, 0) * col[1];
    r[3] += sz.weight(b, 0) * col[2];
    r[2] += sz.weight(b, 1) * col[0];
    r[4] += sz.weight(b, 1) * col[1];
    r[5] += sz.weight(b, 2) * col[0];
  }
  return r;
}

}  // namespace mfsi
