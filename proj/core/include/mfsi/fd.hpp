#pragma once
#include <array>
#include <vector>

namespace mfsi {

// Finite difference weights (Fornberg 1988): c[j*(m+1)+k] is the weight of
// node x[j] for the k-th derivative at z.
void fornberg(double z, const double* x, int n, int m, double* c);

// Weights for derivatives 0..m at z using the npts nodes nearest to z.
struct Stencil {
  int start = 0;
  int npts = 0;
  std::vector<double> w;  // w[j*(m+1)+k]
  int m = 0;
  double weight(int j, int k) const { return w[j * (m + 1) + k]; }
};
Stencil nearest_stencil(const std::vector<double>& nodes, double z, int npts, int m);

// Values on a tensor grid, differentiated by tensor-product Fornberg stencils
// (4 nodes per direction, boundary values included in the node set).
class TensorField {
public:
  TensorField() = default;
  TensorField(std::vector<double> xs, std::vector<double> zs);
  double& at(int ix, int iz) { return v_[iz * xs_.size() + ix]; }
  double at(int ix, int iz) const { return v_[iz * xs_.size() + ix]; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& zs() const { return zs_; }

  // value, d/dx, d/dz, d2/dx2, d2/dxdz, d2/dz2
  std::array<double, 6> derivs(double x, double z) const;

private:
  std::vector<double> xs_, zs_, v_;
};

}  // namespace mfsi
