// Smooth maps f: M -> N given by polynomial components in the ambient
// coordinates, with exact partial derivatives. A small registry builds the
// named test maps used by the experiments.
#pragma once

#include <optional>

#include "crlab/poly.hpp"
#include "crlab/types.hpp"

namespace crlab {

// All ambient partials of the components at one point, through second order.
struct MapPointData {
  VectorXcd f;        // n
  MatrixXcd fz, fzb;  // n x mc
  VectorXcd ft;       // n
  std::vector<MatrixXcd> fzz, fzzb, fzbzb;  // [alpha](a,b); fzzb(a,b) = d_{z_a} d_{zbar_b}
  MatrixXcd fzt, fzbt;                      // n x mc
  VectorXcd ftt;                            // n
};

class SmoothMap {
 public:
  SmoothMap() = default;
  SmoothMap(std::string label, std::vector<Poly> components, const AmbientLayout& L);

  int n() const { return int(comp_.size()); }
  const std::string& label() const { return label_; }
  const std::vector<Poly>& components() const { return comp_; }
  const AmbientLayout& layout() const { return layout_; }

  VectorXcd value(const Point& p) const;
  MapPointData at(const Point& p) const;

  // exact ambient partial of component alpha: order-(az, ab, at) Wirtinger
  // derivative, used by the derivative-consistency tests
  cxd partial(int alpha, const std::vector<int>& az, const std::vector<int>& ab, int at,
              const Point& p) const;

  SmoothMap conjugated() const;

 private:
  std::string label_;
  AmbientLayout layout_;
  std::vector<Poly> comp_;
  std::vector<Poly> d1z_, d1zb_, d1t_;                 // [alpha * mc + a], [alpha]
  std::vector<Poly> d2zz_, d2zzb_, d2zbzb_;            // [(alpha * mc + a) * mc + b]
  std::vector<Poly> d2zt_, d2zbt_, d2tt_;              // [alpha * mc + a], [alpha]
};

struct MapSpec {
  std::string name;           // constant | cr-inclusion | anti-cr | polynomial | perturbed-cr | custom
  double r = 0.5;             // scale of the inclusion-type maps
  double eps = 0.1;           // perturbation size
  double scale = 0.2;         // coefficient scale of random polynomial maps
  uint64_t seed = 1;          // seed of random polynomial maps
  int degree = 2;             // total degree of random polynomial maps
  std::vector<Poly> custom;   // used when name == "custom"
};

// Builds a named map with n components on the given ambient layout.
SmoothMap make_map(const MapSpec& spec, const AmbientLayout& L, int n);

}  // namespace crlab
