// Central finite differences of pointwise fields along (complexified)
// ambient directions, with one optional Richardson extrapolation level.
#pragma once

#include <functional>
#include <type_traits>

#include "crlab/types.hpp"

namespace crlab {

// Derivative of F along the *real* vector v at step h:
//   (F(p + h v) - F(p - h v)) / (2h), Richardson-combined when enabled.
template <class F>
auto fd_real_dir(const AmbientLayout& L, const F& f, const Point& p, const CVec& v, double h,
                 bool richardson) {
  using T = std::decay_t<decltype(f(p))>;
  auto d = [&](double s) -> T {
    T a = f(displace(L, p, v, s));
    T b = f(displace(L, p, v, -s));
    return T((a - b) * (1.0 / (2.0 * s)));
  };
  T dh = d(h);
  if (!richardson) return dh;
  T dh2 = d(h / 2.0);
  return T((dh2 * 4.0 - dh) * (1.0 / 3.0));
}

// Derivative along a complexified direction V = X + iY with X, Y real.
template <class F>
auto fd_dir(const AmbientLayout& L, const F& f, const Point& p, const CVec& V, double h,
            bool richardson) {
  using T = std::decay_t<decltype(f(p))>;
  const CVec Vc = V.conj();
  const CVec X = (V + Vc) * cxd(0.5, 0.0);
  const CVec Y = (V - Vc) * cxd(0.0, -0.5);
  T dx = fd_real_dir(L, f, p, X, h, richardson);
  if (Y.norm() < 1e-300) return dx;
  T dy = fd_real_dir(L, f, p, Y, h, richardson);
  return T(dx + dy * I);
}

using ScalarField = std::function<cxd(const Point&)>;

}  // namespace crlab
