// Polynomials in ambient coordinates (z, zbar, t) with exact Wirtinger
// derivatives. These back the map components, conformal factors and the
// test oracles, so every derivative used in the calculus is closed form.
#pragma once

#include <algorithm>
#include <cstdint>

#include "crlab/types.hpp"

namespace crlab {

struct PolyTerm {
  cxd c{0.0, 0.0};
  std::vector<uint8_t> az;  // exponents of z_a
  std::vector<uint8_t> ab;  // exponents of zbar_a
  uint8_t at = 0;           // exponent of the real coordinate t (kr == 1)
};

class Poly {
 public:
  int nz = 0;  // number of complex variables
  std::vector<PolyTerm> terms;

  Poly() = default;
  explicit Poly(int nvars) : nz(nvars) {}

  static Poly constant(int nvars, cxd c) {
    Poly p(nvars);
    if (c != cxd(0)) p.terms.push_back({c, std::vector<uint8_t>(nvars, 0), std::vector<uint8_t>(nvars, 0), 0});
    return p;
  }
  // monomial c * z^az * zbar^ab * t^at
  static Poly monomial(int nvars, cxd c, std::vector<uint8_t> az, std::vector<uint8_t> ab, uint8_t at = 0) {
    Poly p(nvars);
    az.resize(nvars, 0);
    ab.resize(nvars, 0);
    if (c != cxd(0)) p.terms.push_back({c, std::move(az), std::move(ab), at});
    return p;
  }
  static Poly coordinate(int nvars, int a) {
    std::vector<uint8_t> e(nvars, 0);
    e[a] = 1;
    return monomial(nvars, cxd(1), e, std::vector<uint8_t>(nvars, 0));
  }
  static Poly coordinate_bar(int nvars, int a) {
    std::vector<uint8_t> e(nvars, 0);
    e[a] = 1;
    return monomial(nvars, cxd(1), std::vector<uint8_t>(nvars, 0), e);
  }

  cxd eval(const VectorXcd& z, double t = 0.0) const {
    cxd s(0);
    for (const auto& m : terms) {
      cxd v = m.c;
      for (int a = 0; a < nz; ++a) {
        for (int k = 0; k < m.az[a]; ++k) v *= z[a];
        for (int k = 0; k < m.ab[a]; ++k) v *= std::conj(z[a]);
      }
      for (int k = 0; k < m.at; ++k) v *= t;
      s += v;
    }
    return s;
  }

  Poly dz(int a) const {
    Poly r(nz);
    for (const auto& m : terms)
      if (m.az[a] > 0) {
        PolyTerm t = m;
        t.c *= double(m.az[a]);
        t.az[a] -= 1;
        r.terms.push_back(std::move(t));
      }
    return r;
  }
  Poly dzb(int a) const {
    Poly r(nz);
    for (const auto& m : terms)
      if (m.ab[a] > 0) {
        PolyTerm t = m;
        t.c *= double(m.ab[a]);
        t.ab[a] -= 1;
        r.terms.push_back(std::move(t));
      }
    return r;
  }
  Poly dt() const {
    Poly r(nz);
    for (const auto& m : terms)
      if (m.at > 0) {
        PolyTerm t = m;
        t.c *= double(m.at);
        t.at -= 1;
        r.terms.push_back(std::move(t));
      }
    return r;
  }

  Poly conjugate() const {
    Poly r(nz);
    for (const auto& m : terms) r.terms.push_back({std::conj(m.c), m.ab, m.az, m.at});
    return r;
  }

  Poly operator+(const Poly& o) const {
    Poly r = *this;
    r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
    return r;
  }
  Poly operator*(cxd s) const {
    Poly r = *this;
    for (auto& m : r.terms) m.c *= s;
    return r;
  }
  Poly operator*(const Poly& o) const {
    Poly r(nz);
    for (const auto& a : terms)
      for (const auto& b : o.terms) {
        PolyTerm t;
        t.c = a.c * b.c;
        t.az.resize(nz);
        t.ab.resize(nz);
        for (int k = 0; k < nz; ++k) {
          t.az[k] = uint8_t(a.az[k] + b.az[k]);
          t.ab[k] = uint8_t(a.ab[k] + b.ab[k]);
        }
        t.at = uint8_t(a.at + b.at);
        r.terms.push_back(std::move(t));
      }
    return r;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& m : terms) {
      int s = m.at;
      for (int a = 0; a < nz; ++a) s += m.az[a] + m.ab[a];
      d = std::max(d, s);
    }
    return d;
  }
};

}  // namespace crlab
