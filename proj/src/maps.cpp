#include "crlab/maps.hpp"

#include <random>

namespace crlab {

SmoothMap::SmoothMap(std::string label, std::vector<Poly> components, const AmbientLayout& L)
    : label_(std::move(label)), layout_(L), comp_(std::move(components)) {
  const int n = int(comp_.size());
  const int mc = layout_.mc;
  d1z_.resize(size_t(n) * mc);
  d1zb_.resize(size_t(n) * mc);
  d1t_.resize(n);
  d2zz_.resize(size_t(n) * mc * mc);
  d2zzb_.resize(size_t(n) * mc * mc);
  d2zbzb_.resize(size_t(n) * mc * mc);
  d2zt_.resize(size_t(n) * mc);
  d2zbt_.resize(size_t(n) * mc);
  d2tt_.resize(n);
  for (int al = 0; al < n; ++al) {
    for (int a = 0; a < mc; ++a) {
      d1z_[size_t(al) * mc + a] = comp_[al].dz(a);
      d1zb_[size_t(al) * mc + a] = comp_[al].dzb(a);
    }
    d1t_[al] = layout_.kr ? comp_[al].dt() : Poly(mc);
    for (int a = 0; a < mc; ++a) {
      for (int b = 0; b < mc; ++b) {
        d2zz_[(size_t(al) * mc + a) * mc + b] = d1z_[size_t(al) * mc + a].dz(b);
        d2zzb_[(size_t(al) * mc + a) * mc + b] = d1z_[size_t(al) * mc + a].dzb(b);
        d2zbzb_[(size_t(al) * mc + a) * mc + b] = d1zb_[size_t(al) * mc + a].dzb(b);
      }
      d2zt_[size_t(al) * mc + a] = layout_.kr ? d1z_[size_t(al) * mc + a].dt() : Poly(mc);
      d2zbt_[size_t(al) * mc + a] = layout_.kr ? d1zb_[size_t(al) * mc + a].dt() : Poly(mc);
    }
    d2tt_[al] = layout_.kr ? d1t_[al].dt() : Poly(mc);
  }
}

VectorXcd SmoothMap::value(const Point& p) const {
  const VectorXcd z = ambient_z(layout_, p);
  const double t = layout_.kr ? p.x[2 * layout_.mc] : 0.0;
  VectorXcd f(n());
  for (int al = 0; al < n(); ++al) f[al] = comp_[al].eval(z, t);
  return f;
}

MapPointData SmoothMap::at(const Point& p) const {
  const VectorXcd z = ambient_z(layout_, p);
  const double t = layout_.kr ? p.x[2 * layout_.mc] : 0.0;
  const int nn = n(), mc = layout_.mc;
  MapPointData d;
  d.f.resize(nn);
  d.fz.resize(nn, mc);
  d.fzb.resize(nn, mc);
  d.ft.resize(nn);
  d.fzz.assign(nn, MatrixXcd(mc, mc));
  d.fzzb.assign(nn, MatrixXcd(mc, mc));
  d.fzbzb.assign(nn, MatrixXcd(mc, mc));
  d.fzt.resize(nn, mc);
  d.fzbt.resize(nn, mc);
  d.ftt.resize(nn);
  for (int al = 0; al < nn; ++al) {
    d.f[al] = comp_[al].eval(z, t);
    d.ft[al] = d1t_[al].eval(z, t);
    d.ftt[al] = d2tt_[al].eval(z, t);
    for (int a = 0; a < mc; ++a) {
      d.fz(al, a) = d1z_[size_t(al) * mc + a].eval(z, t);
      d.fzb(al, a) = d1zb_[size_t(al) * mc + a].eval(z, t);
      d.fzt(al, a) = d2zt_[size_t(al) * mc + a].eval(z, t);
      d.fzbt(al, a) = d2zbt_[size_t(al) * mc + a].eval(z, t);
      for (int b = 0; b < mc; ++b) {
        d.fzz[al](a, b) = d2zz_[(size_t(al) * mc + a) * mc + b].eval(z, t);
        d.fzzb[al](a, b) = d2zzb_[(size_t(al) * mc + a) * mc + b].eval(z, t);
        d.fzbzb[al](a, b) = d2zbzb_[(size_t(al) * mc + a) * mc + b].eval(z, t);
      }
    }
  }
  return d;
}

cxd SmoothMap::partial(int alpha, const std::vector<int>& az, const std::vector<int>& ab, int at,
                       const Point& p) const {
  Poly q = comp_[alpha];
  for (int a = 0; a < layout_.mc; ++a) {
    for (int k = 0; k < (a < int(az.size()) ? az[a] : 0); ++k) q = q.dz(a);
    for (int k = 0; k < (a < int(ab.size()) ? ab[a] : 0); ++k) q = q.dzb(a);
  }
  for (int k = 0; k < at; ++k) q = q.dt();
  const VectorXcd z = ambient_z(layout_, p);
  const double t = layout_.kr ? p.x[2 * layout_.mc] : 0.0;
  return q.eval(z, t);
}

SmoothMap SmoothMap::conjugated() const {
  std::vector<Poly> c;
  c.reserve(comp_.size());
  for (const auto& q : comp_) c.push_back(q.conjugate());
  return SmoothMap(label_ + "-conj", std::move(c), layout_);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Poly> random_polynomial(const AmbientLayout& L, int n, int degree, double scale,
                                    uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> pick_var(0, 2 * L.mc + L.kr - 1);
  std::vector<Poly> comps;
  for (int al = 0; al < n; ++al) {
    Poly q(L.mc);
    const int nterms = 4;
    for (int t = 0; t < nterms; ++t) {
      std::vector<uint8_t> az(L.mc, 0), ab(L.mc, 0);
      uint8_t at = 0;
      const int deg = 1 + int(rng() % uint64_t(degree));
      for (int d = 0; d < deg; ++d) {
        const int v = pick_var(rng);
        if (v < L.mc)
          az[v]++;
        else if (v < 2 * L.mc)
          ab[v - L.mc]++;
        else
          at++;
      }
      const cxd c = scale * cxd(u(rng), u(rng)) / double(nterms);
      q = q + Poly::monomial(L.mc, c, az, ab, at);
    }
    // one guaranteed mixed monomial: purely holomorphic plus purely
    // antiholomorphic draws are CR-pluriharmonic, which would make the
    // "generic map" fixtures degenerate
    {
      std::vector<uint8_t> az(L.mc, 0), ab(L.mc, 0);
      az[size_t(al % L.mc)] = 1;
      ab[size_t((al + 1) % L.mc)] = 1;
      q = q + Poly::monomial(L.mc, scale * cxd(u(rng), u(rng)), az, ab, 0);
    }
    comps.push_back(q);
  }
  return comps;
}

}  // namespace

SmoothMap make_map(const MapSpec& spec, const AmbientLayout& L, int n) {
  const int mc = L.mc;
  if (spec.name == "constant") {
    std::vector<Poly> c;
    for (int al = 0; al < n; ++al) c.push_back(Poly::constant(mc, cxd(0.1 * (al + 1), 0.0)));
    return SmoothMap("constant", std::move(c), L);
  }
  if (spec.name == "cr-inclusion") {
    if (n != mc)
      throw ConfigError("cr-inclusion needs target dimension equal to the ambient complex dimension");
    std::vector<Poly> c;
    for (int al = 0; al < n; ++al) c.push_back(Poly::coordinate(mc, al) * cxd(spec.r));
    return SmoothMap("cr-inclusion", std::move(c), L);
  }
  if (spec.name == "anti-cr") {
    if (n != mc)
      throw ConfigError("anti-cr needs target dimension equal to the ambient complex dimension");
    std::vector<Poly> c;
    for (int al = 0; al < n; ++al) c.push_back(Poly::coordinate_bar(mc, al) * cxd(spec.r));
    return SmoothMap("anti-cr", std::move(c), L);
  }
  if (spec.name == "perturbed-cr") {
    if (n > mc) throw ConfigError("perturbed-cr needs target dimension at most the ambient one");
    std::vector<Poly> c;
    for (int al = 0; al < n; ++al) {
      Poly q = Poly::coordinate(mc, al) * cxd(spec.r);
      // conjugate-direction perturbation on the first component
      if (al == 0) q = q + Poly::coordinate_bar(mc, (al + 1) % mc) * cxd(spec.r * spec.eps);
      c.push_back(q);
    }
    return SmoothMap("perturbed-cr", std::move(c), L);
  }
  if (spec.name == "polynomial") {
    return SmoothMap("polynomial", random_polynomial(L, n, spec.degree, spec.scale, spec.seed), L);
  }
  if (spec.name == "re-cr") {
    // real parts of CR coordinate functions: z_al + zbar_al, scaled
    if (n > mc) throw ConfigError("re-cr needs target dimension at most the ambient one");
    std::vector<Poly> c;
    for (int al = 0; al < n; ++al)
      c.push_back((Poly::coordinate(mc, al) + Poly::coordinate_bar(mc, al)) * cxd(spec.r));
    return SmoothMap("re-cr", std::move(c), L);
  }
  if (spec.name == "custom") {
    if (int(spec.custom.size()) != n) throw ConfigError("custom map component count mismatch");
    return SmoothMap("custom", spec.custom, L);
  }
  throw ConfigError("unknown map name: " + spec.name);
}

}  // namespace crlab
