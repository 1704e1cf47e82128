#include "hpsurf/landscape.hpp"

#include "hpsurf/roots.hpp"

#include <algorithm>
#include <queue>
#include <utility>

namespace hpsurf {

namespace {

// Straight cut-free polyline from the base point to z.  Cuts are real
// segments plus, in the disjoint-interval configuration, the imaginary axis
// beyond +-ic; staying in one open half plane (and on one side of the
// imaginary axis when it carries a cut) avoids them all.  A target on a cut
// is reached by a final perpendicular descent, so the tracked labels stay
// the sheet labels all the way and the endpoint value is the boundary limit
// from the approach side.
void route_from_base(const CurveParams& cp, const Real& x0, const Real& c,
                     const Cplx& z, Contour& ct) {
    const bool axis_cut = cp.case_id == CaseId::I;
    // Safe cruising height: keeps routes clear of the real-axis branch points
    // and, when the imaginary axis carries a cut, below its tips at +-ic.
    const Real hs = axis_cut ? (std::min)(Real(c / 2), Real(Real(1) / 4)) : Real(1) / 4;
    Cplx start = ct.segments.empty() ? Cplx(x0) : ct.end();
    if (z.im == 0) {
        if (z.re > Real(1)) {
            ct.add_line(start, z);
            return;
        }
        Cplx w(z.re, hs);
        route_from_base(cp, x0, c, w, ct);
        ct.add_line(w, z);
        return;
    }
    Real s = z.im > 0 ? Real(1) : Real(-1);
    Real ay = abs(z.im);
    if (z.re > Real(1)) {
        // the quadrant right of all cuts is free
        ct.add_line(start, z);
        return;
    }
    if (ay < hs) {
        // near-axis target: cruise at the safe height above/below it, then
        // descend vertically (the approach side is preserved)
        Cplx w(z.re, s * hs);
        route_from_base(cp, x0, c, w, ct);
        ct.add_line(w, z);
        return;
    }
    if (axis_cut && z.re < 0) {
        Cplx q(Real(0), s * hs);
        ct.add_line(start, q);
        ct.add_line(q, z);
        return;
    }
    ct.add_line(start, z);
}

struct ProbeResult {
    BranchTriple t;
    std::array<Real, 3> N;
};

ProbeResult probe(const Landscape& ls, const Cplx& z) {
    ProbeResult pr;
    if (abs(z - Cplx(ls.x0)) < Real("1e-35")) {
        pr.t = ls.base;
        pr.N = ls.C;
        return pr;
    }
    Contour ct;
    route_from_base(ls.cp, ls.x0, ls.bp.c, z, ct);
    TransportResult tr = transport(ls.cp, ls.base, ct, ls.tol);
    pr.t = tr.end;
    for (int k = 0; k < 3; ++k) pr.N[k] = ls.C[k] + tr.integrals[k].re;
    return pr;
}

// Continue an already-probed state along a short segment, accumulating N.
void advance(const Landscape& ls, ProbeResult& cur, const Cplx& to) {
    if (abs(to - cur.t.z) < Real("1e-35")) return;
    TransportResult tr = transport(ls.cp, cur.t, Contour::segment(cur.t.z, to), ls.tol);
    cur.t = tr.end;
    for (int k = 0; k < 3; ++k) cur.N[k] += tr.integrals[k].re;
}

Cplx leg_value(const CurveParams& cp, const Cplx& z0, const Cplx& z1, int label,
               int m0, int m1, const Cplx& app, const Real& tol) {
    CycleLeg leg;
    leg.z0 = z0;
    leg.z1 = z1;
    leg.label = label;
    leg.m0 = m0;
    leg.m1 = m1;
    leg.approach = app;
    return leg_integral(cp, leg, tol);
}

// Sheet values at a branch point: probe a nearby regular point off the cut,
// then integrate each germ into the point with the endpoint substitution of
// its branching order.
std::array<Real, 3> n_at_branch(const Landscape& ls, const Cplx& E) {
    Real d = Real(1) / 2;
    for (const Cplx& F : ls.bp.points) {
        Real df = abs(E - F);
        if (df > Real("1e-30")) d = (std::min)(d, df);
    }
    Real t = d / 4;
    if (ls.cp.case_id == CaseId::I) {
        Real half_c = ls.bp.c / 2;
        t = (std::min)(t, half_c);
    }
    Cplx w = (abs(E.im) > Real("1e-30")) ? E + Cplx(t) : E + Cplx(Real(0), t);
    ProbeResult pw = probe(ls, w);

    std::array<int, 3> m{1, 1, 1};
    if (ls.cp.case_id == CaseId::II && abs(abs(E) - ls.cp.a) < Real("1e-20")) {
        m = {3, 3, 3};  // all three sheets meet at the order-3 points
    } else if (abs(ls.cp.A(E)) < Real("1e-30")) {
        // hard point: the two germs of the exchanged pair blow up like
        // (z - E)^{-1/2}, so they are the two largest values nearby
        int small = 0;
        for (int k = 1; k < 3; ++k)
            if (abs(pw.t.h[k]) < abs(pw.t.h[small])) small = k;
        for (int k = 0; k < 3; ++k)
            if (k != small) m[k] = 2;
    } else {
        // soft point: the exchanged pair merges, so it is the closest pair
        int bi = 0, bj = 1;
        Real best = abs(pw.t.h[0] - pw.t.h[1]);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                Real dij = abs(pw.t.h[i] - pw.t.h[j]);
                if (dij < best) {
                    best = dij;
                    bi = i;
                    bj = j;
                }
            }
        m[bi] = m[bj] = 2;
    }
    std::array<Real, 3> N;
    for (int k = 0; k < 3; ++k)
        N[k] = pw.N[k] + leg_value(ls.cp, w, E, k, 1, m[k], w, ls.tol).re;
    return N;
}

RegionLabel label_from(const std::array<Real, 3>& N, const Real& band) {
    RegionLabel lab;
    lab.order = {0, 1, 2};
    std::sort(lab.order.begin(), lab.order.end(),
              [&](int i, int j) { return N[i] > N[j]; });
    lab.gamma = N[lab.order[0]] - N[lab.order[1]] < band;
    return lab;
}

}  // namespace

Landscape make_landscape(const CurveParams& cp, const Real& tol) {
    Landscape ls;
    ls.cp = cp;
    ls.bp = branch_points(cp);
    ls.tol = tol;
    ls.x0 = default_base_point(cp);
    ls.base = base_triple(cp);

    Cplx x0c(ls.x0);
    Cplx one(Real(1));
    Cplx midr = (x0c + one) / Cplx(Real(2));

    // N is continuous through the branch points gluing the sheets, which
    // pins the offsets of N_1 and N_2 relative to N_0.  Sheets 0 and 2 glue
    // at z = 1; sheets 0 and 1 at the right endpoint of the soft interval.
    Cplx d2 = leg_value(cp, x0c, one, 0, 1, 2, midr, tol) +
              leg_value(cp, one, x0c, 2, 2, 1, midr, tol);

    Real e1 = cp.case_id == CaseId::I ? cp.a : ls.bp.b;
    int me = cp.case_id == CaseId::II ? 3 : 2;
    Cplx w(e1, Real(1) / 4);
    Cplx e1c(e1);
    Cplx d1 = leg_value(cp, x0c, w, 0, 1, 1, (x0c + w) / Cplx(Real(2)), tol) +
              leg_value(cp, w, e1c, 0, 1, me, w, tol) +
              leg_value(cp, e1c, w, 1, me, 1, w, tol) +
              leg_value(cp, w, x0c, 1, 1, 1, (x0c + w) / Cplx(Real(2)), tol);

    Real S = d1.re + d2.re;  // offset of sheet 0 is zero before recentering
    ls.C = {-S / 3, d1.re - S / 3, d2.re - S / 3};
    return ls;
}

std::array<Real, 3> n_values(const Landscape& ls, const Cplx& z) {
    for (const Cplx& E : ls.bp.points)
        if (abs(z - E) < Real("1e-12")) return n_at_branch(ls, E);
    return probe(ls, z).N;
}

RegionLabel classify(const Landscape& ls, const Cplx& z, const Real& band) {
    return label_from(n_values(ls, z), band);
}

std::string label_name(const RegionLabel& lab) {
    if (lab.gamma) return "Gamma";
    std::string s = "Omega_";
    for (int k : lab.order) s += char('0' + k);
    return s;
}

Real find_xa(const Landscape& ls) {
    if (ls.cp.case_id != CaseId::I)
        throw NoBracket("triple point exists only for disjoint hard intervals");
    auto f = [&](const Real& x) -> Real {
        std::array<Real, 3> N = n_values(ls, Cplx(x));
        Real d = N[0] - N[2];
        return d;
    };
    Real lo = ls.cp.a / 100;
    Real hi = ls.cp.a * (1 - Real("1e-4"));
    Real flo = f(lo), fhi = f(hi);
    if (!(flo > 0 && fhi < 0) && !(flo < 0 && fhi > 0))
        throw NoBracket("no sign change of N_0 - N_2 on the soft interval");
    Real rtol = (std::max)(ls.tol, Real("1e-30"));
    return find_root(f, lo, hi, rtol);
}

LevelCurve trace_gamma(const Landscape& ls, int i, int j, const Cplx& seed,
                       const Cplx& direction, const TraceOptions& opt) {
    LevelCurve out;
    out.i = i;
    out.j = j;
    out.seed = seed;
    out.points.push_back(seed);

    Cplx dir = direction / Cplx(abs(direction));
    // the first point must sit inside the region where the level set still
    // looks like straight rays from the seed, which can be much smaller
    // than one step when other branch points crowd the seed
    Real r0 = opt.step;
    auto shrink_r0 = [&](const Cplx& tgt) {
        Real d = abs(tgt - seed);
        if (d > Real("1e-30")) r0 = (std::min)(r0, Real(d / 8));
    };
    for (const Cplx& E : ls.bp.points) shrink_r0(E);
    for (const Cplx& sp : opt.stop_points) shrink_r0(sp);
    ProbeResult cur = probe(ls, seed + dir * Cplx(r0));
    out.points.push_back(cur.t.z);
    Cplx prev_dir = dir;

    auto in_window = [&](const Cplx& z) {
        return z.re >= opt.window_lo.re && z.re <= opt.window_hi.re &&
               z.im >= opt.window_lo.im && z.im <= opt.window_hi.im;
    };

    for (long n = 0; n < opt.max_steps; ++n) {
        // corrector: Newton steps on N_i - N_j along the gradient direction
        for (int it = 0; it < 3; ++it) {
            Cplx g = cur.t.h[i] - cur.t.h[j];
            Real g2 = norm2(g);
            Real f = cur.N[i] - cur.N[j];
            if (g2 < Real("1e-40") || abs(f) < ls.tol * 10) break;
            advance(ls, cur, cur.t.z + conj(g) * Cplx(-f / g2));
        }
        out.points.back() = cur.t.z;

        Cplx g = cur.t.h[i] - cur.t.h[j];
        Cplx tang = i_times(conj(g));
        Real ta = abs(tang);
        if (ta < Real("1e-40")) break;  // stalled on a singularity of the pair
        tang = tang / Cplx(ta);
        if ((conj(prev_dir) * tang).re < 0) tang = -tang;

        // approach targets geometrically so nearby candidates (a branch
        // point and a stop point can sit within one coarse step of each
        // other) are resolved by proximity, not by arrival order
        Real dmin(-1);
        Cplx nearest;
        auto consider = [&](const Cplx& tgt) {
            if (abs(tgt - seed) <= 2 * r0) return;  // the seed is not a terminal
            Real d = abs(cur.t.z - tgt);
            if (dmin < 0 || d < dmin) {
                dmin = d;
                nearest = tgt;
            }
        };
        for (const Cplx& E : ls.bp.points) consider(E);
        for (const Cplx& sp : opt.stop_points) consider(sp);
        Real floor_step = opt.step / 64;
        if (dmin >= 0 && dmin <= 2 * floor_step) {
            out.points.push_back(nearest);
            break;
        }
        Real step_n = opt.step;
        if (dmin >= 0) {
            Real near_step = dmin / 4;
            step_n = (std::min)(step_n, (std::max)(near_step, floor_step));
        }

        Cplx znext = cur.t.z + tang * Cplx(step_n);
        if (!in_window(znext)) break;
        advance(ls, cur, znext);
        out.points.push_back(cur.t.z);
        prev_dir = tang;
    }
    return out;
}

Cplx RegionMap::pixel_center(int i, int j) const {
    Real dx = (hi.re - lo.re) / nx;
    Real dy = (hi.im - lo.im) / ny;
    return Cplx(lo.re + dx * (2 * i + 1) / 2, lo.im + dy * (2 * j + 1) / 2);
}

RegionMap region_map(const Landscape& ls, const Cplx& lo, const Cplx& hi,
                     int nx, int ny, const Real& band) {
    RegionMap rm;
    rm.lo = lo;
    rm.hi = hi;
    rm.nx = nx;
    rm.ny = ny;
    rm.labels.resize(size_t(nx) * ny);

    for (int j = 0; j < ny; ++j) {
        Real y = rm.pixel_center(0, j).im;
        // a row above +-ic crosses the imaginary-axis cut: restart the
        // continuation on each side so tracked labels stay sheet labels
        std::vector<std::pair<int, int>> runs;
        if (ls.cp.case_id == CaseId::I && abs(y) >= ls.bp.c) {
            int split = 0;
            while (split < nx && rm.pixel_center(split, j).re < 0) ++split;
            if (split > 0) runs.emplace_back(0, split);
            if (split < nx) runs.emplace_back(split, nx);
        } else {
            runs.emplace_back(0, nx);
        }
        for (auto [i0, i1] : runs) {
            ProbeResult cur = probe(ls, rm.pixel_center(i0, j));
            rm.labels[size_t(j) * nx + i0] = label_from(cur.N, band);
            for (int i = i0 + 1; i < i1; ++i) {
                advance(ls, cur, rm.pixel_center(i, j));
                rm.labels[size_t(j) * nx + i] = label_from(cur.N, band);
            }
        }
    }
    return rm;
}

std::map<std::string, int> component_counts(const RegionMap& map) {
    std::map<std::string, int> counts;
    std::vector<char> seen(map.labels.size(), 0);
    for (int j = 0; j < map.ny; ++j)
        for (int i = 0; i < map.nx; ++i) {
            size_t idx = size_t(j) * map.nx + i;
            if (seen[idx] || map.at(i, j).gamma) continue;
            std::string name = label_name(map.at(i, j));
            ++counts[name];
            std::queue<std::pair<int, int>> q;
            q.emplace(i, j);
            seen[idx] = 1;
            while (!q.empty()) {
                auto [x, y] = q.front();
                q.pop();
                const int dx[4] = {1, -1, 0, 0};
                const int dy[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    int nx2 = x + dx[d], ny2 = y + dy[d];
                    if (nx2 < 0 || nx2 >= map.nx || ny2 < 0 || ny2 >= map.ny) continue;
                    size_t nidx = size_t(ny2) * map.nx + nx2;
                    if (seen[nidx] || map.at(nx2, ny2).gamma) continue;
                    if (label_name(map.at(nx2, ny2)) != name) continue;
                    seen[nidx] = 1;
                    q.emplace(nx2, ny2);
                }
            }
        }
    return counts;
}

Real phi_modulus(const Landscape& ls, const Cplx& z, int sheet) {
    return exp(n_values(ls, z)[sheet]);
}

Contour base_route(const CurveParams& cp, const BranchPoints& bp, const Real& x0,
                   const Cplx& z) {
    Contour ct;
    route_from_base(cp, x0, bp.c, z, ct);
    return ct;
}

}  // namespace hpsurf
