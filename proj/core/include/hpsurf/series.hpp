// Truncated Taylor series over Cplx with valuation-aware division.
// Used for expansions of the algebraic branches at the points over infinity.
#pragma once

#include "hpsurf/numerics.hpp"

#include <stdexcept>
#include <vector>

namespace hpsurf {

struct Series {
    // value = sum coeff[m] * tau^m, truncated at length L (coeff.size()).
    std::vector<Cplx> c;

    Series() = default;
    explicit Series(size_t len) : c(len) {}
    static Series constant(const Cplx& v, size_t len) {
        Series s(len);
        if (len) s.c[0] = v;
        return s;
    }
    static Series variable(size_t len) {
        Series s(len);
        if (len > 1) s.c[1] = Cplx(Real(1));
        return s;
    }
    size_t size() const { return c.size(); }

    Series& operator+=(const Series& o) {
        for (size_t m = 0; m < size() && m < o.size(); ++m) c[m] += o.c[m];
        return *this;
    }
    Series& operator-=(const Series& o) {
        for (size_t m = 0; m < size() && m < o.size(); ++m) c[m] -= o.c[m];
        return *this;
    }
    friend Series operator+(Series a, const Series& b) { a += b; return a; }
    friend Series operator-(Series a, const Series& b) { a -= b; return a; }
    friend Series operator*(const Series& a, const Series& b) {
        Series r(a.size());
        for (size_t m = 0; m < a.size(); ++m) {
            if (abs(a.c[m]) == 0) continue;
            for (size_t k = 0; m + k < r.size() && k < b.size(); ++k)
                r.c[m + k] += a.c[m] * b.c[k];
        }
        return r;
    }
    friend Series operator*(const Cplx& s, Series a) {
        for (auto& v : a.c) v *= s;
        return a;
    }

    size_t valuation(const Real& tol) const {
        for (size_t m = 0; m < size(); ++m)
            if (abs(c[m]) > tol) return m;
        return size();
    }

    // a / b where b may have a zero of order v; result truncated accordingly.
    static Series divide(const Series& a, const Series& b, const Real& tol) {
        size_t v = b.valuation(tol);
        if (v >= b.size()) throw std::runtime_error("Series::divide: zero divisor");
        if (a.valuation(tol) < v) throw std::runtime_error("Series::divide: negative valuation");
        size_t len = a.size() - v;
        Series q(a.size());
        std::vector<Cplx> rest(a.c.begin() + v, a.c.end());
        // long division by shifted divisor
        for (size_t m = 0; m < len; ++m) {
            Cplx qm = rest[m] / b.c[v];
            q.c[m] = qm;
            for (size_t k = 0; m + k < rest.size() && v + k < b.size(); ++k)
                rest[m + k] -= qm * b.c[v + k];
        }
        return q;
    }
};

}  // namespace hpsurf
