#include "hpsurf/numerics.hpp"

#include <mpfr.h>
#include <cstdio>
#include <cstring>

namespace hpsurf {

void set_default_precision(unsigned bits) {
    // boost's knob is decimal digits; round up so the mantissa has at least
    // the requested number of bits.
    Real::default_precision(static_cast<unsigned>(bits * 0.30103) + 2);
}

unsigned default_precision_bits() {
    return static_cast<unsigned>(Real::default_precision() / 0.30103);
}

void PrecisionContext::activate() const { set_default_precision(working_bits); }

Real PrecisionContext::quad_tol() const {
    return boost::multiprecision::pow(Real(2), -static_cast<int>(working_bits / 2));
}

Real PrecisionContext::tight_tol() const {
    return boost::multiprecision::pow(Real(2), -static_cast<int>(working_bits) + 16);
}

Real pi_value() {
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    return p;
}

Cplx& Cplx::operator*=(const Cplx& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
}

Cplx& Cplx::operator/=(const Cplx& o) {
    // Smith's algorithm: scale by the larger component to avoid overflow and
    // keep relative accuracy.
    using boost::multiprecision::abs;
    if (abs(o.re) >= abs(o.im)) {
        Real t = o.im / o.re;
        Real d = o.re + o.im * t;
        Real r = (re + im * t) / d;
        im = (im - re * t) / d;
        re = r;
    } else {
        Real t = o.re / o.im;
        Real d = o.re * t + o.im;
        Real r = (re * t + im) / d;
        im = (im * t - re) / d;
        re = r;
    }
    return *this;
}

Real abs(const Cplx& z) { return boost::multiprecision::hypot(z.re, z.im); }

Real arg(const Cplx& z) { return boost::multiprecision::atan2(z.im, z.re); }

Cplx sqrt(const Cplx& z) {
    using boost::multiprecision::sqrt;
    using boost::multiprecision::abs;
    Real m = hpsurf::abs(z);
    if (m == 0) return Cplx(Real(0), Real(0));
    // principal branch: Re(sqrt) >= 0
    Real u = sqrt((m + abs(z.re)) / 2);
    Real v = z.im / (2 * u);
    if (z.re >= 0) return Cplx(u, v);
    if (z.im >= 0) return Cplx(v, u);
    return Cplx(-v, -u);
}

Cplx exp(const Cplx& z) {
    using boost::multiprecision::exp;
    using boost::multiprecision::sin;
    using boost::multiprecision::cos;
    Real e = exp(z.re);
    return Cplx(e * cos(z.im), e * sin(z.im));
}

Cplx log(const Cplx& z) {
    using boost::multiprecision::log;
    return Cplx(log(hpsurf::abs(z)), arg(z));
}

Cplx polar(const Real& r, const Real& theta) {
    using boost::multiprecision::sin;
    using boost::multiprecision::cos;
    return Cplx(r * cos(theta), r * sin(theta));
}

Cplx pow_int(const Cplx& z, long n) {
    if (n == 0) return Cplx(Real(1));
    if (n < 0) return Cplx(Real(1)) / pow_int(z, -n);
    Cplx base = z, acc(Real(1));
    long m = n;
    while (m > 0) {
        if (m & 1) acc *= base;
        base *= base;
        m >>= 1;
    }
    return acc;
}

std::string format_real(const Real& x, int digits) {
    char fmt[32];
    std::snprintf(fmt, sizeof(fmt), "%%.%dRNg", digits);
    char* out = nullptr;
    mpfr_asprintf(&out, fmt, x.backend().data());
    std::string s(out);
    mpfr_free_str(out);
    return s;
}

std::string format_cplx(const Cplx& z, int digits) {
    return format_real(z.re, digits) + (z.im < 0 ? " - " : " + ") +
           format_real(boost::multiprecision::abs(z.im), digits) + "i";
}

}  // namespace hpsurf
