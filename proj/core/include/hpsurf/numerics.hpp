// Arbitrary-precision real/complex scalar types and precision management.
//
// Reals are MPFR floats with a process-wide default precision (bits of
// mantissa).  Complex numbers are a plain re/im pair; division uses Smith's
// algorithm and elementary functions are built from the MPFR real kernels,
// so everything inherits the working precision automatically.
#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <string>
#include <vector>

namespace hpsurf {

using Real = boost::multiprecision::mpfr_float;

// Process-wide precision control.  All Real temporaries pick up the default
// precision at construction time, so "set_precision" must be called before
// any numeric work (tests and the CLI do this on startup).
struct PrecisionContext {
    unsigned working_bits = 256;

    void activate() const;
    // ~ 0.77 decimal digits per bit
    unsigned decimal_digits() const { return static_cast<unsigned>(working_bits * 0.30103); }
    // default target for adaptive schemes: half the working mantissa
    Real quad_tol() const;
    Real tight_tol() const;
};

void set_default_precision(unsigned bits);
unsigned default_precision_bits();

Real pi_value();

struct Cplx {
    Real re, im;

    Cplx() : re(0), im(0) {}
    Cplx(const Real& r) : re(r), im(0) {}
    Cplx(const Real& r, const Real& i) : re(r), im(i) {}
    Cplx(double r) : re(r), im(0) {}
    Cplx(double r, double i) : re(r), im(i) {}
    Cplx(int r) : re(r), im(0) {}

    Cplx operator-() const { return Cplx(-re, -im); }
    Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
    Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
    Cplx& operator*=(const Cplx& o);
    Cplx& operator/=(const Cplx& o);
};

inline Cplx operator+(Cplx a, const Cplx& b) { a += b; return a; }
inline Cplx operator-(Cplx a, const Cplx& b) { a -= b; return a; }
inline Cplx operator*(Cplx a, const Cplx& b) { a *= b; return a; }
inline Cplx operator/(Cplx a, const Cplx& b) { a /= b; return a; }
inline bool operator==(const Cplx& a, const Cplx& b) { return a.re == b.re && a.im == b.im; }
inline bool operator!=(const Cplx& a, const Cplx& b) { return !(a == b); }

inline Cplx conj(const Cplx& z) { return Cplx(z.re, -z.im); }
inline Real norm2(const Cplx& z) { return z.re * z.re + z.im * z.im; }
Real abs(const Cplx& z);
Real arg(const Cplx& z);
Cplx sqrt(const Cplx& z);
Cplx exp(const Cplx& z);
Cplx log(const Cplx& z);
Cplx polar(const Real& r, const Real& theta);
Cplx pow_int(const Cplx& z, long n);
inline Cplx i_times(const Cplx& z) { return Cplx(-z.im, z.re); }

// Distance helpers
inline Real abs_diff(const Cplx& a, const Cplx& b) { return abs(a - b); }

// Deterministic decimal rendering: `digits` significant digits, ties to even
// (MPFR round-to-nearest).  Used for every number we serialize.
std::string format_real(const Real& x, int digits = 40);
std::string format_cplx(const Cplx& z, int digits = 40);

}  // namespace hpsurf
