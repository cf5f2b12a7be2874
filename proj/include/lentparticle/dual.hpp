#pragma once

// Forward-mode dual numbers a + b*eps with eps^2 = 0.
//
// Dual<T> is templated on its component type so it nests: Dual<Dual<double>>
// carries second derivatives, and Dual<std::complex<double>> carries the
// derivative of a complex-valued functional with respect to a real input.
// The value component of every operation is computed with exactly the same
// floating point operations as the plain scalar path, so
// evaluate_dual(...).value == evaluate(...) bit for bit.

#include <cmath>
#include <complex>
#include <ostream>
#include <type_traits>

namespace lp {

template <class T>
struct Dual {
    T value{};
    T deriv{};

    constexpr Dual() = default;
    constexpr Dual(T v) : value(v), deriv(T{}) {}  // NOLINT: implicit lift of constants
    constexpr Dual(T v, T d) : value(v), deriv(d) {}

    static constexpr Dual variable(T v) { return Dual(v, T(1)); }

    Dual& operator+=(const Dual& o) {
        value += o.value;
        deriv += o.deriv;
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        value -= o.value;
        deriv -= o.deriv;
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        deriv = deriv * o.value + value * o.deriv;
        value *= o.value;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        deriv = (deriv * o.value - value * o.deriv) / (o.value * o.value);
        value /= o.value;
        return *this;
    }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

// Strip all dual layers down to the innermost value.
inline constexpr double value_of(double x) { return x; }
inline std::complex<double> value_of(const std::complex<double>& x) { return x; }
template <class T>
constexpr auto value_of(const Dual<T>& x) {
    return value_of(x.value);
}

template <class T>
constexpr Dual<T> operator-(const Dual<T>& a) {
    return {-a.value, -a.deriv};
}
template <class T>
constexpr Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
    return a += b;
}
template <class T>
constexpr Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
    return a -= b;
}
template <class T>
constexpr Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
    return a *= b;
}
template <class T>
constexpr Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
    return a /= b;
}

// Mixed operations with a plain double. These avoid lifting the double into
// a Dual so that the value path matches scalar arithmetic exactly.
template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, double b) {
    return {a.value + b, a.deriv};
}
template <class T>
constexpr Dual<T> operator+(double a, const Dual<T>& b) {
    return {a + b.value, b.deriv};
}
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, double b) {
    return {a.value - b, a.deriv};
}
template <class T>
constexpr Dual<T> operator-(double a, const Dual<T>& b) {
    return {a - b.value, -b.deriv};
}
template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, double b) {
    return {a.value * b, a.deriv * b};
}
template <class T>
constexpr Dual<T> operator*(double a, const Dual<T>& b) {
    return {a * b.value, a * b.deriv};
}
template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, double b) {
    return {a.value / b, a.deriv / b};
}
template <class T>
constexpr Dual<T> operator/(double a, const Dual<T>& b) {
    return {a / b.value, -a * b.deriv / (b.value * b.value)};
}

// Comparisons look at the innermost value only.
template <class T>
constexpr bool operator<(const Dual<T>& a, const Dual<T>& b) {
    return value_of(a) < value_of(b);
}
template <class T>
constexpr bool operator<(const Dual<T>& a, double b) {
    return value_of(a) < b;
}
template <class T>
constexpr bool operator>(const Dual<T>& a, double b) {
    return value_of(a) > b;
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
    using std::exp;
    const T e = exp(a.value);
    return {e, e * a.deriv};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
    using std::log;
    return {log(a.value), a.deriv / a.value};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
    using std::sqrt;
    const T s = sqrt(a.value);
    return {s, a.deriv / (2.0 * s)};
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return {sin(a.value), cos(a.value) * a.deriv};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return {cos(a.value), -sin(a.value) * a.deriv};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
    using std::tanh;
    const T t = tanh(a.value);
    return {t, (1.0 - t * t) * a.deriv};
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
    return value_of(a.value) < 0.0 ? -a : a;
}

// exp(i*t) for a real scalar t. For a Dual argument the result is a Dual over
// complex numbers: d/dx exp(i t(x)) = i t'(x) exp(i t(x)).
inline std::complex<double> expi(double t) { return std::polar(1.0, t); }
inline Dual<std::complex<double>> expi(const Dual<double>& t) {
    const std::complex<double> e = std::polar(1.0, t.value);
    return {e, std::complex<double>(0.0, t.deriv) * e};
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Dual<T>& d) {
    return os << '(' << d.value << " + " << d.deriv << " eps)";
}

}  // namespace lp
