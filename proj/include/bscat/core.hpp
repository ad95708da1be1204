#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bscat {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Point or displacement in R^3.
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

// ---------------------------------------------------------------------------
// Error hierarchy. NumericalError marks a violated numerical contract
// (resolution, support, singular evaluation); ConfigError marks bad input.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

#define BSCAT_DEFINE_ERROR(Name, Base)        \
    class Name : public Base {                \
    public:                                   \
        using Base::Base;                     \
    }

BSCAT_DEFINE_ERROR(SingularPointError, NumericalError);
BSCAT_DEFINE_ERROR(PoleError, NumericalError);
BSCAT_DEFINE_ERROR(ParameterError, NumericalError);
BSCAT_DEFINE_ERROR(ResolutionError, NumericalError);
BSCAT_DEFINE_ERROR(ShapeError, NumericalError);
BSCAT_DEFINE_ERROR(SamplingError, NumericalError);
BSCAT_DEFINE_ERROR(SupportError, NumericalError);
BSCAT_DEFINE_ERROR(SingularWeightError, NumericalError);
BSCAT_DEFINE_ERROR(TruncationError, NumericalError);
BSCAT_DEFINE_ERROR(KernelSingularityError, NumericalError);
BSCAT_DEFINE_ERROR(DivergentIntegralError, NumericalError);
BSCAT_DEFINE_ERROR(DomainError, NumericalError);
BSCAT_DEFINE_ERROR(AnsatzCaseError, ConfigError);

#undef BSCAT_DEFINE_ERROR

}  // namespace bscat
