#pragma once

// Shared value types, error types and small numeric helpers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace watertight {

struct Point2 {
    double u = 0.0;
    double v = 0.0;

    static constexpr std::size_t dimension = 2;

    double& operator[](std::size_t i) { return i == 0 ? u : v; }
    double operator[](std::size_t i) const { return i == 0 ? u : v; }

    friend Point2 operator+(Point2 a, Point2 b) { return {a.u + b.u, a.v + b.v}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.u - b.u, a.v - b.v}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.u, s * a.v}; }
    friend Point2 operator*(Point2 a, double s) { return {s * a.u, s * a.v}; }
    Point2& operator+=(Point2 b) { u += b.u; v += b.v; return *this; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static constexpr std::size_t dimension = 3;

    double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

    friend Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend Point3 operator*(Point3 a, double s) { return {s * a.x, s * a.y, s * a.z}; }
    Point3& operator+=(Point3 b) { x += b.x; y += b.y; z += b.z; return *this; }
    friend bool operator==(const Point3&, const Point3&) = default;
};

inline double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double dot(Point2 a, Point2 b) { return a.u * b.u + a.v * b.v; }
inline Point3 cross(Point3 a, Point3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <class P>
double norm(P a) { return std::sqrt(dot(a, a)); }
template <class P>
double distance(P a, P b) { return norm(a - b); }

template <class P>
bool is_finite(const P& p) {
    for (std::size_t i = 0; i < P::dimension; ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Errors. Every failure the library reports derives from watertight::Error.

/// Short decimal form for diagnostics.
inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class UnsupportedDegreeError : public Error {
public:
    using Error::Error;
};

/// Degree reduction could not meet the tolerance; `achieved` is the sampled deviation.
class ReductionInfeasibleError : public Error {
public:
    ReductionInfeasibleError(const std::string& what, double achieved)
        : Error(what), achieved(achieved) {}
    double achieved;
};

/// Boundary polynomial fit exceeded its tolerance.
class FitInfeasibleError : public Error {
public:
    FitInfeasibleError(const std::string& what, double residual)
        : Error(what), residual(residual) {}
    double residual;
};

class InversionError : public Error {
public:
    InversionError(const std::string& what, Point2 last, double residual)
        : Error(what), last_iterate(last), residual(residual) {}
    Point2 last_iterate;
    double residual;
};

class AmbiguousCaseError : public Error {
public:
    using Error::Error;
};

class DegenerateCellError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class StitchDegreeError : public Error {
public:
    using Error::Error;
};

/// Malformed model file; `path` is the offending JSON path, `line` is 1-based
/// (0 when unknown).
class ParseError : public Error {
public:
    ParseError(std::string json_path, int line_number, const std::string& what)
        : Error((json_path.empty() ? std::string("<root>") : json_path) +
                (line_number > 0 ? " (line " + std::to_string(line_number) + ")" : std::string()) + ": " + what),
          path(std::move(json_path)),
          line(line_number) {}
    std::string path;
    int line;
};

// ---------------------------------------------------------------------------
// Numerics

/// Neumaier-compensated accumulator. Works for doubles and points.
template <class T>
class CompensatedSum {
public:
    void add(const T& value) {
        if constexpr (std::is_same_v<T, double>) {
            add_scalar(sum_, carry_, value);
        } else {
            for (std::size_t i = 0; i < T::dimension; ++i) add_scalar(sum_[i], carry_[i], value[i]);
        }
    }
    T result() const { return sum_ + carry_; }

private:
    static void add_scalar(double& sum, double& carry, double value) {
        const double t = sum + value;
        if (std::abs(sum) >= std::abs(value))
            carry += (sum - t) + value;
        else
            carry += (value - t) + sum;
        sum = t;
    }
    T sum_{};
    T carry_{};
};

/// Sums terms; switches to compensated accumulation above 16 terms.
template <class T>
T accumulate(const std::vector<T>& terms) {
    if (terms.size() > 16) {
        CompensatedSum<T> acc;
        for (const auto& t : terms) acc.add(t);
        return acc.result();
    }
    T total{};
    for (const auto& t : terms) total += t;
    return total;
}

/// Binomial coefficient as a double; exact for n <= 60.
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

/// Worker count from WATERTIGHT_THREADS (0 or unset = hardware concurrency).
inline unsigned thread_count() {
    unsigned n = 0;
    if (const char* env = std::getenv("WATERTIGHT_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

/// Runs fn(i) for i in [0, count). Each index is processed exactly once; results
/// written per index are independent of the worker count.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace watertight
