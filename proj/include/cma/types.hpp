#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace cma {

/// Index of a point in a finite ground set {0..N-1}.
using Point = std::uint32_t;

/// Exact distance in metric ticks. A MetricMatrix with scale s stores the
/// distance t/s as the integer t, so every comparison stays exact.
using Ticks = std::int64_t;

// Error taxonomy. The CLI maps InputError to exit code 2 and every other
// cma::Error to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class BudgetError : public Error {
public:
    using Error::Error;
};

/// An axiom required as a precondition does not hold.
class AxiomError : public Error {
public:
    using Error::Error;
};

/// An interval structure violates (I1)/(I3) where the operation needs them.
class StructureError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

/// Reduced fraction with positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d);

    [[nodiscard]] double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    [[nodiscard]] bool is_integer() const { return den == 1; }
    [[nodiscard]] std::string str() const;

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend bool operator<(const Rational& a, const Rational& b)
    {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }
};

Rational parse_rational(const std::string& text);

enum class ScanMode { exhaustive, sampled };

std::string to_string(ScanMode mode);

/// Controls for every enumeration that may be too large to run exhaustively.
struct ScanOptions {
    std::uint64_t budget = 300'000'000;  // max tuples (or work units) for an exhaustive run
    std::uint64_t samples = 1'000'000;   // tuples drawn in sampled mode
    std::uint64_t seed = 0x5eed'c0de'2024ULL;
    unsigned threads = 1;
    bool allow_sampling = true;
    bool force_sampling = false;         // sample even when the exhaustive run fits
};

/// Non-decreasing right-continuous step function over a finite argument grid.
/// at(t) is the value at the largest grid point <= t; 0 below the grid and the
/// last value beyond it.
struct StepFunction {
    std::vector<Ticks> args;
    std::vector<Ticks> values;

    [[nodiscard]] Ticks at(Ticks t) const;
    [[nodiscard]] bool non_decreasing() const;
    [[nodiscard]] bool empty() const { return args.empty(); }
};

/// Running maximum with a deterministic witness: ties keep the witness that
/// compares lexicographically smallest.
template <class Witness>
struct MaxWitness {
    Ticks value = 0;
    Witness witness{};
    bool has = false;

    void offer(Ticks v, const Witness& w)
    {
        if (!has || v > value || (v == value && w < witness)) {
            value = v;
            witness = w;
            has = true;
        }
    }

    void merge(const MaxWitness& other)
    {
        if (other.has)
            offer(other.value, other.witness);
    }
};

}  // namespace cma
