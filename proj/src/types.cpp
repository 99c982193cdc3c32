#include "cma/types.hpp"

#include <algorithm>
#include <charconv>

namespace cma {

Rational::Rational(std::int64_t n, std::int64_t d)
{
    if (d == 0)
        throw InputError("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const auto g = std::gcd(n < 0 ? -n : n, d);
    num = g ? n / g : n;
    den = g ? d / g : d;
}

std::string Rational::str() const
{
    if (den == 1)
        return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

namespace {

std::int64_t parse_int(std::string_view text)
{
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw InputError("not an integer: '" + std::string(text) + "'");
    return value;
}

}  // namespace

Rational parse_rational(const std::string& text)
{
    const auto slash = text.find('/');
    if (slash == std::string::npos)
        return Rational(parse_int(text));
    return Rational(parse_int(std::string_view(text).substr(0, slash)),
                    parse_int(std::string_view(text).substr(slash + 1)));
}

std::string to_string(ScanMode mode)
{
    return mode == ScanMode::exhaustive ? "exhaustive" : "sampled";
}

Ticks StepFunction::at(Ticks t) const
{
    auto it = std::upper_bound(args.begin(), args.end(), t);
    if (it == args.begin())
        return 0;
    return values[static_cast<std::size_t>(it - args.begin()) - 1];
}

bool StepFunction::non_decreasing() const
{
    return std::is_sorted(args.begin(), args.end()) && std::is_sorted(values.begin(), values.end());
}

}  // namespace cma
