#pragma once

#include <string>
#include <vector>

#include "cma/generators.hpp"
#include "cma/metric.hpp"
#include "cma/space.hpp"
#include "cma/types.hpp"

namespace cma {

/// Outcome of an identity scan. In sampled mode a pass only means no
/// counterexample was drawn.
struct CheckResult {
    bool pass = true;
    std::string failure;           // which identity failed, e.g. "M1", "M2"
    std::vector<Point> witness;    // lexicographically first failing tuple
    ScanMode mode = ScanMode::exhaustive;
    std::uint64_t evaluated = 0;
};

/// mu(a,a,b) = a and invariance under all permutations of the arguments.
CheckResult check_m1_m2(const TernarySpace& space, const ScanOptions& opt = {});
/// mu(mu(a,b,c),b,d) = mu(a,b,mu(c,b,d)).
CheckResult check_4pt(const TernarySpace& space, const ScanOptions& opt = {});
/// mu(a,b,mu(c,d,e)) = mu(mu(a,b,c),mu(a,b,d),e).
CheckResult check_median_5pt(const TernarySpace& space, const ScanOptions& opt = {});

/// A measured supremum: exact maximum in exhaustive mode, lower bound otherwise.
struct Constant {
    Ticks value = 0;
    std::vector<Point> witness;
    ScanMode mode = ScanMode::exhaustive;
    std::uint64_t evaluated = 0;

    [[nodiscard]] bool lower_bound() const { return mode == ScanMode::sampled; }
};

/// K = max card of the interval between the two sides of the 5-point identity.
Constant m3prime_constant(const TernarySpace& space, const ScanOptions& opt = {});

/// Smallest-residual line K t + H0 lying on or above every envelope point.
struct AffineBound {
    Rational slope{0};
    Rational offset{0};
    Rational residual{0};
};

struct ParamReport {
    Ticks scale = 1;               // metric scale of every Ticks value below
    Constant kappa0;
    StepFunction rho;              // t -> max d(mu(a,b,c), mu(a',b,c)) over d(a,a') <= t
    std::vector<std::vector<Point>> rho_witness;  // per grid point: (a, a', b, c)
    ScanMode rho_mode = ScanMode::exhaustive;
    AffineBound rho_affine;
    Constant kappa4;
    Constant kappa5;
    Constant K;

    [[nodiscard]] bool any_sampled() const;
    /// rho'(t) = 3 rho(t) + 4 kappa0, the control function for moving all three
    /// arguments at once with t the summed displacement.
    [[nodiscard]] Ticks rho_prime(Ticks t) const { return 3 * rho.at(t) + 4 * kappa0.value; }
};

Constant kappa0_constant(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt = {});
/// Envelope over the realized distances of d, plus per-point witnesses.
ParamReport rho_envelope(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt = {});
Constant kappa4_constant(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt = {});
Constant kappa5_constant(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt = {});
AffineBound affine_upper_fit(const StepFunction& envelope, Ticks scale);

ParamReport coarse_params(const TernarySpace& space, const MetricMatrix& d, const ScanOptions& opt = {});

/// max over triples of d2(mu2(f a, f b, f c), f(mu1(a,b,c))).
Constant quasi_morphism_defect(const std::vector<Point>& f, const TernarySpace& from, const TernarySpace& to,
                               const MetricMatrix& d_to, const ScanOptions& opt = {});

/// phi(R) = max over x of #{y : card[x,y] <= R}, at every realized card R.
StepFunction bounded_valency_profile(const TernarySpace& space);

/// Edges {x,y} with card[x,y] <= C + 1.
GraphSpec rips_complex_graph(const TernarySpace& space, std::int64_t C);

struct QuasiGeodesicReport {
    std::int64_t C = 1;
    bool connected = false;
    QIFit fit;                     // d_P against d_mu, when connected
    bool exact = false;            // d_P == d_mu
    std::size_t edges = 0;
};

QuasiGeodesicReport quasi_geodesic_check(const TernarySpace& space, std::int64_t C, unsigned threads = 1);

}  // namespace cma
