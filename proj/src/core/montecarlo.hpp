#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "eigenfunction.hpp"
#include "models.hpp"

namespace halfline {

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    long long n = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
};

// Deterministic random stream: std::mt19937_64 (whose output sequence is
// fixed by the standard) with our own variate transforms, so draws are
// reproducible across standard-library implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t s) : eng_(s) {}
    double u01(); // (0, 1)
    double normal();
    double exponential();
    double gamma(double shape);
    long long poisson(double mean);
    // standard one-sided beta-stable: E e^{-xi S} = e^{-xi^beta} (Kanter)
    double stable_standard(double beta);

private:
    std::mt19937_64 eng_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica);

// Increment sampler for the subordinator of a catalog model.  Unsupported
// kinds (log_log; rational with killing) throw UnsupportedError.
class SubordinatorSampler {
public:
    struct Node;

    static SubordinatorSampler for_model(const ModelSpec& spec);
    double sample_increment(double dt, RandomStream& rng) const;
    long long rejection_retries() const { return retries_->load(); }

private:
    std::shared_ptr<const Node> root_;
    std::shared_ptr<std::atomic<long long>> retries_ =
        std::make_shared<std::atomic<long long>>(0);
};

struct KilledPathResult {
    bool alive = false;
    double position = 0.0; // final position (first nonpositive value if killed)
    long long steps = 0;
};

// Euler walk x' = x + sqrt(2 s) N(0,1), s an increment over dt; killing is
// checked at grid times only (upward bias, controlled by dt refinement).
KilledPathResult simulate_killed(const SubordinatorSampler& sampler, double x,
                                 double t, double dt, RandomStream& rng);

McEstimate mc_survival(const ModelSpec& spec, double x, double t,
                       long long n, double dt, std::uint64_t seed,
                       int threads = 1);

// Monte Carlo average of F_lambda(X_t) 1{alive}; compare against
// e^{-t psi(lambda^2)} F_lambda(x).
McEstimate mc_eigen_check(const ModelSpec& spec, const Eigenfunction& ef,
                          double x, double t, long long n, double dt,
                          std::uint64_t seed, int threads = 1);

// Little-endian f64 triples (final position, alive flag as 0/1, steps).
void mc_dump(const ModelSpec& spec, double x, double t, long long n,
             double dt, std::uint64_t seed, const std::string& path);

} // namespace halfline
