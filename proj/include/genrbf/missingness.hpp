#ifndef GENRBF_MISSINGNESS_HPP_
#define GENRBF_MISSINGNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "genrbf/dataset.hpp"

namespace genrbf {

enum class Mechanism { MCAR, MAR, NMAR };

Mechanism mechanism_from_string(const std::string& name);
std::string to_string(Mechanism mech);

/// What a run of the injector actually did, for the sidecar manifest.
struct InjectionReport {
    Mechanism mechanism = Mechanism::MCAR;
    double target_fraction = 0.0;
    double realized_fraction = 0.0;
    double rate_t = 0.0;               // calibrated rate (MAR/NMAR)
    std::uint64_t seed = 0;
    std::vector<int> anchor_indices;   // MAR/NMAR
    std::vector<int> hidden_features;  // NMAR only
    std::string to_json() const;
};

/// Removes exactly round(p * M * N) cells, uniformly without replacement.
Dataset inject_mcar(const Dataset& data, double p, std::uint64_t seed,
                    InjectionReport* report = nullptr);

/// Draws N anchor rows; attribute i of every other row is removed with
/// probability exp(-t * mahalanobis(x, anchor_i)). The rate t is
/// calibrated by bisection on the expected removal fraction.
Dataset inject_mar(const Dataset& data, double p, std::uint64_t seed,
                   InjectionReport* report = nullptr);

/// Splits features into visible and hidden halves; removal of visible
/// attributes is driven by distances on the hidden block, which is then
/// dropped from the output entirely.
Dataset inject_nmar(const Dataset& data, double p, std::uint64_t seed,
                    InjectionReport* report = nullptr);

Dataset inject(const Dataset& data, Mechanism mech, double p, std::uint64_t seed,
               InjectionReport* report = nullptr);

}  // namespace genrbf

#endif  // GENRBF_MISSINGNESS_HPP_
