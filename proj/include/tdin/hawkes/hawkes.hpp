#pragma once

#include <array>
#include <string>
#include <vector>

#include "tdin/pp/event_sequence.hpp"
#include "tdin/pp/intensity.hpp"

namespace tdin::hawkes {

// Exponential-kernel self-exciting process:
// lambda(t) = mu + a * sum_{t_i < t} exp(-beta (t - t_i)).
struct HawkesParams {
    double mu = 0.0;    // spontaneous (base) rate
    double a = 0.0;     // excitation weight
    double beta = 1.0;  // kernel decay rate

    // Throws on negative rates or non-positive decay. Simulation configs
    // additionally require the branching ratio a/beta < 1.
    void validate(bool require_stationary = false) const;

    std::string to_json() const;
    static HawkesParams from_json(const std::string& text);
};

// Intensity at t given a sorted history strictly before t. O(n) over the
// history via the one-pass excitation recursion.
double hawkes_intensity(const HawkesParams& p, const std::vector<double>& history,
                        double t);

// Evaluator over a fixed event history; events become quadrature breakpoints.
// Per-event excitation prefix states make each evaluation O(log n).
class HawkesIntensity final : public pp::Intensity {
  public:
    HawkesIntensity(HawkesParams p, std::vector<double> history);

    double value(double t) const override;
    std::vector<double> breakpoints(double a, double b) const override;

  private:
    HawkesParams p_;
    std::vector<double> times_;
    std::vector<double> excitation_;  // sum of kernels at each event, inclusive
};

// Exact negative log-likelihood over the window using the closed-form
// compensator of the exponential kernel.
double hawkes_nll(const HawkesParams& p, const pp::EventSequence& seq,
                  const pp::Window& window);

// NLL and its gradient with respect to (mu, a, beta).
double hawkes_nll_grad(const HawkesParams& p, const pp::EventSequence& seq,
                       const pp::Window& window, std::array<double, 3>& grad);

struct FitOptions {
    int max_iterations = 2000;
    double lr = 0.05;
    double grad_tolerance = 1e-7;
};

struct FitResult {
    HawkesParams params;
    double nll = 0.0;
    int iterations = 0;
    bool converged = false;  // false means the iteration cap hit first;
                             // params still hold the best iterate seen
};

// Maximum-likelihood fit with positivity kept by a softplus
// reparameterization. Gradient descent on the exact NLL.
FitResult fit_hawkes_mle(const pp::EventSequence& seq, const HawkesParams& init,
                         const FitOptions& opts = {});

}  // namespace tdin::hawkes
