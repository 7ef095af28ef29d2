#pragma once

#include <functional>
#include <vector>

namespace tdin::pp {

// Conditional intensity bound to a fixed history. value(t) must be
// non-negative and finite for every t in the observation window; at an event
// time it is the left limit (the event itself is excluded from its own
// history). breakpoints(a, b) lists the times strictly inside (a, b) where
// the intensity may jump; between consecutive breakpoints it is smooth.
class Intensity {
  public:
    virtual ~Intensity() = default;

    virtual double value(double t) const = 0;

    virtual std::vector<double> breakpoints(double a, double b) const {
        (void)a;
        (void)b;
        return {};
    }
};

// Constant rate; the homogeneous Poisson case.
class ConstantIntensity final : public Intensity {
  public:
    explicit ConstantIntensity(double rate) : rate_(rate) {}
    double value(double) const override { return rate_; }

  private:
    double rate_;
};

// Wraps an arbitrary callable, with optional breakpoints. Test and glue code
// use this to avoid one-off subclasses.
class FunctionIntensity final : public Intensity {
  public:
    explicit FunctionIntensity(std::function<double(double)> fn,
                               std::vector<double> breaks = {})
        : fn_(std::move(fn)), breaks_(std::move(breaks)) {}

    double value(double t) const override { return fn_(t); }

    std::vector<double> breakpoints(double a, double b) const override {
        std::vector<double> out;
        for (double x : breaks_) {
            if (x > a && x < b) out.push_back(x);
        }
        return out;
    }

  private:
    std::function<double(double)> fn_;
    std::vector<double> breaks_;
};

}  // namespace tdin::pp
