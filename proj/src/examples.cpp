#include "dsde/examples.hpp"

#include "dsde/error.hpp"

namespace dsde {

namespace {

SdeProblem make(PiecewiseFn drift, PiecewiseFn diffusion) {
    return SdeProblem{std::move(drift), std::move(diffusion), kExampleX0, kExampleHorizon,
                      kExampleEllipticityFloor};
}

}  // namespace

NamedExample load_example(std::string_view id) {
    if (id == "ex1") {
        // −sign(x) as two branches so the breakpoint convention applies at 0.
        return {"ex1", "dX = -sign(X) dt + dW",
                make(PiecewiseFn::parse({0.0}, {"1", "-1"}), PiecewiseFn::constant(1.0))};
    }
    if (id == "ex2") {
        return {"ex2", "five-branch drift, sigma(x) = (1 + 1/(x^2+1))/2",
                make(PiecewiseFn::parse({-1.0, -0.5, 0.0, 1.0}, {"x-2", "2", "1-x^2", "x^2", "-x-1"}),
                     PiecewiseFn::parse({}, {"0.5*(1+1/(x^2+1))"}))};
    }
    if (id == "ex3") {
        return {"ex3", "threshold dividend strategy, theta=1, K=1.8, b=0.895635, sigma=1",
                make(PiecewiseFn::parse({kDividendThreshold}, {"1", "1-1.8"}), PiecewiseFn::constant(1.0))};
    }
    throw ValidationError("unknown example id '" + std::string(id) + "' (expected ex1, ex2 or ex3)");
}

std::vector<std::string> example_ids() { return {"ex1", "ex2", "ex3"}; }

}  // namespace dsde
