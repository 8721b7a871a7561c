#include "dsde/integrator.hpp"

namespace dsde {

std::string_view method_name(Method m) {
    return m == Method::Em ? "em" : "emt";
}

PathResult scheme_phi(const TransformedSde& model, std::span<const double> increments, double dt) {
    auto drift = [&model](double z) { return model.drift(z); };
    auto diffusion = [&model](double z) { return model.diffusion(z); };
    PathResult r = em_path(drift, diffusion, model.z0(), increments, dt, Method::Emt);
    r.terminal = model.transform().h(r.terminal);
    return r;
}

PathResult crude_em_path(const SdeProblem& problem, std::span<const double> increments, double dt) {
    auto drift = [&problem](double x) { return problem.drift.eval(x); };
    auto diffusion = [&problem](double x) { return problem.diffusion.eval(x); };
    return em_path(drift, diffusion, problem.x0, increments, dt, Method::Em);
}

}  // namespace dsde
