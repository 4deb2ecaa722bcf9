#include "refugium/eigenpair.hpp"

#include "refugium/linsolve.hpp"

#include <fmt/format.h>

#include <cmath>

namespace refugium {

namespace {

constexpr int kMaxIterations = 2000;

double mass_norm(const Operator& op, const Field& f) { return std::sqrt(op.integrate(f, f)); }

}  // namespace

double rayleigh(const Operator& op, const Field& q, const Field& phi, double diffusion) {
  if (phi.size() != op.size() || q.size() != op.size()) throw GeometryError("rayleigh: size mismatch");
  const double denom = op.integrate(phi, phi);
  if (!(denom > 0.0)) throw Error("rayleigh: zero-norm field");
  return (diffusion * op.dirichlet_energy(phi) + op.integrate(q.cwiseProduct(phi), phi)) / denom;
}

EigenPair principal_eigenpair(const Operator& op, const Field& q, double tol, double diffusion) {
  if (q.size() != op.size()) throw GeometryError("principal_eigenpair: potential size does not match operator");
  if (!(tol > 0.0)) throw Error("principal_eigenpair: tolerance must be positive");
  if (!q.allFinite()) throw Error("principal_eigenpair: potential is not finite");

  const double sigma = q.minCoeff() - 1.0;
  LinearSystem system{&op, diffusion, q, -sigma, Field()};
  const double inner_tol = kDefaultLinearTol;

  EigenPair pair;
  Field x = Field::Ones(op.size());
  x /= mass_norm(op, x);
  double value = rayleigh(op, q, x, diffusion);
  double increment = INFINITY;
  Field guess = x;
  int it = 0;
  while (increment >= tol) {
    if (it >= kMaxIterations)
      throw ConvergenceError(fmt::format("principal_eigenpair: no convergence after {} iterations", it), increment);
    system.rhs = x;
    Field y = solve_spd(system, inner_tol, nullptr, &guess);
    const double norm = mass_norm(op, y);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ConvergenceError("principal_eigenpair: iterate collapsed", increment);
    x = y / norm;
    // The next solve's answer is close to x scaled by 1/(lambda - sigma).
    const double next = rayleigh(op, q, x, diffusion);
    guess = x / std::max(next - sigma, 1e-300);
    increment = std::abs(next - value);
    value = next;
    ++it;
  }

  Eigen::Index arg = 0;
  x.cwiseAbs().maxCoeff(&arg);
  if (x[arg] < 0.0) x = -x;
  const double floor = 1e-8 * x.maxCoeff();
  if (x.minCoeff() < -floor)
    throw ConvergenceError("principal_eigenpair: eigenfunction changes sign (not the principal mode)", increment);

  pair.value = value;
  pair.vector = std::move(x);
  pair.iterations = it;
  pair.last_increment = increment;
  pair.strictly_positive = pair.vector.minCoeff() > 0.0;
  return pair;
}

EigenPair principal_eigenpair(const Mesh& mesh, Region region, const Field& q, double tol, double diffusion) {
  const Operator op = neumann_laplacian(mesh, region);
  return principal_eigenpair(op, q, tol, diffusion);
}

}  // namespace refugium
