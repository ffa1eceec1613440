#include "giwvol/model_config.hpp"

#include <cmath>
#include <string>

namespace giwvol {

ModelConfig ModelConfig::with_defaults(double delta, double phi, const SymPosDefMatrix& omega) {
  ModelConfig c;
  c.delta = delta;
  c.phi = phi;
  c.omega = omega;
  c.m0 = Vector::Zero(omega.dim());
  c.p0 = 1000.0;
  c.s0 = SymPosDefMatrix::identity(omega.dim());
  return c;
}

void ModelConfig::validate() const {
  if (!(delta > 2.0 / 3.0 && delta < 1.0)) {
    throw Error(ErrorKind::kValidation,
                "delta must satisfy 2/3 < delta < 1 (forecast variance is finite only for "
                "delta > 2/3), got " + std::to_string(delta));
  }
  if (!std::isfinite(phi)) throw Error(ErrorKind::kValidation, "phi must be finite");
  if (omega.dim() == 0) throw Error(ErrorKind::kValidation, "Omega is missing");
  try {
    SymPosDefMatrix::checked(omega.matrix());
  } catch (const Error&) {
    throw Error(ErrorKind::kValidation, "Omega must be positive definite");
  }
  if (!(p0 > 0.0) || !std::isfinite(p0)) {
    throw Error(ErrorKind::kValidation, "p0 must be positive");
  }
  if (m0.size() != omega.dim()) {
    throw Error(ErrorKind::kValidation, "m0 has dimension " + std::to_string(m0.size()) +
                                            ", Omega has " + std::to_string(omega.dim()));
  }
  if (!m0.allFinite()) throw Error(ErrorKind::kValidation, "m0 must be finite");
  if (s0.dim() != omega.dim()) {
    throw Error(ErrorKind::kValidation, "S0 has dimension " + std::to_string(s0.dim()) +
                                            ", Omega has " + std::to_string(omega.dim()));
  }
  try {
    SymPosDefMatrix::checked(s0.matrix());
  } catch (const Error&) {
    throw Error(ErrorKind::kValidation, "S0 must be positive definite");
  }
  if (!(tol > 0.0)) throw Error(ErrorKind::kValidation, "tol must be positive");
}

}  // namespace giwvol
