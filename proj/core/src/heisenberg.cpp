#include "crflow/heisenberg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crflow/errors.hpp"

namespace crflow {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kUnitaryTolerance = 1e-12;

void require_same_dim(int a, int b, const char* what) {
  if (a != b) fail(ErrorKind::InvalidArgument, std::string(what) + ": dimension mismatch");
}

}  // namespace

SpherePoint::SpherePoint(CVec x) : x_(std::move(x)) {
  if (x_.size() < 2) fail(ErrorKind::InvalidArgument, "SpherePoint needs n+1 >= 2 coordinates");
  const double norm = x_.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
    fail(ErrorKind::InvalidArgument, "SpherePoint off the unit sphere (|x| = " + std::to_string(norm) + ")");
  }
}

SpherePoint SpherePoint::normalized(const CVec& x) {
  const double norm = x.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) fail(ErrorKind::InvalidArgument, "cannot normalize zero vector");
  return SpherePoint(x / norm);
}

SpherePoint SpherePoint::north(int n) {
  CVec x = CVec::Zero(n + 1);
  x[n] = 1.0;
  return SpherePoint(std::move(x));
}

SpherePoint SpherePoint::south(int n) {
  CVec x = CVec::Zero(n + 1);
  x[n] = -1.0;
  return SpherePoint(std::move(x));
}

CRAutomorphism::CRAutomorphism(CMat pole_rotation, HeisenbergPoint q, double r)
    : U_(std::move(pole_rotation)), q_(std::move(q)), r_(r) {
  const auto dim = U_.rows();
  if (U_.cols() != dim || dim != q_.z.size() + 1) {
    fail(ErrorKind::InvalidArgument, "CRAutomorphism: U must be (n+1)x(n+1) with q in H^n");
  }
  const double defect = (U_.adjoint() * U_ - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (!(defect <= kUnitaryTolerance)) {
    fail(ErrorKind::InvalidArgument, "CRAutomorphism: U is not unitary (defect " + std::to_string(defect) + ")");
  }
  if (!(r_ > 0.0) || !std::isfinite(r_)) fail(ErrorKind::NonPositiveScale, "CRAutomorphism: r must be positive");
}

CRAutomorphism CRAutomorphism::identity(int n) {
  return CRAutomorphism(CMat::Identity(n + 1, n + 1), HeisenbergPoint::origin(n), 1.0);
}

CRAutomorphism CRAutomorphism::inverse() const {
  const double inv_r = 1.0 / r_;
  return CRAutomorphism(U_, dilate(heisenberg_inverse(q_), inv_r), inv_r);
}

HeisenbergPoint cayley_forward(const SpherePoint& x) {
  const int n = x.n();
  const cplx last = x[n];
  const cplx denom = 1.0 + last;
  if (std::abs(denom) < kPoleThreshold) {
    fail(ErrorKind::PoleSingularity, "cayley_forward at the south pole");
  }
  HeisenbergPoint h;
  h.z = x.coords().head(n) / denom;
  h.tau = (cplx(0.0, 1.0) * (1.0 - last) / denom).real();
  return h;
}

SpherePoint cayley_inverse(const HeisenbergPoint& h) {
  const int n = h.n();
  const double zz = h.z.squaredNorm();
  const cplx denom(1.0 + zz, -h.tau);
  CVec x(n + 1);
  x.head(n) = 2.0 * h.z / denom;
  x[n] = cplx(1.0 - zz, h.tau) / denom;
  // |x| = 1 holds exactly in real arithmetic; renormalize rounding only.
  return SpherePoint(x / x.norm());
}

HeisenbergPoint dilate(const HeisenbergPoint& h, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorKind::NonPositiveScale, "dilation factor must be positive");
  return {lambda * h.z, lambda * lambda * h.tau};
}

HeisenbergPoint translate(const HeisenbergPoint& h, const HeisenbergPoint& q) {
  require_same_dim(h.n(), q.n(), "translate");
  // z' . conj(z) = sum z'_j conj(z_j); Eigen's dot conjugates its first argument.
  const cplx pairing = h.z.dot(q.z);
  return {h.z + q.z, h.tau + q.tau + 2.0 * pairing.imag()};
}

HeisenbergPoint heisenberg_product(const HeisenbergPoint& a, const HeisenbergPoint& b) { return translate(b, a); }

HeisenbergPoint heisenberg_inverse(const HeisenbergPoint& a) { return {-a.z, -a.tau}; }

HeisenbergPoint delta(const HeisenbergPoint& h, const HeisenbergPoint& q, double r) {
  require_same_dim(h.n(), q.n(), "delta");
  if (!(r > 0.0)) fail(ErrorKind::NonPositiveScale, "delta: r must be positive");
  const cplx pairing = h.z.dot(q.z);
  return {r * h.z + q.z, r * r * h.tau + q.tau + 2.0 * r * pairing.imag()};
}

SpherePoint apply(const CRAutomorphism& phi, const SpherePoint& x) {
  require_same_dim(phi.n(), x.n(), "apply");
  const CMat& U = phi.pole_rotation();
  const SpherePoint local(U.adjoint() * x.coords());
  const HeisenbergPoint h = translate(dilate(cayley_forward(local), phi.r()), phi.q());
  const SpherePoint mapped = cayley_inverse(h);
  CVec out = U * mapped.coords();
  return SpherePoint(out / out.norm());
}

double volume_density(double z_norm_sq, double tau, int n) {
  const double a = 1.0 + z_norm_sq;
  return std::pow(4.0 / (a * a + tau * tau), n + 1);
}

double volume_density(const HeisenbergPoint& h) { return volume_density(h.z.squaredNorm(), h.tau, h.n()); }

double jacobian_factor(const CRAutomorphism& phi, const SpherePoint& x) {
  require_same_dim(phi.n(), x.n(), "jacobian_factor");
  const int n = phi.n();
  const SpherePoint local(phi.pole_rotation().adjoint() * x.coords());
  const HeisenbergPoint h = cayley_forward(local);
  const HeisenbergPoint image = delta(h, phi.q(), phi.r());
  // Ratio of densities computed from the common bracket to keep precision when both are tiny.
  const double a0 = 1.0 + h.z.squaredNorm();
  const double a1 = 1.0 + image.z.squaredNorm();
  const double ratio = (a0 * a0 + h.tau * h.tau) / (a1 * a1 + image.tau * image.tau);
  return std::pow(phi.r() * phi.r() * ratio, n + 1);
}

CMat pole_rotation_to(const SpherePoint& target) {
  const int n = target.n();
  const auto dim = n + 1;
  const cplx last = target[n];
  const double mag = std::abs(last);
  const cplx phase = mag > 0.0 ? last / mag : cplx(1.0, 0.0);
  CVec e = CVec::Zero(dim);
  e[n] = phase;
  const CVec v = e - target.coords();
  const double vv = v.squaredNorm();
  CMat H = CMat::Identity(dim, dim);
  if (vv > 1e-30) H -= (2.0 / vv) * v * v.adjoint();
  // H maps phase * e_{n+1} to target, so U = phase * H maps e_{n+1} to target.
  return phase * H;
}

double round_distance(const SpherePoint& a, const SpherePoint& b) {
  const double c = std::clamp(a.coords().dot(b.coords()).real(), -1.0, 1.0);
  return std::acos(c);
}

}  // namespace crflow
