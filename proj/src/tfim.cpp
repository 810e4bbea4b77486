#include "dqpt/tfim.hpp"

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Eigenvalues>

namespace dqpt {

namespace {

constexpr int kLanczosMaxBasis = 400;

struct Krylov {
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples basis j and j+1
  std::vector<RVector> basis;
};

Krylov lanczos(const TfimOperator& h, RVector start, int max_basis) {
  Krylov k;
  start.normalize();
  k.basis.push_back(start);
  RVector w(h.dim());
  for (int j = 0; j < max_basis; ++j) {
    h.apply(k.basis[j], w);
    const double a = k.basis[j].dot(w);
    k.alpha.push_back(a);
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& v : k.basis) w -= v.dot(w) * v;
    }
    const double b = w.norm();
    if (b < 1e-11 || j + 1 == max_basis || static_cast<Eigen::Index>(j + 1) == h.dim()) break;
    k.beta.push_back(b);
    k.basis.push_back(w / b);
  }
  return k;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tridiagonal_eigen(const Krylov& k) {
  const int m = static_cast<int>(k.alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) t(i, i) = k.alpha[i];
  for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = k.beta[i];
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t);
}

double overlap_cos2(double h0, double h1, double k) {
  const double ck = std::cos(k);
  const double num = 1.0 + h0 * h1 - (h0 + h1) * ck;
  const double den = std::sqrt(1.0 + h0 * h0 - 2.0 * h0 * ck) * std::sqrt(1.0 + h1 * h1 - 2.0 * h1 * ck);
  const double c = den > 0.0 ? num / den : 1.0;
  return c * c;
}

double quasiparticle_energy(double h, double k) { return 2.0 * std::sqrt(1.0 + h * h - 2.0 * h * std::cos(k)); }

}  // namespace

void QuenchSpec::validate() const {
  auto finite = [](double v, const char* name) {
    if (!std::isfinite(v)) throw InvalidArgument(std::string("quench: field '") + name + "' is not finite");
  };
  finite(J, "J");
  finite(g0, "g0");
  finite(g1, "g1");
  finite(dt, "dt");
  finite(t_max, "t_max");
  if (J == 0.0) throw InvalidArgument("quench: field 'J' must be non-zero");
  if (!(dt > 0.0)) throw InvalidArgument("quench: field 'dt' must be positive");
  if (!(t_max >= dt)) throw InvalidArgument("quench: field 't_max' must be at least dt");
  if (trotter_order != 1 && trotter_order != 2) {
    throw InvalidArgument("quench: field 'trotter_order' must be 1 or 2");
  }
}

int QuenchSpec::steps() const { return static_cast<int>(std::floor(t_max / dt + 1e-9)); }

CMatrix tfim_hamiltonian(double J, double g, int n, bool periodic) {
  if (n < 1) throw InvalidArgument("tfim_hamiltonian: need at least one site");
  if (n > kMaxDenseSites) throw ResourceLimit("tfim_hamiltonian: dense form limited to 10 sites");
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix h = CMatrix::Zero(dim, dim);
  const int bonds = periodic ? n : n - 1;
  for (Eigen::Index x = 0; x < dim; ++x) {
    auto z = [&](int site) { return ((x >> (n - 1 - site)) & 1) ? -1.0 : 1.0; };
    double diag = 0.0;
    for (int b = 0; b < bonds; ++b) diag += J * z(b) * z((b + 1) % n);
    h(x, x) = diag;
    for (int site = 0; site < n; ++site) h(x ^ (Eigen::Index{1} << (n - 1 - site)), x) += g;
  }
  return h;
}

CMatrix bond_hamiltonian(double J, double g) {
  const CMatrix x = pauli(Axis::X);
  const CMatrix z = pauli(Axis::Z);
  return J * kron(z, z) + 0.5 * g * (kron(x, identity(2)) + kron(identity(2), x));
}

CMatrix trotter_gate_first_order(double J, double g, double dt) {
  if (!(dt >= 0.0)) throw InvalidArgument("trotter_gate_first_order: dt must be non-negative");
  return two_site_exp(bond_hamiltonian(J, g), 2.0 * dt);
}

SecondOrderGates trotter_gates_second_order(double J, double g, double dt) {
  if (!(dt >= 0.0)) throw InvalidArgument("trotter_gates_second_order: dt must be non-negative");
  const CMatrix h = bond_hamiltonian(J, g);
  return {two_site_exp(h, 0.5 * dt), two_site_exp(h, dt)};
}

TfimOperator::TfimOperator(double J, double g, int n) : J_(J), g_(g), n_(n) {
  if (n < 2) throw InvalidArgument("TfimOperator: need at least two sites");
  if (n > kMaxEdSites) throw ResourceLimit("TfimOperator: limited to 14 sites");
  diag_.resize(dim());
  for (Eigen::Index x = 0; x < dim(); ++x) {
    double d = 0.0;
    for (int b = 0; b < n; ++b) {
      const int zi = ((x >> b) & 1) ? -1 : 1;
      const int zj = ((x >> ((b + 1) % n)) & 1) ? -1 : 1;
      d += J_ * zi * zj;
    }
    diag_(x) = d;
  }
}

void TfimOperator::apply(const RVector& in, RVector& out) const {
  if (n_ >= 12) {
    parallel::tfim_apply(diag_, g_, n_, in, out);
  } else {
    serial::tfim_apply(diag_, g_, n_, in, out);
  }
}

namespace serial {
void tfim_apply(const RVector& diag, double g, int n, const RVector& in, RVector& out) {
  out.resize(in.size());
  for (Eigen::Index x = 0; x < in.size(); ++x) {
    double acc = diag(x) * in(x);
    for (int b = 0; b < n; ++b) acc += g * in(x ^ (Eigen::Index{1} << b));
    out(x) = acc;
  }
}
}  // namespace serial

namespace parallel {
void tfim_apply(const RVector& diag, double g, int n, const RVector& in, RVector& out) {
  out.resize(in.size());
  const std::int64_t size = in.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t x = 0; x < size; ++x) {
    double acc = diag(x) * in(x);
    for (int b = 0; b < n; ++b) acc += g * in(x ^ (std::int64_t{1} << b));
    out(x) = acc;
  }
}
}  // namespace parallel

std::pair<double, RVector> ed_ground_state(const TfimOperator& h) {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal;
  RVector v(h.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);

  double energy = 0.0;
  for (int restart = 0; restart < 4; ++restart) {
    const Krylov k = lanczos(h, v, std::min<int>(kLanczosMaxBasis, static_cast<int>(h.dim())));
    const auto eig = tridiagonal_eigen(k);
    const Eigen::VectorXd y = eig.eigenvectors().col(0);
    RVector ritz = RVector::Zero(h.dim());
    for (std::size_t j = 0; j < k.basis.size(); ++j) ritz += y(static_cast<Eigen::Index>(j)) * k.basis[j];
    ritz.normalize();
    const double previous = energy;
    energy = eig.eigenvalues()(0);
    v = ritz;
    RVector hv;
    h.apply(v, hv);
    if ((hv - energy * v).norm() < 1e-10 || (restart > 0 && std::abs(previous - energy) < 1e-14)) break;
  }
  return {energy, v};
}

std::vector<double> loschmidt_exact_ed(const QuenchSpec& spec, int n_sites, const std::vector<double>& times) {
  if (n_sites > kMaxEdSites) throw ResourceLimit("loschmidt_exact_ed: limited to 14 sites");
  const TfimOperator h0(spec.J, spec.g0, n_sites);
  const TfimOperator h1(spec.J, spec.g1, n_sites);
  const RVector psi0 = ed_ground_state(h0).second;

  // <psi0| e^{-i H1 t} |psi0> = sum_j |y_j(0)|^2 e^{-i theta_j t} on the Krylov space of psi0.
  const Krylov k = lanczos(h1, psi0, std::min<int>(kLanczosMaxBasis, static_cast<int>(h1.dim())));
  const auto eig = tridiagonal_eigen(k);
  const Eigen::VectorXd theta = eig.eigenvalues();
  const Eigen::VectorXd weight = eig.eigenvectors().row(0).transpose().array().square();

  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    cplx amp = 0.0;
    for (Eigen::Index j = 0; j < theta.size(); ++j) amp += weight(j) * std::exp(-kI * theta(j) * t);
    out.push_back(-std::log(std::norm(amp)) / n_sites);
  }
  return out;
}

double loschmidt_exact_ed(const QuenchSpec& spec, int n_sites, double t) {
  return loschmidt_exact_ed(spec, n_sites, std::vector<double>{t}).front();
}

double loschmidt_exact_ff(double g0, double g1, double t, int k_points, double J) {
  if (k_points < 64) throw InvalidArgument("loschmidt_exact_ff: need at least 64 momenta");
  const double h0 = g0 / std::abs(J);
  const double h1 = g1 / std::abs(J);
  const double tau = std::abs(J) * t;
  const double dk = kPi / k_points;
  double sum = 0.0;
  for (int i = 0; i <= k_points; ++i) {
    const double k = i * dk;
    const double s2 = 1.0 - overlap_cos2(h0, h1, k);
    const double s = std::sin(quasiparticle_energy(h1, k) * tau);
    const double term = std::log(std::max(1.0 - s2 * s * s, 1e-300));
    sum += (i == 0 || i == k_points) ? 0.5 * term : term;
  }
  return 0.0 - sum * dk / (2.0 * kPi);  // +0 rather than -0 at t = 0
}

std::vector<double> loschmidt_exact_ff(double g0, double g1, const std::vector<double>& times, int k_points,
                                       double J) {
  std::vector<double> out(times.size());
  const std::int64_t n = static_cast<std::int64_t>(times.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = loschmidt_exact_ff(g0, g1, times[i], k_points, J);
  return out;
}

std::vector<double> critical_times(double g0, double g1, int count, double J) {
  const double h0 = g0 / std::abs(J);
  const double h1 = g1 / std::abs(J);
  const double ck = (1.0 + h0 * h1) / (h0 + h1);
  std::vector<double> out;
  if (!(std::abs(ck) <= 1.0)) return out;
  const double eps = quasiparticle_energy(h1, std::acos(ck));
  for (int m = 0; m < count; ++m) out.push_back((m + 0.5) * kPi / (eps * std::abs(J)));
  return out;
}

double ground_energy_density_ff(double J, double g) {
  const double h = g / std::abs(J);
  const int n = 1 << 14;  // Simpson panels
  const double dk = kPi / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double k = i * dk;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * std::sqrt(1.0 + h * h - 2.0 * h * std::cos(k));
  }
  return -std::abs(J) * sum * dk / 3.0 / kPi;
}

}  // namespace dqpt
