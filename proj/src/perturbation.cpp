#include "cbdcnk/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace cbdcnk {

// ---------------------------------------------------------------------------
// LAPACK bindings (generalized Schur decompositions).

extern "C" {
typedef int (*dgges_select)(const double*, const double*, const double*);
void dgges_(const char* jobvsl, const char* jobvsr, const char* sort, dgges_select selctg,
            const int* n, double* a, const int* lda, double* b, const int* ldb, int* sdim,
            double* alphar, double* alphai, double* beta, double* vsl, const int* ldvsl,
            double* vsr, const int* ldvsr, double* work, const int* lwork, int* bwork,
            int* info);
void zgges_(const char* jobvsl, const char* jobvsr, const char* sort, const void* selctg,
            const int* n, std::complex<double>* a, const int* lda, std::complex<double>* b,
            const int* ldb, int* sdim, std::complex<double>* alpha, std::complex<double>* beta,
            std::complex<double>* vsl, const int* ldvsl, std::complex<double>* vsr,
            const int* ldvsr, std::complex<double>* work, const int* lwork, double* rwork,
            int* bwork, int* info);
}

namespace {

extern "C" int select_inside_unit_circle(const double* ar, const double* ai, const double* b) {
  return std::hypot(*ar, *ai) < std::abs(*b) ? 1 : 0;
}

struct RealQzResult {
  Eigen::MatrixXd S, T, Z;  // A = Q S Z', B = Q T Z'
  std::vector<std::complex<double>> eigenvalues;
  int sdim = 0;
};

// Ordered generalized Schur of the pencil (A, B): eigenvalues with |alpha/beta|
// < 1 are moved to the top-left; first sdim columns of Z span the matching
// right deflating subspace.
RealQzResult ordered_real_qz(Eigen::MatrixXd A, Eigen::MatrixXd B) {
  const int n = static_cast<int>(A.rows());
  RealQzResult out;
  out.Z.resize(n, n);
  Eigen::MatrixXd vsl(n, n);
  Eigen::VectorXd alphar(n), alphai(n), beta(n);
  std::vector<int> bwork(n);
  int sdim = 0, info = 0, lwork = -1;
  double wsize = 0;
  dgges_("N", "V", "S", &select_inside_unit_circle, &n, A.data(), &n, B.data(), &n, &sdim,
         alphar.data(), alphai.data(), beta.data(), vsl.data(), &n, out.Z.data(), &n, &wsize,
         &lwork, bwork.data(), &info);
  lwork = static_cast<int>(wsize);
  std::vector<double> work(static_cast<size_t>(lwork));
  dgges_("N", "V", "S", &select_inside_unit_circle, &n, A.data(), &n, B.data(), &n, &sdim,
         alphar.data(), alphai.data(), beta.data(), vsl.data(), &n, out.Z.data(), &n,
         work.data(), &lwork, bwork.data(), &info);
  if (info != 0 && info != n + 2) {
    // info == n+2 flags roundoff-induced reordering sensitivity; eigenvalues
    // are still correct, which is all the selection below relies on.
    throw SolverError("dgges failed with info = " + std::to_string(info));
  }
  out.S = A;
  out.T = B;
  out.sdim = sdim;
  out.eigenvalues.reserve(n);
  int recount = 0;
  for (int i = 0; i < n; ++i) {
    if (beta[i] == 0.0)
      out.eigenvalues.emplace_back(std::numeric_limits<double>::infinity(), 0.0);
    else
      out.eigenvalues.emplace_back(alphar[i] / beta[i], alphai[i] / beta[i]);
    if (std::hypot(alphar[i], alphai[i]) < std::abs(beta[i])) ++recount;
  }
  if (recount != sdim)
    throw SolverError("dgges reordering is inconsistent with the eigenvalue count (" +
                      std::to_string(recount) + " vs " + std::to_string(sdim) + ")");
  return out;
}

struct ComplexQzResult {
  Eigen::MatrixXcd S, T, Q, Z;  // A = Q S Z^H, B = Q T Z^H
};

ComplexQzResult complex_qz(Eigen::MatrixXcd A, Eigen::MatrixXcd B) {
  const int n = static_cast<int>(A.rows());
  ComplexQzResult out;
  out.Q.resize(n, n);
  out.Z.resize(n, n);
  Eigen::VectorXcd alpha(n), beta(n);
  std::vector<int> bwork(n);
  std::vector<double> rwork(static_cast<size_t>(8 * n));
  int sdim = 0, info = 0, lwork = -1;
  std::complex<double> wsize;
  zgges_("V", "V", "N", nullptr, &n, A.data(), &n, B.data(), &n, &sdim, alpha.data(),
         beta.data(), out.Q.data(), &n, out.Z.data(), &n, &wsize, &lwork, rwork.data(),
         bwork.data(), &info);
  lwork = static_cast<int>(wsize.real());
  std::vector<std::complex<double>> work(static_cast<size_t>(lwork));
  zgges_("V", "V", "N", nullptr, &n, A.data(), &n, B.data(), &n, &sdim, alpha.data(),
         beta.data(), out.Q.data(), &n, out.Z.data(), &n, work.data(), &lwork, rwork.data(),
         bwork.data(), &info);
  if (info != 0) throw SolverError("zgges failed with info = " + std::to_string(info));
  out.S = A;
  out.T = B;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Derivatives

Derivatives differentiate(const EquationSystem& sys, const SteadyState& ss) {
  const int n = kNumVars;
  const int N = kStackN;
  Eigen::VectorXd res = sys.evaluate_static(ss.values);
  if (!res.allFinite()) throw SolverError("differentiate: residual not finite at steady state");
  if (res.cwiseAbs().maxCoeff() > 1e-8)
    throw SolverError("differentiate: point does not satisfy F = 0");

  std::vector<Hess> prev(n), curr(n), next(n), shocks(kNumShocks), out(n);
  for (int i = 0; i < n; ++i) {
    prev[i] = Hess::seed(ss.values[i], N, stack_prev(i));
    curr[i] = Hess::seed(ss.values[i], N, stack_curr(i));
    next[i] = Hess::seed(ss.values[i], N, stack_next(i));
  }
  for (int s = 0; s < kNumShocks; ++s) shocks[s] = Hess::seed(0.0, N, stack_shock(s));
  eval_residuals<Hess>(sys.spec(), prev.data(), curr.data(), next.data(), shocks.data(),
                       out.data());

  Derivatives d;
  d.f_prev.resize(n, n);
  d.f_curr.resize(n, n);
  d.f_next.resize(n, n);
  d.f_shock.resize(n, kNumShocks);
  d.hess.resize(n);
  for (int e = 0; e < n; ++e) {
    if (!out[e].g.allFinite() || !out[e].h.allFinite())
      throw SolverError("differentiate: non-finite derivative in equation " +
                        sys.equation_names()[e]);
    d.f_prev.row(e) = out[e].g.segment(0, n).transpose();
    d.f_curr.row(e) = out[e].g.segment(n, n).transpose();
    d.f_next.row(e) = out[e].g.segment(2 * n, n).transpose();
    d.f_shock.row(e) = out[e].g.segment(3 * n, kNumShocks).transpose();
    d.hess[e] = 0.5 * (out[e].h + out[e].h.transpose());  // enforce exact symmetry
  }
  return d;
}

void patch_policy_rule_rows(const ModelSpec& spec, const SteadyState& ss, Derivatives* d) {
  const int n = kNumVars;
  const Calibration& c = spec.cal;
  const double Rb = ss.values[kRBond];
  const double Rm = ss.values[kRCbdc];
  const double pib = c.pi_bar;
  const double yb = ss.anchors.y_ref;

  auto clear_row = [&](int row) {
    d->f_prev.row(row).setZero();
    d->f_curr.row(row).setZero();
    d->f_next.row(row).setZero();
    d->f_shock.row(row).setZero();
    d->hess[row].setZero();
  };

  {  // bond rule (row 28)
    const TaylorCoefficients& r = c.bond_rule;
    clear_row(28);
    d->f_curr(28, kRBond) = 1.0 / Rb;
    d->f_prev(28, kRBond) = -r.rho / Rb;
    d->f_curr(28, kPi) = -(1.0 - r.rho) * r.theta_pi / pib;
    d->f_curr(28, kY) = -(1.0 - r.rho) * r.theta_y / yb;
    d->f_curr(28, kExoR) = -1.0;
    Eigen::MatrixXd& h = d->hess[28];
    h(stack_curr(kRBond), stack_curr(kRBond)) = -1.0 / (Rb * Rb);
    h(stack_prev(kRBond), stack_prev(kRBond)) = r.rho / (Rb * Rb);
    h(stack_curr(kPi), stack_curr(kPi)) = (1.0 - r.rho) * r.theta_pi / (pib * pib);
    h(stack_curr(kY), stack_curr(kY)) = (1.0 - r.rho) * r.theta_y / (yb * yb);
  }
  {  // CBDC rule (row 30)
    clear_row(30);
    if (spec.variant.cbdc_rate_regime == CbdcRateRegime::taylor_rule) {
      const TaylorCoefficients& r = c.cbdc_rule;
      d->f_curr(30, kRCbdc) = 1.0 / Rm;
      d->f_prev(30, kRCbdc) = -r.rho / Rm;
      d->f_curr(30, kPi) = -(1.0 - r.rho) * r.theta_pi / pib;
      d->f_curr(30, kY) = -(1.0 - r.rho) * r.theta_y / yb;
      d->f_curr(30, kExoM) = -1.0;
      Eigen::MatrixXd& h = d->hess[30];
      h(stack_curr(kRCbdc), stack_curr(kRCbdc)) = -1.0 / (Rm * Rm);
      h(stack_prev(kRCbdc), stack_prev(kRCbdc)) = r.rho / (Rm * Rm);
      h(stack_curr(kPi), stack_curr(kPi)) = (1.0 - r.rho) * r.theta_pi / (pib * pib);
      h(stack_curr(kY), stack_curr(kY)) = (1.0 - r.rho) * r.theta_y / (yb * yb);
    } else {
      d->f_curr(30, kRCbdc) = 1.0;
    }
  }
  (void)n;
}

// ---------------------------------------------------------------------------
// First order (Klein): stack z_t = [lagged states; all variables].

double FirstOrderSolution::spectral_radius() const {
  return hx.eigenvalues().cwiseAbs().maxCoeff();
}

FirstOrderSolution solve_first_order(const Derivatives& d, const SteadyState& ss,
                                     const SolveOptions& opts) {
  const VariableSet& vs = variable_set();
  const int n = kNumVars;
  const int ns = vs.num_states();
  const int nk = ns + n;

  Eigen::MatrixXd AA = Eigen::MatrixXd::Zero(nk, nk);  // multiplies z_{t+1}
  Eigen::MatrixXd BB = Eigen::MatrixXd::Zero(nk, nk);  // multiplies z_t
  for (int s = 0; s < ns; ++s) {
    AA(s, s) = 1.0;
    BB(s, ns + vs.state_indices[s]) = 1.0;
  }
  for (int e = 0; e < n; ++e) {
    for (int j = 0; j < n; ++j) {
      AA(ns + e, ns + j) = d.f_next(e, j);
      BB(ns + e, ns + j) = -d.f_curr(e, j);
    }
    for (int s = 0; s < ns; ++s) BB(ns + e, s) = -d.f_prev(e, vs.state_indices[s]);
  }

  // Growth rates mu solve det(BB - mu AA) = 0; request stable ones first.
  RealQzResult qz = ordered_real_qz(BB, AA);

  for (const auto& ev : qz.eigenvalues) {
    double mod = std::abs(ev);
    if (std::isfinite(mod) && std::abs(mod - 1.0) < opts.unit_circle_margin)
      throw BlanchardKahnError("generalized eigenvalue within 1e-8 of the unit circle (|mu| = " +
                               std::to_string(mod) + ")");
  }
  if (qz.sdim != ns) {
    std::ostringstream os;
    os << "Blanchard-Kahn condition failed: " << qz.sdim << " stable eigenvalues for " << ns
       << " predetermined variables ("
       << (qz.sdim > ns ? "indeterminacy" : "no stable solution") << ")";
    throw BlanchardKahnError(os.str());
  }

  Eigen::MatrixXd Z11 = qz.Z.topLeftCorner(ns, ns);
  Eigen::MatrixXd Z21 = qz.Z.bottomLeftCorner(n, ns);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Z11);
  if (!lu.isInvertible())
    throw BlanchardKahnError("Klein rank condition failed: Z11 singular");
  Eigen::MatrixXd gx = Z21 * lu.inverse();

  FirstOrderSolution fo;
  fo.gx = gx;
  fo.n_states = ns;
  fo.n_stable = qz.sdim;
  fo.eigenvalues = qz.eigenvalues;
  std::sort(fo.eigenvalues.begin(), fo.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              return std::abs(a) < std::abs(b);
            });
  fo.P = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < ns; ++s) fo.P.col(vs.state_indices[s]) = gx.col(s);
  fo.hx.resize(ns, ns);
  for (int s = 0; s < ns; ++s) fo.hx.row(s) = gx.row(vs.state_indices[s]);

  Eigen::MatrixXd lhs = d.f_curr + d.f_next * fo.P;
  Eigen::PartialPivLU<Eigen::MatrixXd> lhs_lu(lhs);
  fo.Q = lhs_lu.solve(-d.f_shock);
  fo.he.resize(ns, kNumShocks);
  for (int s = 0; s < ns; ++s) fo.he.row(s) = fo.Q.row(vs.state_indices[s]);
  fo.steady = ss.values;

  if (opts.check_residuals) {
    double rq = (d.f_next * fo.P * fo.P + d.f_curr * fo.P + d.f_prev).cwiseAbs().maxCoeff();
    double ri = (lhs * fo.Q + d.f_shock).cwiseAbs().maxCoeff();
    if (rq > opts.first_order_tol || ri > opts.first_order_tol) {
      std::ostringstream os;
      os << "first-order plug-back residual too large (" << rq << ", " << ri << ")";
      throw SolverError(os.str());
    }
  }
  return fo;
}

// ---------------------------------------------------------------------------
// Second order.

namespace {

// Solves A X + B X (hx (x) hx) = C for X (n x ns^2) via complex QZ of (B, A)
// and a complex Schur form of hx; per-column triangular solves.
Eigen::MatrixXd solve_generalized_sylvester(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                            const Eigen::MatrixXd& hx,
                                            const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(A.rows());
  const int ns = static_cast<int>(hx.rows());
  using Cplx = std::complex<double>;

  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(hx.cast<Cplx>());
  if (schur.info() != Eigen::Success) throw SolverError("complex Schur of hx failed");
  const Eigen::MatrixXcd U = schur.matrixU();
  const Eigen::MatrixXcd Th = schur.matrixT();

  const Eigen::MatrixXcd Bc = B.cast<Cplx>();
  ComplexQzResult qz = complex_qz(Bc, A.cast<Cplx>());
  // B = Q S Z^H, A = Q T Z^H; then (A + c B) y = r  =>  y = Z (T + c S)^{-1} Q^H r.
  const Eigen::MatrixXcd QH = qz.Q.adjoint();

  // Transform the right-hand side: Ct = C (U (x) U).
  Eigen::MatrixXcd Ct(n, ns * ns);
  {
    Eigen::MatrixXcd Cc = C.cast<Cplx>();
    Eigen::MatrixXcd tmp = Eigen::MatrixXcd::Zero(n, ns * ns);  // (a,b) -> (a,l)
    for (int a = 0; a < ns; ++a)
      for (int l = 0; l < ns; ++l) {
        for (int b = 0; b < ns; ++b) tmp.col(a * ns + l) += Cc.col(a * ns + b) * U(b, l);
      }
    Ct.setZero();
    for (int k = 0; k < ns; ++k)
      for (int l = 0; l < ns; ++l) {
        for (int a = 0; a < ns; ++a) Ct.col(k * ns + l) += tmp.col(a * ns + l) * U(a, k);
      }
  }

  // Column blocks of Y by second index: Yblk[j].col(i) = Y_{(i,j)}.
  Eigen::MatrixXcd Y(n, ns * ns);
  std::vector<Eigen::MatrixXcd> Yblk(ns, Eigen::MatrixXcd::Zero(n, ns));
  Eigen::MatrixXcd acc_prev(n, ns);  // sum_{j<l} Th(j,l) Yblk[j]
  Eigen::VectorXcd rhs(n), acc(n), tri_rhs(n);
  Eigen::MatrixXcd Tri(n, n);
  for (int l = 0; l < ns; ++l) {
    acc_prev.setZero();
    for (int j = 0; j < l; ++j)
      if (Th(j, l) != Cplx(0, 0)) acc_prev += Th(j, l) * Yblk[j];
    for (int k = 0; k < ns; ++k) {
      // acc = sum over already-solved (i,j) of Y_{(i,j)} Th(i,k) Th(j,l).
      acc = acc_prev.leftCols(k + 1) * Th.col(k).head(k + 1);
      if (k > 0) acc += Th(l, l) * (Yblk[l].leftCols(k) * Th.col(k).head(k));
      rhs = Ct.col(k * ns + l) - Bc * acc;
      const Cplx cdiag = Th(k, k) * Th(l, l);
      Tri = qz.T + cdiag * qz.S;
      for (int i = 0; i < n; ++i) {
        if (std::abs(Tri(i, i)) < 1e-13) {
          std::ostringstream os;
          os << "singular Sylvester solve: eigenvalue pair (" << Th(k, k).real() << "+"
             << Th(k, k).imag() << "i, " << Th(l, l).real() << "+" << Th(l, l).imag() << "i)";
          throw SolverError(os.str());
        }
      }
      tri_rhs = QH * rhs;
      Y.col(k * ns + l) = qz.Z * Tri.triangularView<Eigen::Upper>().solve(tri_rhs);
      Yblk[l].col(k) = Y.col(k * ns + l);
    }
  }

  // Back-transform: X = Y (U^H (x) U^H) => X_{(a,b)} = sum_{i,j} Y_{(i,j)} conj(U(a,i)U(b,j)).
  Eigen::MatrixXcd tmp = Eigen::MatrixXcd::Zero(n, ns * ns);
  for (int i = 0; i < ns; ++i)
    for (int b = 0; b < ns; ++b) {
      for (int j = 0; j < ns; ++j) tmp.col(i * ns + b) += Y.col(i * ns + j) * std::conj(U(b, j));
    }
  Eigen::MatrixXcd Xc = Eigen::MatrixXcd::Zero(n, ns * ns);
  for (int a = 0; a < ns; ++a)
    for (int b = 0; b < ns; ++b) {
      for (int i = 0; i < ns; ++i) Xc.col(a * ns + b) += tmp.col(i * ns + b) * std::conj(U(a, i));
    }
  return Xc.real();
}

}  // namespace

Eigen::MatrixXd diagonal_shock_cov(const std::array<double, kNumShocks>& sigmas) {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(kNumShocks, kNumShocks);
  for (int i = 0; i < kNumShocks; ++i) cov(i, i) = sigmas[i] * sigmas[i];
  return cov;
}

Eigen::MatrixXd state_covariance(const FirstOrderSolution& fo, const Eigen::MatrixXd& shock_cov) {
  // Doubling iteration for the discrete Lyapunov equation.
  Eigen::MatrixXd A = fo.hx;
  Eigen::MatrixXd S = fo.he * shock_cov * fo.he.transpose();
  for (int it = 0; it < 200; ++it) {
    Eigen::MatrixXd S_next = S + A * S * A.transpose();
    Eigen::MatrixXd A_next = A * A;
    if ((S_next - S).cwiseAbs().maxCoeff() < 1e-15 * (1.0 + S.cwiseAbs().maxCoeff())) {
      return S_next;
    }
    S = std::move(S_next);
    A = std::move(A_next);
  }
  return S;
}

Eigen::VectorXd pruned_unconditional_mean(const SecondOrderSolution& sol) {
  const VariableSet& vs = variable_set();
  const int n = kNumVars;
  const int ns = vs.num_states();
  const int nu = kNumShocks;
  const FirstOrderSolution& fo = sol.first;

  Eigen::MatrixXd Sw = state_covariance(fo, sol.shock_cov);
  Eigen::VectorXd quad = sol.sigma2_constant;  // 0.5 g_ss
  for (int a = 0; a < ns; ++a)
    for (int b = 0; b < ns; ++b)
      if (Sw(a, b) != 0.0) quad += 0.5 * Sw(a, b) * sol.g_ww.col(a * ns + b);
  for (int s1 = 0; s1 < nu; ++s1)
    for (int s2 = 0; s2 < nu; ++s2)
      if (sol.shock_cov(s1, s2) != 0.0)
        quad += 0.5 * sol.shock_cov(s1, s2) * sol.g_ee.col(s1 * nu + s2);

  // E[w2] = (I - hx)^{-1} S quad; E[v] = steady + gx E[w2] + quad.
  Eigen::VectorXd quad_states(ns);
  for (int s = 0; s < ns; ++s) quad_states[s] = quad[vs.state_indices[s]];
  Eigen::MatrixXd I_hx = Eigen::MatrixXd::Identity(ns, ns) - fo.hx;
  Eigen::VectorXd w2_mean = I_hx.partialPivLu().solve(quad_states);
  return fo.steady + fo.gx * w2_mean + quad;
}

SecondOrderSolution solve_second_order(const Derivatives& d, const FirstOrderSolution& fo,
                                       const Eigen::MatrixXd& shock_cov,
                                       const SolveOptions& opts) {
  const VariableSet& vs = variable_set();
  const int n = kNumVars;
  const int ns = vs.num_states();
  const int nu = kNumShocks;
  const int N = kStackN;
  const int m = ns + nu;

  if (shock_cov.rows() != nu || shock_cov.cols() != nu)
    throw std::invalid_argument("shock covariance has wrong dimensions");

  // First derivatives of the stacked argument z(w, e) at the steady state.
  Eigen::MatrixXd M1 = Eigen::MatrixXd::Zero(N, m);
  for (int s = 0; s < ns; ++s) M1(stack_prev(vs.state_indices[s]), s) = 1.0;
  M1.block(kNumVars, 0, n, ns) = fo.gx;
  M1.block(kNumVars, ns, n, nu) = fo.Q;
  M1.block(2 * kNumVars, 0, n, ns) = fo.gx * fo.hx;
  M1.block(2 * kNumVars, ns, n, nu) = fo.gx * fo.he;
  for (int s = 0; s < nu; ++s) M1(stack_shock(s), ns + s) = 1.0;

  // D = F_zz[M1 (x) M1], split into (w,w), (w,e), (e,e) blocks.
  Eigen::MatrixXd Dww(n, ns * ns), Dwe(n, ns * nu), Dee(n, nu * nu);
  {
    const Eigen::MatrixXd M1w = M1.leftCols(ns);
    const Eigen::MatrixXd M1e = M1.rightCols(nu);
    for (int e = 0; e < n; ++e) {
      Eigen::MatrixXd hw = d.hess[e] * M1w;          // N x ns
      Eigen::MatrixXd ww = M1w.transpose() * hw;     // ns x ns
      Eigen::MatrixXd we = hw.transpose() * M1e;     // ns x nu
      Eigen::MatrixXd ee = M1e.transpose() * (d.hess[e] * M1e);
      for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b) Dww(e, a * ns + b) = ww(a, b);
      for (int a = 0; a < ns; ++a)
        for (int s = 0; s < nu; ++s) Dwe(e, a * nu + s) = we(a, s);
      for (int a = 0; a < nu; ++a)
        for (int b = 0; b < nu; ++b) Dee(e, a * nu + b) = ee(a, b);
    }
  }

  const Eigen::MatrixXd A = d.f_curr + d.f_next * fo.P;
  const Eigen::MatrixXd& B = d.f_next;

  SecondOrderSolution so;
  so.first = fo;
  so.shock_cov = shock_cov;
  so.g_ww = solve_generalized_sylvester(A, B, fo.hx, -Dww);

  Eigen::PartialPivLU<Eigen::MatrixXd> A_lu(A);

  // g_we: A X = -(Dwe + B g_ww (hx (x) he))
  Eigen::MatrixXd rhs_we = Dwe;
  {
    Eigen::MatrixXd cross(n, ns * nu);
    cross.setZero();
    for (int j = 0; j < ns; ++j)
      for (int s = 0; s < nu; ++s) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
        for (int a = 0; a < ns; ++a) {
          if (fo.hx(a, j) == 0.0) continue;
          for (int b = 0; b < ns; ++b) {
            double w = fo.hx(a, j) * fo.he(b, s);
            if (w != 0.0) col += so.g_ww.col(a * ns + b) * w;
          }
        }
        cross.col(j * nu + s) = col;
      }
    rhs_we += B * cross;
  }
  so.g_we = A_lu.solve(-rhs_we);

  // g_ee: A X = -(Dee + B g_ww (he (x) he))
  Eigen::MatrixXd rhs_ee = Dee;
  {
    Eigen::MatrixXd cross(n, nu * nu);
    cross.setZero();
    for (int s1 = 0; s1 < nu; ++s1)
      for (int s2 = 0; s2 < nu; ++s2) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
        for (int a = 0; a < ns; ++a)
          for (int b = 0; b < ns; ++b) {
            double w = fo.he(a, s1) * fo.he(b, s2);
            if (w != 0.0) col += so.g_ww.col(a * ns + b) * w;
          }
        cross.col(s1 * nu + s2) = col;
      }
    rhs_ee += B * cross;
  }
  so.g_ee = A_lu.solve(-rhs_ee);

  // sigma-sigma block: (A + B) g_ss = -(B g_ee vec(cov) + <H^{v'v'}, Q cov Q'>).
  Eigen::VectorXd gee_cov = Eigen::VectorXd::Zero(n);
  for (int s1 = 0; s1 < nu; ++s1)
    for (int s2 = 0; s2 < nu; ++s2)
      if (shock_cov(s1, s2) != 0.0) gee_cov += so.g_ee.col(s1 * nu + s2) * shock_cov(s1, s2);
  Eigen::MatrixXd qcovq = fo.Q * shock_cov * fo.Q.transpose();
  Eigen::VectorXd hvv(n);
  for (int e = 0; e < n; ++e) {
    const auto block = d.hess[e].block(2 * kNumVars, 2 * kNumVars, n, n);
    hvv(e) = (block.array() * qcovq.array()).sum();
  }
  Eigen::MatrixXd As = A + B;
  so.g_ss = Eigen::PartialPivLU<Eigen::MatrixXd>(As).solve(-(B * gee_cov + hvv));
  so.sigma2_constant = 0.5 * so.g_ss;

  if (opts.check_residuals) {
    // Plug the solved tensors back into the chain-rule systems.
    Eigen::MatrixXd res_ww = A * so.g_ww + Dww;
    for (int k = 0; k < ns; ++k)
      for (int l = 0; l < ns; ++l) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
        for (int a = 0; a < ns; ++a) {
          if (fo.hx(a, k) == 0.0) continue;
          for (int b = 0; b < ns; ++b) {
            double w = fo.hx(a, k) * fo.hx(b, l);
            if (w != 0.0) col += so.g_ww.col(a * ns + b) * w;
          }
        }
        res_ww.col(k * ns + l) += B * col;
      }
    so.plugback_ww = res_ww.cwiseAbs().maxCoeff();
    Eigen::MatrixXd res_we = A * so.g_we + rhs_we;
    so.plugback_we = res_we.cwiseAbs().maxCoeff();
    Eigen::MatrixXd res_ee = A * so.g_ee + rhs_ee;
    so.plugback_ee = res_ee.cwiseAbs().maxCoeff();
    so.plugback_ss = (As * so.g_ss + B * gee_cov + hvv).cwiseAbs().maxCoeff();
    double worst = std::max({so.plugback_ww, so.plugback_we, so.plugback_ee, so.plugback_ss});
    if (worst > opts.second_order_tol)
      throw SolverError("second-order plug-back residual too large: " + std::to_string(worst));
  }
  return so;
}

PrunedState PrunedState::zero(int ns) {
  PrunedState st;
  st.w1 = Eigen::VectorXd::Zero(ns);
  st.w2 = Eigen::VectorXd::Zero(ns);
  return st;
}

std::pair<PrunedState, Eigen::VectorXd> step_pruned(const SecondOrderSolution& sol,
                                                    const PrunedState& st,
                                                    const Eigen::VectorXd& innovations) {
  const VariableSet& vs = variable_set();
  const int n = kNumVars;
  const int ns = vs.num_states();
  const int nu = kNumShocks;
  const FirstOrderSolution& fo = sol.first;

  // Quadratic contributions evaluated on the first-order state only.
  Eigen::VectorXd quad = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < ns; ++a) {
    if (st.w1[a] == 0.0) continue;
    for (int b = 0; b < ns; ++b) {
      double w = 0.5 * st.w1[a] * st.w1[b];
      if (w != 0.0) quad += sol.g_ww.col(a * ns + b) * w;
    }
    for (int s = 0; s < nu; ++s) {
      double w = st.w1[a] * innovations[s];
      if (w != 0.0) quad += sol.g_we.col(a * nu + s) * w;
    }
  }
  for (int s1 = 0; s1 < nu; ++s1) {
    if (innovations[s1] == 0.0) continue;
    for (int s2 = 0; s2 < nu; ++s2) {
      double w = 0.5 * innovations[s1] * innovations[s2];
      if (w != 0.0) quad += sol.g_ee.col(s1 * nu + s2) * w;
    }
  }
  quad += sol.sigma2_constant;

  Eigen::VectorXd dev1 = fo.gx * st.w1 + fo.Q * innovations;
  Eigen::VectorXd dev2 = fo.gx * st.w2 + quad;

  PrunedState nxt;
  nxt.w1.resize(ns);
  nxt.w2.resize(ns);
  for (int s = 0; s < ns; ++s) {
    nxt.w1[s] = dev1[vs.state_indices[s]];
    nxt.w2[s] = dev2[vs.state_indices[s]];
  }
  Eigen::VectorXd levels = fo.steady + dev1 + dev2;
  return {std::move(nxt), std::move(levels)};
}

}  // namespace cbdcnk
